#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"
#include "snapgan/train/config.hpp"

namespace snapgan::train {

// First-order update rule holding per-parameter state (Adam moments).
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, double beta1 = 0.9, double beta2 = 0.999,
            double epsilon = 1e-8);

  // Descends along `grads`; a null gradient counts as zero. The parameter
  // list must keep the same shapes across calls.
  void step(std::span<ad::Tensor* const> params, std::span<const ad::Tensor* const> grads);

  std::size_t steps_taken() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_, beta1_, beta2_, epsilon_;
  std::size_t t_ = 0;
  std::vector<ad::Tensor> m_, v_;
};

}  // namespace snapgan::train
