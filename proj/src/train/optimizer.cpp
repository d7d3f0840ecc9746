#include "snapgan/train/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace snapgan::train {

Optimizer::Optimizer(OptimizerKind kind, double lr, double beta1, double beta2, double epsilon)
    : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (!(lr > 0)) throw std::invalid_argument("learning rate must be positive");
}

void Optimizer::step(std::span<ad::Tensor* const> params,
                     std::span<const ad::Tensor* const> grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("optimizer: one gradient slot per parameter required");
  }
  if (m_.empty()) {
    for (const ad::Tensor* p : params) {
      m_.emplace_back(p->shape(), 0.0);
      v_.emplace_back(p->shape(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("optimizer: parameter list changed");
  ++t_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor& p = *params[i];
    if (m_[i].shape() != p.shape() || (grads[i] && grads[i]->shape() != p.shape())) {
      throw std::invalid_argument("optimizer: shape mismatch");
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double g = grads[i] ? (*grads[i])[j] : 0.0;
      if (kind_ == OptimizerKind::kSgd) {
        p[j] -= lr_ * g;
        continue;
      }
      double& m = m_[i][j];
      double& v = v_[i][j];
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g * g;
      p[j] -= lr_ * (m / bias1) / (std::sqrt(v / bias2) + epsilon_);
    }
  }
}

}  // namespace snapgan::train
