#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "snapgan/autodiff/sparse.hpp"
#include "snapgan/autodiff/tape.hpp"
#include "snapgan/common/rng.hpp"

// Differentiable primitives. Every op validates shapes and throws
// std::invalid_argument on mismatch.
namespace snapgan::ad {

enum class Mode { kTrain, kEval };

// (m x k) * (k x n)
Var matmul(const Var& a, const Var& b);
// Constant sparse operator times a dense rank-2 var.
Var spmm(std::shared_ptr<const SparseMatrix> op, const Var& x);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double offset);
// Adds a length-n row vector (shape {n} or {1, n}) to every row of an m x n var.
Var add_row(const Var& a, const Var& row);

Var relu(const Var& x);
Var sigmoid(const Var& x);
// log(1 + exp(x)), elementwise, overflow-free.
Var softplus(const Var& x);
// log(sigmoid(x)) = -softplus(-x).
Var log_sigmoid(const Var& x);
Var log(const Var& x);
Var exp(const Var& x);

// Over all elements of a rank-1 var (max-shifted).
Var softmax(const Var& x);
Var log_softmax(const Var& x);

Var sum(const Var& x);
Var mean(const Var& x);
// Column means of a rank-2 var, shape {1, cols}.
Var mean_rows(const Var& x);

// Element i of x as a scalar.
Var element(const Var& x, std::size_t index);
// Concatenates scalar vars into a rank-1 var.
Var stack_scalars(std::span<const Var> scalars);
// Concatenates rank-2 vars with equal row counts along columns.
Var concat_cols(std::span<const Var> parts);
// Output row r copies x row indices[r]; std::nullopt yields a zero row.
Var gather_rows(const Var& x, std::span<const std::optional<std::size_t>> indices);
Var reshape(const Var& x, Shape shape);

// input: len x in_channels; kernels: kernel_size x in_channels x out_channels.
// Output: ((len - kernel_size) / stride + 1) x out_channels, no padding.
Var conv1d(const Var& input, const Var& kernels, std::size_t stride = 1);

// Inverted dropout: in train mode each element is zeroed with probability
// `rate` and survivors scaled by 1 / (1 - rate). Identity in eval mode.
Var dropout(const Var& x, double rate, Mode mode, Rng& rng);

// Numerically stable scalar helpers shared with non-tape code.
double softplus(double x);
double sigmoid(double x);

}  // namespace snapgan::ad
