#include "snapgan/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "snapgan/autodiff/ops.hpp"

namespace snapgan::ad {
namespace {

double evaluate(const ScalarFunction& fn, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const auto& t : inputs) leaves.push_back(tape.constant(t));
  return fn(tape, leaves).value().item();
}

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// Values bounded away from zero so relu/log kinks stay outside the FD stencil.
Tensor away_from_zero(Rng& rng, Shape shape) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) {
    const double mag = rng.uniform(0.1, 1.0);
    v = rng.bernoulli(0.5) ? mag : -mag;
  }
  return t;
}

// sum(x * w) with w a random constant drawn from the case inputs.
Var readout(const Var& x, const Var& weights) {
  return sum(mul(x, reshape(weights, x.shape())));
}

}  // namespace

GradCheckResult check_gradients(const ScalarFunction& fn, std::vector<Tensor> inputs,
                                const GradCheckOptions& options,
                                std::size_t fixed_inputs) {
  if (fixed_inputs > inputs.size()) throw std::invalid_argument("too many fixed inputs");
  const std::size_t free_inputs = inputs.size() - fixed_inputs;
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      leaves.push_back(tape.leaf(inputs[i], i < free_inputs));
    }
    Var out = fn(tape, leaves);
    tape.backward(out);
    for (const auto& leaf : leaves) {
      const Tensor* g = tape.grad(leaf);
      analytic.push_back(g ? *g : Tensor(leaf.shape(), 0.0));
    }
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < free_inputs; ++i) {
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      const double original = inputs[i][j];
      inputs[i][j] = original + options.step;
      const double up = evaluate(fn, inputs);
      inputs[i][j] = original - options.step;
      const double down = evaluate(fn, inputs);
      inputs[i][j] = original;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[i][j];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.scale_floor});
      if (options.skip_nonsmooth) {
        inputs[i][j] = original + 0.5 * options.step;
        const double up_half = evaluate(fn, inputs);
        inputs[i][j] = original - 0.5 * options.step;
        const double down_half = evaluate(fn, inputs);
        inputs[i][j] = original;
        const double numeric_half = (up_half - down_half) / options.step;
        if (std::abs(numeric - numeric_half) > options.rel_tolerance * denom) {
          ++result.entries_skipped;
          continue;
        }
      }
      const double rel = std::abs(a - numeric) / denom;
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.entries_checked;
      if (!(rel <= options.rel_tolerance)) result.passed = false;
    }
  }
  const double total = static_cast<double>(result.entries_checked + result.entries_skipped);
  if (result.entries_skipped > options.max_skipped_fraction * total) result.passed = false;
  return result;
}

std::vector<GradCheckCase> primitive_gradcheck_cases() {
  std::vector<GradCheckCase> cases;

  cases.push_back({"matmul",
                   [](Rng& rng) {
                     const std::size_t m = 1 + rng.uniform_index(4);
                     const std::size_t k = 1 + rng.uniform_index(4);
                     const std::size_t n = 1 + rng.uniform_index(4);
                     return std::vector<Tensor>{random_tensor(rng, {m, k}),
                                                random_tensor(rng, {k, n}),
                                                random_tensor(rng, {m, n})};
                   },
                   [](Tape&, std::span<const Var> in) {
                     return readout(matmul(in[0], in[1]), in[2]);
                   }});

  cases.push_back({"spmm",
                   [](Rng& rng) {
                     const std::size_t n = 2 + rng.uniform_index(5);
                     const std::size_t w = 1 + rng.uniform_index(3);
                     // The operator is encoded densely as an input; zero
                     // entries become structural zeros.
                     Tensor op({n, n});
                     for (double& v : op.values()) v = rng.bernoulli(0.4) ? rng.uniform(-1, 1) : 0.0;
                     return std::vector<Tensor>{random_tensor(rng, {n, w}),
                                                random_tensor(rng, {n, w}), op};
                   },
                   [](Tape&, std::span<const Var> in) {
                     const Tensor& dense = in[2].value();
                     std::vector<SparseMatrix::Entry> entries;
                     for (std::size_t r = 0; r < dense.rows(); ++r) {
                       for (std::size_t c = 0; c < dense.cols(); ++c) {
                         if (dense(r, c) != 0.0) entries.push_back({r, c, dense(r, c)});
                       }
                     }
                     auto op = std::make_shared<const SparseMatrix>(
                         SparseMatrix::from_entries(dense.rows(), dense.cols(), entries));
                     return readout(spmm(op, in[0]), in[1]);
                   },
                   1});

  auto elementwise = [&cases](std::string name, auto op, bool avoid_zero) {
    cases.push_back({std::move(name),
                     [avoid_zero](Rng& rng) {
                       const std::size_t n = 1 + rng.uniform_index(16);
                       Tensor x = avoid_zero ? away_from_zero(rng, {n}) : random_tensor(rng, {n}, -3, 3);
                       return std::vector<Tensor>{x, random_tensor(rng, {n})};
                     },
                     [op](Tape&, std::span<const Var> in) { return readout(op(in[0]), in[1]); }});
  };
  elementwise("relu", [](const Var& x) { return relu(x); }, true);
  elementwise("sigmoid", [](const Var& x) { return sigmoid(x); }, false);
  elementwise("softplus", [](const Var& x) { return softplus(x); }, false);
  elementwise("log_sigmoid", [](const Var& x) { return log_sigmoid(x); }, false);
  elementwise("exp", [](const Var& x) { return exp(x); }, false);
  elementwise("log", [](const Var& x) { return log(add_scalar(mul(x, x), 0.5)); }, false);
  elementwise("softmax", [](const Var& x) { return softmax(x); }, false);
  elementwise("log_softmax", [](const Var& x) { return log_softmax(x); }, false);
  elementwise("scale", [](const Var& x) { return scale(x, -2.5); }, false);

  cases.push_back({"add_sub_mul",
                   [](Rng& rng) {
                     const std::size_t n = 1 + rng.uniform_index(12);
                     return std::vector<Tensor>{random_tensor(rng, {n}), random_tensor(rng, {n}),
                                                random_tensor(rng, {n})};
                   },
                   [](Tape&, std::span<const Var> in) {
                     return readout(mul(add(in[0], in[1]), sub(in[0], in[2])), in[2]);
                   }});

  cases.push_back({"add_row_mean_rows",
                   [](Rng& rng) {
                     const std::size_t m = 1 + rng.uniform_index(5);
                     const std::size_t n = 1 + rng.uniform_index(5);
                     return std::vector<Tensor>{random_tensor(rng, {m, n}), random_tensor(rng, {n}),
                                                random_tensor(rng, {1, n})};
                   },
                   [](Tape&, std::span<const Var> in) {
                     return readout(mean_rows(add_row(in[0], in[1])), in[2]);
                   }});

  cases.push_back({"concat_gather",
                   [](Rng& rng) {
                     const std::size_t m = 1 + rng.uniform_index(5);
                     return std::vector<Tensor>{random_tensor(rng, {m, 2}), random_tensor(rng, {m, 3}),
                                                random_tensor(rng, {m + 2, 5})};
                   },
                   [](Tape&, std::span<const Var> in) {
                     std::vector<Var> parts{in[0], in[1]};
                     Var joined = concat_cols(parts);
                     const std::size_t m = in[0].value().rows();
                     // Reverse order, one duplicated row, then two zero rows.
                     std::vector<std::optional<std::size_t>> idx;
                     for (std::size_t r = m; r-- > 0;) idx.emplace_back(r);
                     idx.back() = 0;
                     idx.emplace_back(std::nullopt);
                     idx.emplace_back(std::nullopt);
                     return readout(gather_rows(joined, idx), in[2]);
                   }});

  cases.push_back({"conv1d",
                   [](Rng& rng) {
                     const std::size_t k = 1 + rng.uniform_index(3);
                     const std::size_t len = k + rng.uniform_index(5);
                     const std::size_t cin = 1 + rng.uniform_index(3);
                     const std::size_t cout = 1 + rng.uniform_index(3);
                     const std::size_t stride = 1 + rng.uniform_index(2);
                     const std::size_t out_len = (len - k) / stride + 1;
                     return std::vector<Tensor>{random_tensor(rng, {len, cin}),
                                                random_tensor(rng, {k, cin, cout}),
                                                random_tensor(rng, {out_len, cout}),
                                                Tensor::scalar(static_cast<double>(stride))};
                   },
                   [](Tape&, std::span<const Var> in) {
                     const auto stride = static_cast<std::size_t>(in[3].value().item() + 0.5);
                     return readout(conv1d(in[0], in[1], stride), in[2]);
                   },
                   1});

  cases.push_back({"sum_mean_element",
                   [](Rng& rng) {
                     const std::size_t n = 2 + rng.uniform_index(10);
                     return std::vector<Tensor>{random_tensor(rng, {n})};
                   },
                   [](Tape&, std::span<const Var> in) {
                     Var s = add(sum(in[0]), scale(mean(in[0]), 3.0));
                     std::vector<Var> parts{s, element(in[0], 1), element(in[0], 0)};
                     Var stacked = stack_scalars(parts);
                     return sum(mul(stacked, stacked));
                   }});

  cases.push_back({"sigmoid_of_product",
                   [](Rng& rng) {
                     const std::size_t m = 1 + rng.uniform_index(4);
                     const std::size_t k = 1 + rng.uniform_index(4);
                     return std::vector<Tensor>{random_tensor(rng, {m, k}), random_tensor(rng, {k, 1})};
                   },
                   [](Tape&, std::span<const Var> in) { return sum(sigmoid(matmul(in[0], in[1]))); }});

  return cases;
}

std::vector<GradCheckReport> run_gradcheck_cases(std::span<const GradCheckCase> cases,
                                                 std::size_t instances, std::uint64_t seed,
                                                 const GradCheckOptions& options) {
  std::vector<GradCheckReport> reports;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    GradCheckReport report{cases[c].name, instances, 0.0, 0, 0, true};
    for (std::size_t i = 0; i < instances; ++i) {
      Rng rng(seed + i, c);
      const auto result =
          check_gradients(cases[c].fn, cases[c].make_inputs(rng), options, cases[c].fixed_inputs);
      report.worst_rel_error = std::max(report.worst_rel_error, result.max_rel_error);
      report.entries_checked += result.entries_checked;
      report.entries_skipped += result.entries_skipped;
      report.passed = report.passed && result.passed;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace snapgan::ad
