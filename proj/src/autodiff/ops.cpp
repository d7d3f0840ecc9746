#include "snapgan/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snapgan::ad {
namespace {

[[noreturn]] void shape_error(const std::string& op, const Shape& a,
                              const Shape& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + shape_string(a) +
                              " and " + shape_string(b));
}

void require_rank(const std::string& op, const Var& x, std::size_t rank) {
  if (x.value().rank() != rank) {
    throw std::invalid_argument(op + ": expected rank " + std::to_string(rank) +
                                ", got shape " + shape_string(x.shape()));
  }
}

// Returns the parent's gradient buffer, or nullptr when it takes no gradient.
Tensor* grad_of(Tape& tape, const Var& parent) {
  if (!parent.requires_grad()) return nullptr;
  return &tape.grad_buffer(parent.id());
}

// out = a * b for dense rank-2 tensors; accumulate into out.
void gemm_acc(const double* a, const double* b, double* out, std::size_t m,
              std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

// out += a^T * b, a is k x m, b is k x n.
void gemm_tn_acc(const double* a, const double* b, double* out, std::size_t k,
                 std::size_t m, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* orow = out + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

// out += a * b^T, a is m x k, b is n x k. b is transposed once so the inner
// loop streams rows like gemm_acc instead of reducing dot products.
void gemm_nt_acc(const double* a, const double* b, double* out, std::size_t m,
                 std::size_t k, std::size_t n) {
  std::vector<double> bt(k * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * k + p];
  gemm_acc(a, bt.data(), out, m, k, n);
}

template <typename Forward, typename Derivative>
Var unary(const Var& x, Forward f, Derivative df) {
  const Tensor& in = x.value();
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return x.tape().record(std::move(out), {x}, [x, df](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    const Tensor& g = tape.upstream(self);
    const Tensor& in = x.value();
    const Tensor& out = tape.value(self);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * df(in[i], out[i]);
  });
}

void require_same_shape(const std::string& op, const Var& a, const Var& b) {
  if (a.shape() != b.shape()) shape_error(op, a.shape(), b.shape());
}

}  // namespace

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Var matmul(const Var& a, const Var& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.value().rows();
  const std::size_t k = a.value().cols();
  const std::size_t n = b.value().cols();
  if (b.value().rows() != k) shape_error("matmul", a.shape(), b.shape());
  Tensor out(Shape{m, n});
  gemm_acc(a.value().data(), b.value().data(), out.data(), m, k, n);
  return a.tape().record(std::move(out), {a, b},
                         [a, b, m, k, n](Tape& tape, std::size_t self) {
                           const Tensor& g = tape.upstream(self);
                           if (Tensor* ga = grad_of(tape, a)) {
                             gemm_nt_acc(g.data(), b.value().data(), ga->data(), m, n, k);
                           }
                           if (Tensor* gb = grad_of(tape, b)) {
                             gemm_tn_acc(a.value().data(), g.data(), gb->data(), m, k, n);
                           }
                         });
}

Var spmm(std::shared_ptr<const SparseMatrix> op, const Var& x) {
  require_rank("spmm", x, 2);
  if (!op) throw std::invalid_argument("spmm: null operator");
  Tensor out = op->multiply(x.value());
  return x.tape().record(std::move(out), {x}, [op, x](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    // gx += op^T * g, scattered row by row.
    const Tensor& g = tape.upstream(self);
    const std::size_t width = g.cols();
    const auto& offsets = op->row_offsets();
    const auto& cols = op->col_indices();
    const auto& vals = op->values();
    for (std::size_t r = 0; r < op->rows(); ++r) {
      const double* src = g.data() + r * width;
      for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
        double* dst = gx->data() + cols[p] * width;
        const double w = vals[p];
        for (std::size_t j = 0; j < width; ++j) dst[j] += w * src[j];
      }
    }
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape("add", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& tape, std::size_t self) {
    const Tensor& g = tape.upstream(self);
    for (const Var* p : {&a, &b}) {
      if (Tensor* gp = grad_of(tape, *p)) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gp)[i] += g[i];
      }
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape("sub", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& tape, std::size_t self) {
    const Tensor& g = tape.upstream(self);
    if (Tensor* ga = grad_of(tape, a)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    }
    if (Tensor* gb = grad_of(tape, b)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape("mul", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& tape, std::size_t self) {
    const Tensor& g = tape.upstream(self);
    if (Tensor* ga = grad_of(tape, a)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * b.value()[i];
    }
    if (Tensor* gb = grad_of(tape, b)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * a.value()[i];
    }
  });
}

Var scale(const Var& a, double factor) {
  return unary(
      a, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Var add_scalar(const Var& a, double offset) {
  return unary(
      a, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Var add_row(const Var& a, const Var& row) {
  require_rank("add_row", a, 2);
  const std::size_t m = a.value().rows();
  const std::size_t n = a.value().cols();
  if (row.value().size() != n || row.value().rank() > 2 ||
      (row.value().rank() == 2 && row.value().rows() != 1)) {
    shape_error("add_row", a.shape(), row.shape());
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) += row.value()[j];
  }
  return a.tape().record(std::move(out), {a, row},
                         [a, row, m, n](Tape& tape, std::size_t self) {
                           const Tensor& g = tape.upstream(self);
                           if (Tensor* ga = grad_of(tape, a)) {
                             for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
                           }
                           if (Tensor* gr = grad_of(tape, row)) {
                             for (std::size_t i = 0; i < m; ++i) {
                               for (std::size_t j = 0; j < n; ++j) (*gr)[j] += g(i, j);
                             }
                           }
                         });
}

Var relu(const Var& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(const Var& x) {
  return unary(
      x, [](double v) { return sigmoid(v); },
      [](double, double out) { return out * (1.0 - out); });
}

Var softplus(const Var& x) {
  return unary(
      x, [](double v) { return softplus(v); },
      [](double in, double) { return sigmoid(in); });
}

Var log_sigmoid(const Var& x) {
  return unary(
      x, [](double v) { return -softplus(-v); },
      [](double in, double) { return sigmoid(-in); });
}

Var log(const Var& x) {
  for (double v : x.value().values()) {
    if (!(v > 0.0)) throw std::domain_error("log of non-positive value");
  }
  return unary(
      x, [](double v) { return std::log(v); }, [](double in, double) { return 1.0 / in; });
}

Var exp(const Var& x) {
  return unary(
      x, [](double v) { return std::exp(v); }, [](double, double out) { return out; });
}

Var softmax(const Var& x) {
  require_rank("softmax", x, 1);
  const Tensor& in = x.value();
  if (in.size() == 0) throw std::invalid_argument("softmax of empty vector");
  const double peak = *std::max_element(in.values().begin(), in.values().end());
  Tensor out(in.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - peak);
    total += out[i];
  }
  for (std::size_t i = 0; i < in.size(); ++i) out[i] /= total;
  return x.tape().record(std::move(out), {x}, [x](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    const Tensor& g = tape.upstream(self);
    const Tensor& p = tape.value(self);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * p[i];
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += p[i] * (g[i] - dot);
  });
}

Var log_softmax(const Var& x) {
  require_rank("log_softmax", x, 1);
  const Tensor& in = x.value();
  if (in.size() == 0) throw std::invalid_argument("log_softmax of empty vector");
  const double peak = *std::max_element(in.values().begin(), in.values().end());
  double total = 0.0;
  for (double v : in.values()) total += std::exp(v - peak);
  const double log_norm = peak + std::log(total);
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - log_norm;
  return x.tape().record(std::move(out), {x}, [x](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    const Tensor& g = tape.upstream(self);
    const Tensor& lp = tape.value(self);
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) total += g[i];
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] - std::exp(lp[i]) * total;
  });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return x.tape().record(Tensor::scalar(total), {x}, [x](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    const double g = tape.upstream(self).item();
    for (double& v : gx->values()) v += g;
  });
}

Var mean(const Var& x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw std::invalid_argument("mean of empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var mean_rows(const Var& x) {
  require_rank("mean_rows", x, 2);
  const std::size_t m = x.value().rows();
  const std::size_t n = x.value().cols();
  if (m == 0) throw std::invalid_argument("mean_rows of zero-row tensor");
  Tensor out(Shape{1, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += x.value()(i, j);
  }
  const double inv = 1.0 / static_cast<double>(m);
  for (double& v : out.values()) v *= inv;
  return x.tape().record(std::move(out), {x}, [x, m, n, inv](Tape& tape, std::size_t self) {
    Tensor* gx = grad_of(tape, x);
    if (!gx) return;
    const Tensor& g = tape.upstream(self);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) (*gx)(i, j) += g[j] * inv;
    }
  });
}

Var element(const Var& x, std::size_t index) {
  if (index >= x.value().size()) {
    throw std::out_of_range("element index " + std::to_string(index) +
                            " out of range for shape " + shape_string(x.shape()));
  }
  return x.tape().record(Tensor::scalar(x.value()[index]), {x},
                         [x, index](Tape& tape, std::size_t self) {
                           if (Tensor* gx = grad_of(tape, x)) {
                             (*gx)[index] += tape.upstream(self).item();
                           }
                         });
}

Var stack_scalars(std::span<const Var> scalars) {
  if (scalars.empty()) throw std::invalid_argument("stack_scalars of nothing");
  Tape& tape = scalars.front().tape();
  std::vector<double> values;
  values.reserve(scalars.size());
  for (const auto& s : scalars) values.push_back(s.value().item());
  std::vector<Var> parents(scalars.begin(), scalars.end());
  return tape.record(Tensor::vector(std::move(values)), parents,
                     [parents](Tape& tape, std::size_t self) {
                       const Tensor& g = tape.upstream(self);
                       for (std::size_t i = 0; i < parents.size(); ++i) {
                         if (Tensor* gp = grad_of(tape, parents[i])) (*gp)[0] += g[i];
                       }
                     });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols of nothing");
  const std::size_t m = parts.front().value().rows();
  std::size_t width = 0;
  for (const auto& p : parts) {
    require_rank("concat_cols", p, 2);
    if (p.value().rows() != m) shape_error("concat_cols", parts.front().shape(), p.shape());
    width += p.value().cols();
  }
  Tensor out(Shape{m, width});
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.value().cols();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(p.value().data() + i * w, w, out.data() + i * width + offset);
    }
    offset += w;
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return parts.front().tape().record(
      std::move(out), parents, [parents, m, width](Tape& tape, std::size_t self) {
        const Tensor& g = tape.upstream(self);
        std::size_t offset = 0;
        for (const auto& p : parents) {
          const std::size_t w = p.value().cols();
          if (Tensor* gp = grad_of(tape, p)) {
            for (std::size_t i = 0; i < m; ++i) {
              const double* src = g.data() + i * width + offset;
              double* dst = gp->data() + i * w;
              for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
            }
          }
          offset += w;
        }
      });
}

Var gather_rows(const Var& x, std::span<const std::optional<std::size_t>> indices) {
  require_rank("gather_rows", x, 2);
  const std::size_t n = x.value().rows();
  const std::size_t width = x.value().cols();
  std::vector<std::optional<std::size_t>> idx(indices.begin(), indices.end());
  Tensor out(Shape{idx.size(), width});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (!idx[r]) continue;
    if (*idx[r] >= n) throw std::out_of_range("gather_rows index out of range");
    std::copy_n(x.value().data() + *idx[r] * width, width, out.data() + r * width);
  }
  return x.tape().record(std::move(out), {x},
                         [x, idx = std::move(idx), width](Tape& tape, std::size_t self) {
                           Tensor* gx = grad_of(tape, x);
                           if (!gx) return;
                           const Tensor& g = tape.upstream(self);
                           for (std::size_t r = 0; r < idx.size(); ++r) {
                             if (!idx[r]) continue;
                             const double* src = g.data() + r * width;
                             double* dst = gx->data() + *idx[r] * width;
                             for (std::size_t j = 0; j < width; ++j) dst[j] += src[j];
                           }
                         });
}

Var reshape(const Var& x, Shape shape) {
  if (shape_size(shape) != x.value().size()) shape_error("reshape", x.shape(), shape);
  return x.tape().record(x.value().reshaped(std::move(shape)), {x},
                         [x](Tape& tape, std::size_t self) {
                           Tensor* gx = grad_of(tape, x);
                           if (!gx) return;
                           const Tensor& g = tape.upstream(self);
                           for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
                         });
}

Var conv1d(const Var& input, const Var& kernels, std::size_t stride) {
  require_rank("conv1d", input, 2);
  require_rank("conv1d", kernels, 3);
  if (stride == 0) throw std::invalid_argument("conv1d: stride must be positive");
  const std::size_t len = input.value().rows();
  const std::size_t cin = input.value().cols();
  const std::size_t ksize = kernels.value().dim(0);
  const std::size_t cout = kernels.value().dim(2);
  if (kernels.value().dim(1) != cin) shape_error("conv1d", input.shape(), kernels.shape());
  if (ksize == 0 || len < ksize) {
    throw std::invalid_argument("conv1d: kernel length " + std::to_string(ksize) +
                                " exceeds input length " + std::to_string(len));
  }
  const std::size_t out_len = (len - ksize) / stride + 1;
  // A window of ksize consecutive rows is contiguous in row-major input, so
  // each output row is a (1 x ksize*cin) * (ksize*cin x cout) product.
  const std::size_t span = ksize * cin;
  Tensor out(Shape{out_len, cout});
  for (std::size_t t = 0; t < out_len; ++t) {
    gemm_acc(input.value().data() + t * stride * cin, kernels.value().data(),
             out.data() + t * cout, 1, span, cout);
  }
  return input.tape().record(
      std::move(out), {input, kernels},
      [input, kernels, stride, cin, cout, span, out_len](Tape& tape, std::size_t self) {
        const Tensor& g = tape.upstream(self);
        if (Tensor* gi = grad_of(tape, input)) {
          const double* kv = kernels.value().data();
          for (std::size_t t = 0; t < out_len; ++t) {
            const double* grow = g.data() + t * cout;
            double* irow = gi->data() + t * stride * cin;
            for (std::size_t p = 0; p < span; ++p) {
              double acc = 0.0;
              for (std::size_t j = 0; j < cout; ++j) acc += grow[j] * kv[p * cout + j];
              irow[p] += acc;
            }
          }
        }
        if (Tensor* gk = grad_of(tape, kernels)) {
          for (std::size_t t = 0; t < out_len; ++t) {
            gemm_tn_acc(input.value().data() + t * stride * cin, g.data() + t * cout,
                        gk->data(), 1, span, cout);
          }
        }
      });
}

Var dropout(const Var& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1), got " +
                                std::to_string(rate));
  }
  if (mode == Mode::kEval || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(x.shape());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mul(x, x.tape().constant(std::move(mask)));
}

}  // namespace snapgan::ad
