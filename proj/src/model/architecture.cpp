#include "snapgan/model/architecture.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace snapgan::model {
namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw std::invalid_argument("architecture: " + what);
}

void glorot(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

}  // namespace

void ArchitectureConfig::validate() const {
  if (gcn_channels.empty()) invalid("at least one GCN layer is required");
  for (std::size_t c : gcn_channels) {
    if (c == 0) invalid("GCN channel counts must be >= 1");
  }
  if (!(degpool_k_fraction > 0.0 && degpool_k_fraction <= 1.0)) {
    invalid("degpool_k_fraction must lie in (0, 1]");
  }
  if (conv1d_channels.size() != conv1d_kernel_sizes.size()) {
    invalid("conv1d_channels and conv1d_kernel_sizes differ in length");
  }
  for (std::size_t i = 0; i < conv1d_channels.size(); ++i) {
    if (conv1d_channels[i] == 0 || conv1d_kernel_sizes[i] == 0) {
      invalid("conv1d channels and kernel sizes must be >= 1");
    }
  }
  if (conv1d_stride == 0) invalid("conv1d_stride must be >= 1");
  if (dense_width == 0) invalid("dense_width must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) invalid("dropout_rate must lie in [0, 1)");
  if (fixed_k && *fixed_k < min_pool_rows()) {
    invalid("fixed_k " + std::to_string(*fixed_k) + " is shorter than the conv stack needs (" +
            std::to_string(min_pool_rows()) + ")");
  }
}

std::size_t ArchitectureConfig::concat_channels() const {
  return std::accumulate(gcn_channels.begin(), gcn_channels.end(), std::size_t{0});
}

std::size_t ArchitectureConfig::min_pool_rows() const {
  std::size_t need = 1;
  for (std::size_t i = conv1d_kernel_sizes.size(); i-- > 0;) {
    need = (need - 1) * conv1d_stride + conv1d_kernel_sizes[i];
  }
  return need;
}

std::size_t ArchitectureConfig::pool_rows(std::size_t n_t) const {
  if (fixed_k) return *fixed_k;
  // The epsilon keeps e.g. 0.7 * 10 = 7.000000000000001 from rounding up to 8.
  const auto k = static_cast<std::size_t>(
      std::ceil(degpool_k_fraction * static_cast<double>(n_t) - 1e-9));
  return std::max({k, std::size_t{1}, min_pool_rows()});
}

std::size_t ArchitectureConfig::conv_output_rows(std::size_t rows) const {
  for (std::size_t ks : conv1d_kernel_sizes) {
    if (rows < ks) invalid("pooled length shorter than a conv kernel");
    rows = (rows - ks) / conv1d_stride + 1;
  }
  return rows;
}

std::size_t ArchitectureConfig::dense_input_dim() const {
  const std::size_t width = conv1d_channels.empty() ? concat_channels() : conv1d_channels.back();
  if (fixed_k) return conv_output_rows(*fixed_k) * width;
  return width;
}

std::string to_string(Head head) {
  return head == Head::kGenerator ? "generator" : "discriminator";
}

Head head_from_string(const std::string& name) {
  if (name == "generator") return Head::kGenerator;
  if (name == "discriminator") return Head::kDiscriminator;
  throw std::invalid_argument("unknown head kind '" + name + "'");
}

ModelParams ModelParams::zeros(const ArchitectureConfig& arch, std::size_t input_dim, Head head) {
  arch.validate();
  if (input_dim == 0) throw std::invalid_argument("attribute dimension must be >= 1");
  ModelParams p;
  p.head = head;
  p.arch = arch;
  p.input_dim = input_dim;
  std::size_t in = input_dim;
  for (std::size_t c : arch.gcn_channels) {
    p.gcn_weights.emplace_back(ad::Shape{in, c});
    in = c;
  }
  in = arch.concat_channels();
  for (std::size_t i = 0; i < arch.conv1d_channels.size(); ++i) {
    const std::size_t out = arch.conv1d_channels[i];
    p.conv_kernels.emplace_back(ad::Shape{arch.conv1d_kernel_sizes[i], in, out});
    p.conv_biases.emplace_back(ad::Shape{out});
    in = out;
  }
  p.dense_weight = Tensor(ad::Shape{arch.dense_input_dim(), arch.dense_width});
  p.dense_bias = Tensor(ad::Shape{arch.dense_width});
  p.out_weight = Tensor(ad::Shape{arch.dense_width, 1});
  p.out_bias = Tensor(ad::Shape{1});
  return p;
}

ModelParams ModelParams::initialize(const ArchitectureConfig& arch, std::size_t input_dim,
                                    Head head, Rng& rng) {
  ModelParams p = zeros(arch, input_dim, head);
  for (auto& w : p.gcn_weights) glorot(w, w.dim(0), w.dim(1), rng);
  for (auto& k : p.conv_kernels) glorot(k, k.dim(0) * k.dim(1), k.dim(0) * k.dim(2), rng);
  glorot(p.dense_weight, p.dense_weight.dim(0), p.dense_weight.dim(1), rng);
  glorot(p.out_weight, p.out_weight.dim(0), p.out_weight.dim(1), rng);
  return p;
}

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out;
  for (auto& w : gcn_weights) out.push_back(&w);
  for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
    out.push_back(&conv_kernels[i]);
    out.push_back(&conv_biases[i]);
  }
  out.insert(out.end(), {&dense_weight, &dense_bias, &out_weight, &out_bias});
  return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
  std::vector<const Tensor*> out;
  for (Tensor* t : const_cast<ModelParams*>(this)->tensors()) out.push_back(t);
  return out;
}

std::vector<std::string> ModelParams::tensor_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < gcn_weights.size(); ++i) names.push_back("gcn." + std::to_string(i) + ".weight");
  for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
    names.push_back("conv1d." + std::to_string(i) + ".kernel");
    names.push_back("conv1d." + std::to_string(i) + ".bias");
  }
  names.insert(names.end(), {"dense.weight", "dense.bias", "out.weight", "out.bias"});
  return names;
}

void ModelParams::validate() const {
  const ModelParams expected = zeros(arch, input_dim, head);
  const auto want = expected.tensors();
  const auto have = tensors();
  const auto names = tensor_names();
  if (want.size() != have.size()) {
    throw std::invalid_argument("parameter count does not match the architecture");
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i]->shape() != have[i]->shape()) {
      throw std::invalid_argument("parameter " + names[i] + " has shape " +
                                  ad::shape_string(have[i]->shape()) + ", expected " +
                                  ad::shape_string(want[i]->shape()));
    }
  }
}

bool ModelParams::all_finite() const {
  for (const Tensor* t : tensors()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const Tensor* t : tensors()) total += t->size();
  return total;
}

}  // namespace snapgan::model
