#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"
#include "snapgan/common/rng.hpp"

namespace snapgan::model {

using ad::Tensor;

// Layer sizes of the shared convolutional scorer:
// GCN stack -> DegPool -> 1D convs -> dense -> dropout -> scalar.
struct ArchitectureConfig {
  std::vector<std::size_t> gcn_channels{64, 64, 64, 32, 1};
  // DegPool keeps k = ceil(fraction * n_t) rows per snapshot, raised to the
  // smallest length the conv stack accepts.
  double degpool_k_fraction = 0.7;
  // When set, every snapshot is pooled to exactly this many rows and the conv
  // output is flattened into the dense layer instead of averaged.
  std::optional<std::size_t> fixed_k;
  std::vector<std::size_t> conv1d_channels{32, 16};
  std::vector<std::size_t> conv1d_kernel_sizes{2, 2};
  std::size_t conv1d_stride = 1;
  std::size_t dense_width = 32;
  double dropout_rate = 0.3;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  // Sum of GCN channel counts (width of the concatenated layer outputs).
  std::size_t concat_channels() const;
  // Shortest pooled length the conv stack can consume.
  std::size_t min_pool_rows() const;
  // Pooled row count for a snapshot with n_t vertices.
  std::size_t pool_rows(std::size_t n_t) const;
  // Output length of the conv stack for a pooled input of `rows` rows.
  std::size_t conv_output_rows(std::size_t rows) const;
  // Width of the vector fed to the dense layer.
  std::size_t dense_input_dim() const;

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

enum class Head { kGenerator, kDiscriminator };

std::string to_string(Head head);
Head head_from_string(const std::string& name);

// Parameter set theta (generator) or phi (discriminator).
struct ModelParams {
  Head head = Head::kDiscriminator;
  ArchitectureConfig arch;
  std::size_t input_dim = 0;

  std::vector<Tensor> gcn_weights;   // d_in x c_l per layer, no bias
  std::vector<Tensor> conv_kernels;  // kernel_size x c_in x c_out
  std::vector<Tensor> conv_biases;   // c_out
  Tensor dense_weight;               // dense_input_dim x dense_width
  Tensor dense_bias;                 // dense_width
  Tensor out_weight;                 // dense_width x 1
  Tensor out_bias;                   // 1

  // Glorot-uniform weights, zero biases.
  static ModelParams initialize(const ArchitectureConfig& arch, std::size_t input_dim,
                                Head head, Rng& rng);
  static ModelParams zeros(const ArchitectureConfig& arch, std::size_t input_dim, Head head);

  // Stable order shared by tensor_names(), checkpoints and optimizers.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::vector<std::string> tensor_names() const;

  // Checks that every tensor's shape follows from arch and input_dim.
  void validate() const;
  bool all_finite() const;
  std::size_t parameter_count() const;
};

}  // namespace snapgan::model
