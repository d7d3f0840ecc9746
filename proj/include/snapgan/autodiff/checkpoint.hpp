#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"

namespace snapgan::ad {

// Binary container of named tensors. Layout (all integers little-endian):
//
//   magic     8 bytes  "SNPGTENS"
//   version   u32      currently 1
//   count     u32      number of tensors
//   per tensor:
//     name_len u32, name bytes (UTF-8, no terminator)
//     rank     u32, dims u64[rank]
//     data     f64[product(dims)] little-endian IEEE-754
//
// Readers reject unknown versions, truncated input and trailing bytes.
struct NamedTensor {
  std::string name;
  Tensor tensor;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(std::istream& in);

void save_tensors(const std::filesystem::path& path,
                  const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_tensors(const std::filesystem::path& path);

}  // namespace snapgan::ad
