#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"

namespace snapgan::ad {

// Compressed sparse row matrix used for graph propagation operators.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;

  // Duplicate coordinates are summed; explicit zeros are kept.
  static SparseMatrix from_entries(std::size_t rows, std::size_t cols,
                                   std::vector<Entry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  double at(std::size_t r, std::size_t c) const;
  SparseMatrix transposed() const;
  Tensor to_dense() const;

  // this * dense, dense must be rank 2 with rows() == cols().
  Tensor multiply(const Tensor& dense) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

}  // namespace snapgan::ad
