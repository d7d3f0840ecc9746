#include "snapgan/autodiff/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace snapgan::ad {

SparseMatrix SparseMatrix::from_entries(std::size_t rows, std::size_t cols,
                                        std::vector<Entry> entries) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) {
      throw std::invalid_argument("sparse entry (" + std::to_string(e.row) +
                                  ", " + std::to_string(e.col) +
                                  ") outside matrix bounds");
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(rows + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!m.col_indices_.empty() && i > 0 && entries[i - 1].row == e.row &&
        entries[i - 1].col == e.col) {
      m.values_.back() += e.value;
      continue;
    }
    m.col_indices_.push_back(e.col);
    m.values_.push_back(e.value);
    ++m.row_offsets_[e.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
  return m;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r]);
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Entry> entries;
  entries.reserve(nonzeros());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      entries.push_back({col_indices_[p], r, values_[p]});
    }
  }
  return from_entries(cols_, rows_, std::move(entries));
}

Tensor SparseMatrix::to_dense() const {
  Tensor dense(Shape{rows_, cols_});
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      dense(r, col_indices_[p]) += values_[p];
    }
  }
  return dense;
}

Tensor SparseMatrix::multiply(const Tensor& dense) const {
  if (dense.rank() != 2 || dense.rows() != cols_) {
    throw std::invalid_argument("sparse multiply: operand shape " +
                                shape_string(dense.shape()) +
                                " incompatible with " + std::to_string(rows_) +
                                "x" + std::to_string(cols_));
  }
  const std::size_t width = dense.cols();
  Tensor out(Shape{rows_, width});
  for (std::size_t r = 0; r < rows_; ++r) {
    double* dst = out.data() + r * width;
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      const double w = values_[p];
      const double* src = dense.data() + col_indices_[p] * width;
      for (std::size_t j = 0; j < width; ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

}  // namespace snapgan::ad
