#include "snapgan/model/layers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace snapgan::model {

ad::Var gcn_forward(const ad::Var& weight, std::shared_ptr<const ad::SparseMatrix> adjacency,
                    const ad::Var& features) {
  if (!adjacency || adjacency->rows() != adjacency->cols()) {
    throw std::invalid_argument("gcn_forward: adjacency must be square");
  }
  if (features.value().rank() != 2 || features.value().rows() != adjacency->rows()) {
    throw std::invalid_argument("gcn_forward: feature rows do not match adjacency");
  }
  // (A Z) W and A (Z W) are equal; propagate on the narrower side.
  if (weight.value().rank() == 2 && weight.value().cols() < features.value().cols()) {
    return ad::relu(ad::spmm(adjacency, ad::matmul(features, weight)));
  }
  return ad::relu(ad::matmul(ad::spmm(adjacency, features), weight));
}

std::vector<std::size_t> degpool_order(const ad::Tensor& features,
                                       std::span<const std::size_t> rows,
                                       std::span<const std::size_t> degrees,
                                       std::span<const graph::VertexId> tie_ids) {
  if (degrees.size() != rows.size() || tie_ids.size() != rows.size()) {
    throw std::invalid_argument("degpool: rows, degrees and tie ids differ in length");
  }
  const std::size_t channels = features.cols();
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (degrees[a] != degrees[b]) return degrees[a] > degrees[b];
    const auto ra = features.row(rows[a]);
    const auto rb = features.row(rows[b]);
    for (std::size_t c = channels; c-- > 0;) {
      if (ra[c] != rb[c]) return ra[c] > rb[c];
    }
    return tie_ids[a] < tie_ids[b];
  });
  return order;
}

std::vector<std::optional<std::size_t>> degpool_indices(const ad::Tensor& features,
                                                        std::span<const std::size_t> rows,
                                                        std::span<const std::size_t> degrees,
                                                        std::span<const graph::VertexId> tie_ids,
                                                        std::size_t k) {
  if (k < 1) throw std::invalid_argument("degpool: k must be >= 1");
  const auto order = degpool_order(features, rows, degrees, tie_ids);
  std::vector<std::optional<std::size_t>> indices(k);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) indices[i] = rows[order[i]];
  return indices;
}

ad::Var degpool(const ad::Var& z, std::span<const std::size_t> out_degrees, std::size_t k,
                std::span<const graph::VertexId> tie_ids) {
  if (z.value().rank() != 2) throw std::invalid_argument("degpool: expected an n x C tensor");
  const std::size_t n = z.value().rows();
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<graph::VertexId> ids;
  if (tie_ids.empty()) {
    ids.assign(rows.begin(), rows.end());
    tie_ids = ids;
  }
  if (out_degrees.size() != n || tie_ids.size() != n) {
    throw std::invalid_argument("degpool: need one degree and tie id per row");
  }
  return ad::gather_rows(z, degpool_indices(z.value(), rows, out_degrees, tie_ids, k));
}

}  // namespace snapgan::model
