#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "snapgan/autodiff/tensor.hpp"

namespace snapgan::graph {

using VertexId = std::uint32_t;
using ad::Tensor;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  double weight = 1.0;
  std::optional<std::int64_t> timestamp;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Attributed graph G = {V, E, X}. Immutable once built.
//
// Two edge views are kept: the raw records exactly as supplied (used for
// time-window aggregation) and the deduplicated edge set whose weights
// accumulate repeated (src, dst) pairs (used for adjacency). For undirected
// graphs (u, v) and (v, u) are the same pair and stored with src <= dst.
class Graph {
 public:
  Graph() = default;

  // Throws std::invalid_argument on an endpoint outside the attribute table,
  // a negative or non-finite weight, or an attribute table that is not rank 2.
  static Graph build(std::vector<Edge> records, Tensor attributes, bool directed);

  std::size_t vertex_count() const { return attributes_.rows(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t attribute_dim() const { return attributes_.cols(); }
  bool directed() const { return directed_; }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> records() const { return records_; }
  const Tensor& attributes() const { return attributes_; }
  bool has_timestamps() const;

  // Sorted, duplicate-free neighbours ignoring direction.
  std::span<const VertexId> neighbors(VertexId v) const;
  // Number of distinct out-neighbours (all neighbours when undirected).
  std::size_t out_degree(VertexId v) const { return out_degree_.at(v); }
  // Sum of incident edge weights ignoring direction; self-loops count twice.
  double volume(VertexId v) const { return volume_.at(v); }
  // Accumulated weight of the deduplicated edge (src, dst), if present.
  std::optional<double> edge_weight(VertexId src, VertexId dst) const;

  // New graph with extra edge records appended (weights accumulate).
  Graph with_added_edges(std::span<const Edge> extra) const;
  // New graph with the attribute table replaced (same shape required).
  Graph with_attributes(Tensor attributes) const;

 private:
  void index();

  bool directed_ = false;
  std::vector<Edge> records_;
  std::vector<Edge> edges_;
  Tensor attributes_{ad::Shape{0, 0}};
  std::vector<std::size_t> neighbor_offsets_{0};
  std::vector<VertexId> neighbor_ids_;
  std::vector<std::size_t> out_degree_;
  std::vector<double> volume_;
};

}  // namespace snapgan::graph
