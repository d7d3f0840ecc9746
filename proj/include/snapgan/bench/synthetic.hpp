#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

#include "snapgan/graph/graph.hpp"

namespace snapgan::bench {

// Planted-partition graph with Gaussian community attributes: vertices are
// split into equal communities, intra-community pairs connect with
// probability p_in, and each vertex draws Poisson(inter_edges_per_vertex)
// extra edges to uniformly random vertices elsewhere. Attribute rows are a
// per-community center (N(0, center_scale^2) per dimension) plus
// N(0, noise^2) noise.
struct SyntheticGraphSpec {
  std::size_t communities = 125;
  std::size_t community_size = 16;
  double p_in = 0.5;
  double inter_edges_per_vertex = 0.5;
  std::size_t attribute_dim = 8;
  double center_scale = 1.0;
  double noise = 0.3;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const SyntheticGraphSpec&, const SyntheticGraphSpec&) = default;
};

nlohmann::json to_json(const SyntheticGraphSpec& spec);
SyntheticGraphSpec synthetic_spec_from_json(const nlohmann::json& j);

graph::Graph community_graph(const SyntheticGraphSpec& spec);

// `copies` vertex-disjoint copies of g (ids offset by copy * n).
graph::Graph disjoint_union(const graph::Graph& g, std::size_t copies);

}  // namespace snapgan::bench
