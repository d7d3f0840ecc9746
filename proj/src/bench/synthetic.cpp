#include "snapgan/bench/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "snapgan/common/errors.hpp"
#include "snapgan/common/rng.hpp"

namespace snapgan::bench {
namespace {

using graph::Edge;
using graph::VertexId;

// Knuth's multiplication method; fine for the small means used here.
std::size_t poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  std::size_t k = 0;
  for (double p = rng.uniform(); p > limit; p *= rng.uniform()) ++k;
  return k;
}

}  // namespace

void SyntheticGraphSpec::validate() const {
  if (communities < 1 || community_size < 1) {
    throw std::invalid_argument("need at least one community of at least one vertex");
  }
  if (!(p_in >= 0 && p_in <= 1)) throw std::invalid_argument("p_in must lie in [0, 1]");
  if (!(inter_edges_per_vertex >= 0) || inter_edges_per_vertex > 50) {
    throw std::invalid_argument("inter_edges_per_vertex must lie in [0, 50]");
  }
  if (attribute_dim < 1) throw std::invalid_argument("attribute_dim must be positive");
  if (!(center_scale >= 0) || !(noise >= 0)) {
    throw std::invalid_argument("attribute scales must be nonnegative");
  }
}

nlohmann::json to_json(const SyntheticGraphSpec& s) {
  return {{"communities", s.communities},       {"community_size", s.community_size},
          {"p_in", s.p_in},                     {"inter_edges_per_vertex", s.inter_edges_per_vertex},
          {"attribute_dim", s.attribute_dim},   {"center_scale", s.center_scale},
          {"noise", s.noise},                   {"seed", s.seed}};
}

SyntheticGraphSpec synthetic_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("synthetic spec must be an object");
  const nlohmann::json defaults = to_json(SyntheticGraphSpec{});
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw DataError("unknown synthetic key '" + key + "'");
  }
  SyntheticGraphSpec s;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("communities", s.communities);
    get("community_size", s.community_size);
    get("p_in", s.p_in);
    get("inter_edges_per_vertex", s.inter_edges_per_vertex);
    get("attribute_dim", s.attribute_dim);
    get("center_scale", s.center_scale);
    get("noise", s.noise);
    get("seed", s.seed);
    s.validate();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("synthetic spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

graph::Graph community_graph(const SyntheticGraphSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.communities * spec.community_size;
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < spec.communities; ++c) {
    const std::size_t base = c * spec.community_size;
    for (std::size_t a = 0; a < spec.community_size; ++a)
      for (std::size_t b = a + 1; b < spec.community_size; ++b)
        if (rng.bernoulli(spec.p_in)) {
          edges.push_back({static_cast<VertexId>(base + a), static_cast<VertexId>(base + b)});
        }
  }
  if (spec.communities > 1) {
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t count = poisson(rng, spec.inter_edges_per_vertex);
      for (std::size_t e = 0; e < count; ++e) {
        std::size_t u = rng.uniform_index(n - spec.community_size);
        // Skip over v's own community.
        if (u >= (v / spec.community_size) * spec.community_size) u += spec.community_size;
        edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(u)});
      }
    }
  }

  ad::Tensor attrs(ad::Shape{n, spec.attribute_dim});
  for (std::size_t c = 0; c < spec.communities; ++c) {
    std::vector<double> center(spec.attribute_dim);
    for (double& x : center) x = spec.center_scale * rng.normal();
    for (std::size_t i = 0; i < spec.community_size; ++i) {
      auto row = attrs.row(c * spec.community_size + i);
      for (std::size_t d = 0; d < spec.attribute_dim; ++d) row[d] = center[d] + spec.noise * rng.normal();
    }
  }
  return graph::Graph::build(std::move(edges), std::move(attrs), false);
}

graph::Graph disjoint_union(const graph::Graph& g, std::size_t copies) {
  if (copies < 1) throw std::invalid_argument("need at least one copy");
  const std::size_t n = g.vertex_count(), d = g.attribute_dim();
  std::vector<Edge> records;
  ad::Tensor attrs(ad::Shape{n * copies, d});
  for (std::size_t c = 0; c < copies; ++c) {
    const auto offset = static_cast<VertexId>(c * n);
    for (Edge e : g.records()) {
      e.src += offset;
      e.dst += offset;
      records.push_back(e);
    }
    for (std::size_t v = 0; v < n; ++v) {
      const auto src = g.attributes().row(v);
      std::copy(src.begin(), src.end(), attrs.row(c * n + v).begin());
    }
  }
  return graph::Graph::build(std::move(records), std::move(attrs), g.directed());
}

}  // namespace snapgan::bench
