#include "snapgan/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snapgan::graph {
namespace {

std::pair<VertexId, VertexId> pair_key(const Edge& e, bool directed) {
  if (directed || e.src <= e.dst) return {e.src, e.dst};
  return {e.dst, e.src};
}

}  // namespace

Graph Graph::build(std::vector<Edge> records, Tensor attributes, bool directed) {
  if (attributes.rank() != 2) {
    throw std::invalid_argument("attribute table must be a matrix, got shape " +
                                ad::shape_string(attributes.shape()));
  }
  const std::size_t n = attributes.rows();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Edge& e = records[i];
    if (e.src >= n || e.dst >= n) {
      throw std::invalid_argument("edge " + std::to_string(i) + " (" + std::to_string(e.src) +
                                  ", " + std::to_string(e.dst) + ") references a vertex >= " +
                                  std::to_string(n));
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " has a negative or non-finite weight");
    }
  }
  Graph g;
  g.directed_ = directed;
  g.records_ = std::move(records);
  g.attributes_ = std::move(attributes);
  g.index();
  return g;
}

void Graph::index() {
  const std::size_t n = vertex_count();

  std::vector<Edge> sorted;
  sorted.reserve(records_.size());
  for (const Edge& e : records_) {
    Edge k = e;
    std::tie(k.src, k.dst) = pair_key(e, directed_);
    sorted.push_back(k);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  edges_.clear();
  for (const Edge& e : sorted) {
    if (!edges_.empty() && edges_.back().src == e.src && edges_.back().dst == e.dst) {
      Edge& acc = edges_.back();
      acc.weight += e.weight;
      if (acc.timestamp && e.timestamp) {
        acc.timestamp = std::min(*acc.timestamp, *e.timestamp);
      } else {
        acc.timestamp.reset();
      }
      continue;
    }
    edges_.push_back(e);
  }

  std::vector<std::vector<VertexId>> adj(n);
  out_degree_.assign(n, 0);
  volume_.assign(n, 0.0);
  for (const Edge& e : edges_) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
    volume_[e.src] += e.weight;
    volume_[e.dst] += e.weight;
    ++out_degree_[e.src];
    if (!directed_ && e.src != e.dst) ++out_degree_[e.dst];
  }
  neighbor_offsets_.assign(1, 0);
  neighbor_ids_.clear();
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    neighbor_ids_.insert(neighbor_ids_.end(), list.begin(), list.end());
    neighbor_offsets_.push_back(neighbor_ids_.size());
  }
}

bool Graph::has_timestamps() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const Edge& e) { return e.timestamp.has_value(); });
}

std::span<const VertexId> Graph::neighbors(VertexId v) const {
  if (v >= vertex_count()) throw std::out_of_range("vertex id out of range");
  return std::span<const VertexId>(neighbor_ids_)
      .subspan(neighbor_offsets_[v], neighbor_offsets_[v + 1] - neighbor_offsets_[v]);
}

std::optional<double> Graph::edge_weight(VertexId src, VertexId dst) const {
  Edge probe{src, dst};
  const auto key = pair_key(probe, directed_);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                                   [](const Edge& e, const std::pair<VertexId, VertexId>& k) {
                                     return e.src != k.first ? e.src < k.first : e.dst < k.second;
                                   });
  if (it == edges_.end() || it->src != key.first || it->dst != key.second) return std::nullopt;
  return it->weight;
}

Graph Graph::with_added_edges(std::span<const Edge> extra) const {
  std::vector<Edge> records = records_;
  records.insert(records.end(), extra.begin(), extra.end());
  return build(std::move(records), attributes_, directed_);
}

Graph Graph::with_attributes(Tensor attributes) const {
  if (attributes.shape() != attributes_.shape()) {
    throw std::invalid_argument("replacement attributes change the table shape");
  }
  Graph g = *this;
  g.attributes_ = std::move(attributes);
  return g;
}

}  // namespace snapgan::graph
