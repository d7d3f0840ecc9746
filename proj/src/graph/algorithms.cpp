#include "snapgan/graph/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace snapgan::graph {
namespace {

using ad::SparseMatrix;

// Builds D^-1/2 (S + I) D^-1/2 where S = A + A^T for directed edges and the
// symmetric weighted adjacency otherwise.
SparseMatrix normalize(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& ends,
                       const std::vector<double>& weights, bool directed) {
  std::vector<SparseMatrix::Entry> entries;
  entries.reserve(2 * ends.size() + n);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const auto [u, v] = ends[i];
    const double w = weights[i];
    if (u == v) {
      entries.push_back({u, u, directed ? 2.0 * w : w});
    } else {
      entries.push_back({u, v, w});
      entries.push_back({v, u, w});
    }
  }
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  SparseMatrix hat = SparseMatrix::from_entries(n, n, std::move(entries));

  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double degree = 0.0;
    for (std::size_t p = hat.row_offsets()[r]; p < hat.row_offsets()[r + 1]; ++p) {
      degree += hat.values()[p];
    }
    inv_sqrt[r] = 1.0 / std::sqrt(degree);
  }
  std::vector<SparseMatrix::Entry> scaled;
  scaled.reserve(hat.nonzeros());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = hat.row_offsets()[r]; p < hat.row_offsets()[r + 1]; ++p) {
      const std::size_t c = hat.col_indices()[p];
      scaled.push_back({r, c, hat.values()[p] * (inv_sqrt[r] * inv_sqrt[c])});
    }
  }
  return SparseMatrix::from_entries(n, n, std::move(scaled));
}

}  // namespace

ad::SparseMatrix normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.vertex_count();
  if (n == 0) throw std::invalid_argument("normalized_adjacency of an empty graph");
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  std::vector<double> weights;
  for (const Edge& e : graph.edges()) {
    ends.emplace_back(e.src, e.dst);
    weights.push_back(e.weight);
  }
  return normalize(n, ends, weights, graph.directed());
}

ad::SparseMatrix normalized_adjacency(const Snapshot& snapshot) {
  const std::size_t n = snapshot.vertices.size();
  if (n == 0) throw std::invalid_argument("normalized_adjacency of an empty snapshot");
  std::unordered_map<VertexId, std::size_t> local;
  for (std::size_t i = 0; i < n; ++i) local.emplace(snapshot.vertices[i], i);
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  std::vector<double> weights;
  for (const Edge& e : snapshot.edges) {
    const auto s = local.find(e.src);
    const auto d = local.find(e.dst);
    if (s == local.end() || d == local.end()) {
      throw std::invalid_argument("snapshot edge endpoint outside its vertex set");
    }
    ends.emplace_back(s->second, d->second);
    weights.push_back(e.weight);
  }
  return normalize(n, ends, weights, snapshot.directed);
}

Snapshot ego_network(const Graph& graph, VertexId center, std::size_t radius, SnapshotId id) {
  if (center >= graph.vertex_count()) {
    throw std::invalid_argument("ego center " + std::to_string(center) + " outside graph");
  }
  std::vector<std::size_t> depth(graph.vertex_count(), SIZE_MAX);
  std::vector<VertexId> order{center};
  std::deque<VertexId> frontier{center};
  depth[center] = 0;
  while (!frontier.empty()) {
    const VertexId v = frontier.front();
    frontier.pop_front();
    if (depth[v] == radius) continue;
    for (VertexId u : graph.neighbors(v)) {
      if (depth[u] != SIZE_MAX) continue;
      depth[u] = depth[v] + 1;
      order.push_back(u);
      frontier.push_back(u);
    }
  }
  return induced_snapshot(graph, id, std::move(order));
}

double conductance(const Graph& graph, std::span<const VertexId> subset) {
  const std::size_t n = graph.vertex_count();
  std::vector<bool> in(n, false);
  std::size_t members = 0;
  for (VertexId v : subset) {
    if (v >= n) throw std::invalid_argument("conductance: vertex outside graph");
    if (!in[v]) ++members;
    in[v] = true;
  }
  if (members == 0 || members == n) {
    throw std::invalid_argument("conductance: degenerate cut (subset is empty or all vertices)");
  }
  double cut = 0.0;
  for (const Edge& e : graph.edges()) {
    if (in[e.src] != in[e.dst]) cut += e.weight;
  }
  if (cut == 0.0) return 0.0;
  double vol_in = 0.0, vol_out = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    (in[v] ? vol_in : vol_out) += graph.volume(static_cast<VertexId>(v));
  }
  return cut / std::min(vol_in, vol_out);
}

std::vector<Snapshot> aggregate_snapshots(const Graph& graph, std::int64_t window_seconds) {
  if (window_seconds <= 0) throw std::invalid_argument("window length must be positive");
  std::map<std::int64_t, std::vector<Edge>> windows;
  for (const Edge& e : graph.records()) {
    if (!e.timestamp) {
      throw std::invalid_argument("time-window aggregation needs timestamps on every edge");
    }
    // Floor division so negative timestamps land in the right window.
    std::int64_t k = *e.timestamp / window_seconds;
    if (*e.timestamp % window_seconds < 0) --k;
    windows[k].push_back(e);
  }
  std::vector<Snapshot> snapshots;
  snapshots.reserve(windows.size());
  for (auto& [k, edges] : windows) {
    std::vector<VertexId> vertices;
    for (const Edge& e : edges) {
      vertices.push_back(e.src);
      vertices.push_back(e.dst);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    Snapshot s;
    s.id = snapshots.size();
    s.directed = graph.directed();
    s.window = TimeWindow{k * window_seconds, (k + 1) * window_seconds};
    s.attributes = ad::Tensor(ad::Shape{vertices.size(), graph.attribute_dim()});
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto row = graph.attributes().row(vertices[i]);
      std::copy(row.begin(), row.end(), s.attributes.row(i).begin());
    }
    s.vertices = std::move(vertices);
    s.edges = std::move(edges);
    snapshots.push_back(std::move(s));
  }
  return snapshots;
}

std::vector<std::size_t> snapshot_out_degrees(const Snapshot& snapshot) {
  std::unordered_map<VertexId, std::size_t> local;
  for (std::size_t i = 0; i < snapshot.vertices.size(); ++i) local.emplace(snapshot.vertices[i], i);
  // Distinct neighbour pairs; repeated records between the same pair count once.
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (const Edge& e : snapshot.edges) {
    const std::size_t s = local.at(e.src), d = local.at(e.dst);
    arcs.emplace_back(s, d);
    if (!snapshot.directed && s != d) arcs.emplace_back(d, s);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  std::vector<std::size_t> degree(snapshot.vertices.size(), 0);
  for (const auto& [s, d] : arcs) ++degree[s];
  return degree;
}

}  // namespace snapgan::graph
