#include "snapgan/graph/snapshot.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace snapgan::graph {
namespace {

std::vector<bool> membership(const Graph& graph, const std::vector<VertexId>& vertices) {
  std::vector<bool> in(graph.vertex_count(), false);
  for (VertexId v : vertices) {
    if (v >= graph.vertex_count()) {
      throw std::invalid_argument("snapshot vertex " + std::to_string(v) + " outside graph");
    }
    if (in[v]) throw std::invalid_argument("duplicate snapshot vertex " + std::to_string(v));
    in[v] = true;
  }
  return in;
}

Tensor attribute_rows(const Graph& graph, const std::vector<VertexId>& vertices) {
  const std::size_t d = graph.attribute_dim();
  Tensor x(ad::Shape{vertices.size(), d});
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto src = graph.attributes().row(vertices[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  return x;
}

}  // namespace

Snapshot induced_snapshot(const Graph& graph, SnapshotId id, std::vector<VertexId> vertices) {
  const auto in = membership(graph, vertices);
  Snapshot s;
  s.id = id;
  s.directed = graph.directed();
  for (const Edge& e : graph.edges()) {
    if (in[e.src] && in[e.dst]) s.edges.push_back(e);
  }
  s.attributes = attribute_rows(graph, vertices);
  s.vertices = std::move(vertices);
  return s;
}

Snapshot window_snapshot(const Graph& graph, SnapshotId id, std::vector<VertexId> vertices,
                         TimeWindow window) {
  const auto in = membership(graph, vertices);
  Snapshot s;
  s.id = id;
  s.directed = graph.directed();
  s.window = window;
  for (const Edge& e : graph.records()) {
    if (!e.timestamp || *e.timestamp < window.start || *e.timestamp >= window.end) continue;
    if (in[e.src] && in[e.dst]) s.edges.push_back(e);
  }
  s.attributes = attribute_rows(graph, vertices);
  s.vertices = std::move(vertices);
  return s;
}

Snapshot rematerialize(const Graph& graph, const Snapshot& snapshot) {
  Snapshot s = snapshot.window
                   ? window_snapshot(graph, snapshot.id, snapshot.vertices, *snapshot.window)
                   : induced_snapshot(graph, snapshot.id, snapshot.vertices);
  s.label = snapshot.label;
  return s;
}

void validate(const Snapshot& snapshot) {
  if (snapshot.vertices.empty()) throw std::invalid_argument("snapshot has no vertices");
  std::unordered_set<VertexId> members;
  for (VertexId v : snapshot.vertices) {
    if (!members.insert(v).second) {
      throw std::invalid_argument("duplicate vertex " + std::to_string(v) + " in snapshot " +
                                  std::to_string(snapshot.id));
    }
  }
  for (const Edge& e : snapshot.edges) {
    if (!members.count(e.src) || !members.count(e.dst)) {
      throw std::invalid_argument("snapshot " + std::to_string(snapshot.id) +
                                  " has an edge leaving its vertex set");
    }
  }
  if (snapshot.attributes.rank() != 2 || snapshot.attributes.rows() != snapshot.vertices.size()) {
    throw std::invalid_argument("snapshot " + std::to_string(snapshot.id) +
                                " attribute rows do not match its vertices");
  }
}

}  // namespace snapgan::graph
