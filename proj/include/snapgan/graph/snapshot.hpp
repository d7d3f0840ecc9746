#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "snapgan/graph/graph.hpp"

namespace snapgan::graph {

using SnapshotId = std::uint64_t;

enum class Label : std::uint8_t { kNormal = 0, kAnomalous = 1 };

// Half-open time interval [start, end) in seconds.
struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// A labeled subgraph g_t = {V_t, E_t, X_t}. Edges use global vertex ids;
// attribute rows align positionally with `vertices`.
struct Snapshot {
  SnapshotId id = 0;
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  Tensor attributes;
  std::optional<Label> label;
  bool directed = false;
  // Set for time-window snapshots; edges are then the window's records.
  std::optional<TimeWindow> window;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  bool anomalous() const { return label == Label::kAnomalous; }
};

// Subgraph induced by `vertices` (order kept, duplicates rejected).
Snapshot induced_snapshot(const Graph& graph, SnapshotId id, std::vector<VertexId> vertices);

// Subgraph over `vertices` whose edges are the raw records falling in
// `window` with both endpoints inside the vertex set.
Snapshot window_snapshot(const Graph& graph, SnapshotId id, std::vector<VertexId> vertices,
                         TimeWindow window);

// Rebuilds a snapshot's edges and attributes from `graph`, keeping id,
// vertex order, label and window.
Snapshot rematerialize(const Graph& graph, const Snapshot& snapshot);

// Throws std::invalid_argument when an invariant is violated: empty vertex
// set, duplicate vertices, edge endpoint outside V_t, or attribute rows not
// matching V_t.
void validate(const Snapshot& snapshot);

}  // namespace snapgan::graph
