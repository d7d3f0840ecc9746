#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "snapgan/autodiff/sparse.hpp"
#include "snapgan/graph/snapshot.hpp"

namespace snapgan::graph {

// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I. Directed inputs are
// symmetrised first (A + A^T). Rows/cols follow vertex id order for a graph
// and V_t order for a snapshot.
ad::SparseMatrix normalized_adjacency(const Graph& graph);
ad::SparseMatrix normalized_adjacency(const Snapshot& snapshot);

// Vertices within `radius` hops of `center` (direction ignored) and their
// induced edges. The center comes first, the rest in BFS discovery order
// with neighbours visited in ascending id.
Snapshot ego_network(const Graph& graph, VertexId center, std::size_t radius,
                     SnapshotId id = 0);

// cut(S) / min(vol(S), vol(V \ S)) with weighted volumes. Zero when no edge
// crosses the cut. Throws std::invalid_argument for an empty or full subset.
double conductance(const Graph& graph, std::span<const VertexId> subset);

// One snapshot per nonempty window [k*w, (k+1)*w), in time order. Snapshot
// vertices are the endpoints seen in the window (ascending), edges are the
// raw records. Throws std::invalid_argument if any record lacks a timestamp
// or window_seconds <= 0.
std::vector<Snapshot> aggregate_snapshots(const Graph& graph, std::int64_t window_seconds);

// Out-degrees of the snapshot's vertices counted inside the snapshot,
// aligned with V_t.
std::vector<std::size_t> snapshot_out_degrees(const Snapshot& snapshot);

}  // namespace snapgan::graph
