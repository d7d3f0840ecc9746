#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "snapgan/graph/snapshot.hpp"

// Text formats for graphs and snapshot corpora. Parse failures throw
// snapgan::DataError naming the offending line.
namespace snapgan::graph::io {

// Edge list: UTF-8, one edge per line, tab-separated
//   src <TAB> dst <TAB> weight [<TAB> timestamp]
// Lines starting with '#' and blank lines are ignored.
std::vector<Edge> read_edge_list(std::istream& in);
std::vector<Edge> read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, std::span<const Edge> edges);
void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges);

// Attribute table: UTF-8 CSV, row i holds the attributes of vertex i. With
// `has_header` the first non-empty line is skipped.
Tensor read_attributes(std::istream& in, bool has_header);
Tensor read_attributes(const std::filesystem::path& path, bool has_header);
void write_attributes(std::ostream& out, const Tensor& attributes);
void write_attributes(const std::filesystem::path& path, const Tensor& attributes);

// Snapshot manifest: JSON Lines, one object per snapshot:
//   {"id": 7, "vertex_ids": [3, 1, 4], "label": 1}
// "label" is 0, 1 or null (unknown). Time-window snapshots carry
// "window": [start, end] and take their edges from the records in that
// window; otherwise edges are induced from the graph.
struct ManifestEntry {
  SnapshotId id = 0;
  std::vector<VertexId> vertex_ids;
  std::optional<Label> label;
  std::optional<TimeWindow> window;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

std::vector<ManifestEntry> read_manifest(std::istream& in);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

ManifestEntry manifest_entry(const Snapshot& snapshot);
// Materializes manifest entries against a graph; throws DataError on ids
// that repeat or vertices outside the graph.
std::vector<Snapshot> materialize(const Graph& graph, std::span<const ManifestEntry> entries);

}  // namespace snapgan::graph::io
