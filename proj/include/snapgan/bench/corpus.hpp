#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "snapgan/common/rng.hpp"
#include "snapgan/graph/snapshot.hpp"

namespace snapgan::bench {

enum class Dissimilarity { kEuclidean, kCosine };

std::string to_string(Dissimilarity d);
Dissimilarity dissimilarity_from_string(const std::string& name);

// Why a snapshot carries label 1.
struct ProvenanceRecord {
  graph::SnapshotId snapshot = 0;
  std::string kind;  // "clique", "attribute" or "edge_count"
  // clique: the chosen vertices; attribute: the overwritten vertices.
  std::vector<graph::VertexId> vertices;
  // attribute: the vertex whose row was copied onto vertices[i].
  std::vector<graph::VertexId> sources;
  std::size_t edges_added = 0;
  // edge_count: m_t and the threshold it met.
  std::size_t edge_count = 0;
  std::size_t threshold = 0;

  friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

nlohmann::json to_json(const ProvenanceRecord& record);
ProvenanceRecord provenance_from_json(const nlohmann::json& j);

struct LabeledCorpus {
  std::vector<graph::Snapshot> snapshots;
  std::vector<ProvenanceRecord> provenance;
};

struct InjectionResult {
  graph::Graph graph;
  graph::Snapshot snapshot;
  ProvenanceRecord record;
};

// The `count` candidates with the lowest conductance of V_t in `graph`,
// ties by snapshot id. Throws std::invalid_argument when count exceeds the
// candidates or a candidate covers the whole vertex set.
std::vector<graph::Snapshot> select_normal_snapshots(const graph::Graph& graph,
                                                     std::span<const graph::Snapshot> candidates,
                                                     std::size_t count);

// Turns clique_size uniformly chosen vertices of the snapshot into a clique
// (missing edges get weight 1 and, when the graph is timestamped, the
// median timestamp of the snapshot's edges). Label 1.
InjectionResult inject_structural(const graph::Graph& graph, const graph::Snapshot& snapshot,
                                  std::size_t clique_size, Rng& rng);

// Overwrites the attributes of node_count uniformly chosen snapshot vertices
// with those of the graph vertex farthest from each (ties by lower id).
// Label 1. Throws for node_count 0, node_count > n_t or d = 0.
InjectionResult inject_attribute(const graph::Graph& graph, const graph::Snapshot& snapshot,
                                 std::size_t node_count, Rng& rng,
                                 Dissimilarity metric = Dissimilarity::kEuclidean);

// Label 1 iff the snapshot has at least `threshold` edges.
LabeledCorpus label_by_edge_count(std::span<const graph::Snapshot> snapshots,
                                  std::size_t threshold = 50);

struct InjectionSpec {
  std::size_t n_normal = 100;
  std::size_t n_struct_anomalies = 5;
  std::size_t clique_size = 8;
  std::size_t n_attr_anomalies = 5;
  std::size_t nodes_per_attr_anomaly = 5;
  Dissimilarity dissimilarity = Dissimilarity::kEuclidean;
  std::uint64_t seed = 0;
  std::size_t ego_radius = 1;
  // Ego networks smaller than this are not candidates (0 = the larger of
  // clique_size, nodes_per_attr_anomaly and 3).
  std::size_t min_snapshot_size = 0;
  // Cap on ego networks examined (0 = one per vertex).
  std::size_t max_candidates = 0;
  // Keep selected snapshots vertex-disjoint so injections stay local.
  bool disjoint = true;

  // Throws std::invalid_argument.
  void validate() const;
  std::size_t effective_min_size() const;

  friend bool operator==(const InjectionSpec&, const InjectionSpec&) = default;
};

nlohmann::json to_json(const InjectionSpec& spec);
// Missing keys keep defaults; unknown keys throw snapgan::DataError.
InjectionSpec injection_spec_from_json(const nlohmann::json& j);

struct ForgedCorpus {
  graph::Graph graph;  // input graph plus all injections
  LabeledCorpus corpus;
};

// Samples ego networks from random centers, keeps the n_normal with the
// lowest conductance, injects the structural and attribute anomalies into
// distinct selected snapshots, re-reads every snapshot from the final
// graph, shuffles and renumbers ids 0..n-1. Injections are applied to the
// selected snapshots, so the corpus has n_normal snapshots of which
// n_struct + n_attr are labeled 1. Throws snapgan::DataError when too few
// candidates exist.
ForgedCorpus build_injected_corpus(const graph::Graph& graph, const InjectionSpec& spec);

// Writes edges.tsv, attributes.csv, snapshots.jsonl and provenance.jsonl.
void write_corpus(const std::filesystem::path& dir, const graph::Graph& graph,
                  const LabeledCorpus& corpus);

struct LoadedCorpus {
  graph::Graph graph;
  LabeledCorpus corpus;
};

// Reads a directory written by write_corpus (provenance optional); also
// accepts the generic ingest layout. `directed` applies to the edge list.
LoadedCorpus read_corpus(const std::filesystem::path& dir, bool directed = false);

}  // namespace snapgan::bench
