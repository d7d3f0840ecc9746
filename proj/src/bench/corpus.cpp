#include "snapgan/bench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "snapgan/common/errors.hpp"
#include "snapgan/graph/algorithms.hpp"
#include "snapgan/graph/io.hpp"

namespace snapgan::bench {
namespace {

using graph::Edge;
using graph::Graph;
using graph::Snapshot;
using graph::VertexId;
using graph::Tensor;
using nlohmann::json;

std::vector<VertexId> choose(std::span<const VertexId> from, std::size_t count, Rng& rng) {
  std::vector<VertexId> pool(from.begin(), from.end());
  rng.shuffle(std::span<VertexId>(pool));
  pool.resize(count);
  return pool;
}

double distance(std::span<const double> a, std::span<const double> b, Dissimilarity metric) {
  if (metric == Dissimilarity::kEuclidean) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  // A zero vector has no direction: it is treated as orthogonal to
  // everything except another zero vector.
  if (na == 0 || nb == 0) return (na == 0 && nb == 0) ? 0.0 : 1.0;
  return 1.0 - dot / std::sqrt(na * nb);
}

std::optional<std::int64_t> injection_timestamp(const Graph& g, const Snapshot& s) {
  if (g.records().empty() || !g.has_timestamps()) return std::nullopt;
  std::vector<std::int64_t> stamps;
  for (const Edge& e : s.edges)
    if (e.timestamp) stamps.push_back(*e.timestamp);
  if (stamps.empty() && s.window) return s.window->start;
  if (stamps.empty()) {
    for (const Edge& e : g.records()) stamps.push_back(*e.timestamp);
  }
  const auto mid = stamps.begin() + static_cast<std::ptrdiff_t>((stamps.size() - 1) / 2);
  std::nth_element(stamps.begin(), mid, stamps.end());
  return *mid;
}

}  // namespace

std::string to_string(Dissimilarity d) {
  return d == Dissimilarity::kEuclidean ? "euclidean" : "cosine";
}

Dissimilarity dissimilarity_from_string(const std::string& name) {
  if (name == "euclidean") return Dissimilarity::kEuclidean;
  if (name == "cosine") return Dissimilarity::kCosine;
  throw std::invalid_argument("unknown dissimilarity '" + name + "'");
}

json to_json(const ProvenanceRecord& r) {
  json j{{"snapshot", r.snapshot}, {"kind", r.kind}};
  if (r.kind == "edge_count") {
    j["edge_count"] = r.edge_count;
    j["threshold"] = r.threshold;
  } else {
    j["vertices"] = r.vertices;
    if (r.kind == "attribute") j["sources"] = r.sources;
    if (r.kind == "clique") j["edges_added"] = r.edges_added;
  }
  return j;
}

ProvenanceRecord provenance_from_json(const json& j) {
  try {
    ProvenanceRecord r;
    r.snapshot = j.at("snapshot").get<graph::SnapshotId>();
    r.kind = j.at("kind").get<std::string>();
    if (r.kind != "clique" && r.kind != "attribute" && r.kind != "edge_count") {
      throw DataError("unknown provenance kind '" + r.kind + "'");
    }
    if (j.contains("vertices")) r.vertices = j["vertices"].get<std::vector<VertexId>>();
    if (j.contains("sources")) r.sources = j["sources"].get<std::vector<VertexId>>();
    if (j.contains("edges_added")) r.edges_added = j["edges_added"].get<std::size_t>();
    if (j.contains("edge_count")) r.edge_count = j["edge_count"].get<std::size_t>();
    if (j.contains("threshold")) r.threshold = j["threshold"].get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed provenance record: ") + e.what());
  }
}

std::vector<Snapshot> select_normal_snapshots(const Graph& g, std::span<const Snapshot> candidates,
                                              std::size_t count) {
  if (count > candidates.size()) {
    throw std::invalid_argument("asked for " + std::to_string(count) + " normal snapshots from " +
                                std::to_string(candidates.size()) + " candidates");
  }
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& vs = candidates[i].vertices;
    if (std::set<VertexId>(vs.begin(), vs.end()).size() >= g.vertex_count()) {
      throw std::invalid_argument("candidate snapshot " + std::to_string(candidates[i].id) +
                                  " covers the whole graph; conductance is undefined");
    }
    keyed.emplace_back(graph::conductance(g, vs), i);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return candidates[a.second].id < candidates[b.second].id;
  });
  std::vector<Snapshot> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(candidates[keyed[i].second]);
  return out;
}

InjectionResult inject_structural(const Graph& g, const Snapshot& snapshot,
                                  std::size_t clique_size, Rng& rng) {
  if (clique_size < 2) throw std::invalid_argument("clique size must be at least 2");
  if (clique_size > snapshot.vertices.size()) {
    throw std::invalid_argument("clique of " + std::to_string(clique_size) +
                                " does not fit a snapshot of " +
                                std::to_string(snapshot.vertices.size()) + " vertices");
  }
  std::vector<VertexId> chosen = choose(snapshot.vertices, clique_size, rng);
  std::sort(chosen.begin(), chosen.end());
  const auto stamp = injection_timestamp(g, snapshot);
  std::vector<Edge> added;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen.size(); ++b) {
      const VertexId u = chosen[a], v = chosen[b];
      if (!g.edge_weight(u, v)) added.push_back({u, v, 1.0, stamp});
      if (g.directed() && !g.edge_weight(v, u)) added.push_back({v, u, 1.0, stamp});
    }
  }
  InjectionResult result{added.empty() ? g : g.with_added_edges(added), {}, {}};
  result.snapshot = graph::rematerialize(result.graph, snapshot);
  result.snapshot.label = graph::Label::kAnomalous;
  result.record = {snapshot.id, "clique", chosen, {}, added.size(), 0, 0};
  return result;
}

InjectionResult inject_attribute(const Graph& g, const Snapshot& snapshot, std::size_t node_count,
                                 Rng& rng, Dissimilarity metric) {
  if (g.attribute_dim() == 0) throw std::invalid_argument("graph has no attributes to inject");
  if (node_count == 0) throw std::invalid_argument("attribute injection of zero nodes");
  if (node_count > snapshot.vertices.size()) {
    throw std::invalid_argument("cannot alter " + std::to_string(node_count) +
                                " nodes of a snapshot with " +
                                std::to_string(snapshot.vertices.size()));
  }
  const std::vector<VertexId> chosen = choose(snapshot.vertices, node_count, rng);
  Tensor attrs = g.attributes();
  std::vector<VertexId> sources;
  for (VertexId v : chosen) {
    VertexId best = 0;
    double best_distance = -1;
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
      const double d = distance(attrs.row(v), attrs.row(u), metric);
      if (d > best_distance) {
        best_distance = d;
        best = u;
      }
    }
    const std::vector<double> copy(attrs.row(best).begin(), attrs.row(best).end());
    std::copy(copy.begin(), copy.end(), attrs.row(v).begin());
    sources.push_back(best);
  }
  InjectionResult result{g.with_attributes(std::move(attrs)), {}, {}};
  result.snapshot = graph::rematerialize(result.graph, snapshot);
  result.snapshot.label = graph::Label::kAnomalous;
  result.record = {snapshot.id, "attribute", chosen, sources, 0, 0, 0};
  return result;
}

LabeledCorpus label_by_edge_count(std::span<const Snapshot> snapshots, std::size_t threshold) {
  LabeledCorpus corpus;
  for (const Snapshot& s : snapshots) {
    Snapshot labeled = s;
    const bool anomalous = s.edges.size() >= threshold;
    labeled.label = anomalous ? graph::Label::kAnomalous : graph::Label::kNormal;
    if (anomalous) corpus.provenance.push_back({s.id, "edge_count", {}, {}, 0, s.edges.size(), threshold});
    corpus.snapshots.push_back(std::move(labeled));
  }
  return corpus;
}

void InjectionSpec::validate() const {
  if (clique_size < 2) throw std::invalid_argument("clique_size must be at least 2");
  if (n_struct_anomalies + n_attr_anomalies > n_normal) {
    throw std::invalid_argument("more anomalies requested than snapshots");
  }
  if (n_attr_anomalies > 0 && nodes_per_attr_anomaly == 0) {
    throw std::invalid_argument("nodes_per_attr_anomaly must be positive");
  }
}

std::size_t InjectionSpec::effective_min_size() const {
  if (min_snapshot_size > 0) return min_snapshot_size;
  std::size_t m = 3;
  if (n_struct_anomalies > 0) m = std::max(m, clique_size);
  if (n_attr_anomalies > 0) m = std::max(m, nodes_per_attr_anomaly);
  return m;
}

json to_json(const InjectionSpec& s) {
  return {{"n_normal", s.n_normal},
          {"n_struct_anomalies", s.n_struct_anomalies},
          {"clique_size", s.clique_size},
          {"n_attr_anomalies", s.n_attr_anomalies},
          {"nodes_per_attr_anomaly", s.nodes_per_attr_anomaly},
          {"dissimilarity", to_string(s.dissimilarity)},
          {"seed", s.seed},
          {"ego_radius", s.ego_radius},
          {"min_snapshot_size", s.min_snapshot_size},
          {"max_candidates", s.max_candidates},
          {"disjoint", s.disjoint}};
}

InjectionSpec injection_spec_from_json(const json& j) {
  if (!j.is_object()) throw DataError("injection spec must be an object");
  const json defaults = to_json(InjectionSpec{});
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw DataError("unknown injection key '" + key + "'");
  }
  InjectionSpec s;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("n_normal", s.n_normal);
    get("n_struct_anomalies", s.n_struct_anomalies);
    get("clique_size", s.clique_size);
    get("n_attr_anomalies", s.n_attr_anomalies);
    get("nodes_per_attr_anomaly", s.nodes_per_attr_anomaly);
    if (j.contains("dissimilarity")) {
      s.dissimilarity = dissimilarity_from_string(j["dissimilarity"].get<std::string>());
    }
    get("seed", s.seed);
    get("ego_radius", s.ego_radius);
    get("min_snapshot_size", s.min_snapshot_size);
    get("max_candidates", s.max_candidates);
    get("disjoint", s.disjoint);
    s.validate();
  } catch (const json::exception& e) {
    throw DataError(std::string("injection spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("injection spec: ") + e.what());
  }
  return s;
}

ForgedCorpus build_injected_corpus(const Graph& g, const InjectionSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = g.vertex_count();

  std::vector<VertexId> centers(n);
  std::iota(centers.begin(), centers.end(), VertexId{0});
  rng.shuffle(std::span<VertexId>(centers));
  if (spec.max_candidates > 0 && spec.max_candidates < n) centers.resize(spec.max_candidates);

  std::vector<Snapshot> candidates;
  std::set<std::vector<VertexId>> seen;
  const std::size_t min_size = spec.effective_min_size();
  for (VertexId c : centers) {
    Snapshot ego = graph::ego_network(g, c, spec.ego_radius, c);
    if (ego.vertices.size() < min_size || ego.vertices.size() >= n) continue;
    std::vector<VertexId> key = ego.vertices;
    std::sort(key.begin(), key.end());
    if (!seen.insert(std::move(key)).second) continue;
    candidates.push_back(std::move(ego));
  }

  std::vector<Snapshot> selected;
  if (spec.disjoint) {
    std::unordered_set<VertexId> used;
    for (Snapshot& s : select_normal_snapshots(g, candidates, candidates.size())) {
      if (selected.size() == spec.n_normal) break;
      if (std::any_of(s.vertices.begin(), s.vertices.end(),
                      [&](VertexId v) { return used.count(v) > 0; })) {
        continue;
      }
      used.insert(s.vertices.begin(), s.vertices.end());
      selected.push_back(std::move(s));
    }
  } else if (candidates.size() >= spec.n_normal) {
    selected = select_normal_snapshots(g, candidates, spec.n_normal);
  }
  if (selected.size() < spec.n_normal) {
    throw DataError("insufficient candidates: found " + std::to_string(selected.size()) +
                    " usable ego networks, need " + std::to_string(spec.n_normal));
  }
  for (Snapshot& s : selected) s.label = graph::Label::kNormal;

  std::vector<std::size_t> targets(selected.size());
  std::iota(targets.begin(), targets.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(targets));

  Graph current = g;
  std::vector<std::optional<ProvenanceRecord>> records(selected.size());
  for (std::size_t t = 0; t < spec.n_struct_anomalies + spec.n_attr_anomalies; ++t) {
    const std::size_t i = targets[t];
    const Snapshot fresh = graph::rematerialize(current, selected[i]);
    InjectionResult r = t < spec.n_struct_anomalies
                            ? inject_structural(current, fresh, spec.clique_size, rng)
                            : inject_attribute(current, fresh, spec.nodes_per_attr_anomaly, rng,
                                               spec.dissimilarity);
    current = std::move(r.graph);
    selected[i].label = graph::Label::kAnomalous;
    records[i] = std::move(r.record);
  }

  std::vector<std::size_t> order(selected.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  ForgedCorpus out{std::move(current), {}};
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    Snapshot s = graph::rematerialize(out.graph, selected[order[pos]]);
    s.id = pos;
    if (records[order[pos]]) {
      ProvenanceRecord rec = *records[order[pos]];
      rec.snapshot = pos;
      out.corpus.provenance.push_back(std::move(rec));
    }
    out.corpus.snapshots.push_back(std::move(s));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const Graph& g, const LabeledCorpus& corpus) {
  std::filesystem::create_directories(dir);
  graph::io::write_edge_list(dir / "edges.tsv", g.records());
  graph::io::write_attributes(dir / "attributes.csv", g.attributes());
  std::vector<graph::io::ManifestEntry> entries;
  for (const Snapshot& s : corpus.snapshots) entries.push_back(graph::io::manifest_entry(s));
  graph::io::write_manifest(dir / "snapshots.jsonl", entries);
  std::ofstream prov(dir / "provenance.jsonl", std::ios::trunc);
  if (!prov) throw std::runtime_error("cannot write " + (dir / "provenance.jsonl").string());
  for (const auto& r : corpus.provenance) prov << to_json(r).dump() << '\n';
}

LoadedCorpus read_corpus(const std::filesystem::path& dir, bool directed) {
  auto edges = graph::io::read_edge_list(dir / "edges.tsv");
  auto attrs = graph::io::read_attributes(dir / "attributes.csv", false);
  Graph g;
  try {
    g = Graph::build(std::move(edges), std::move(attrs), directed);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  LoadedCorpus out{std::move(g), {}};
  out.corpus.snapshots = graph::io::materialize(out.graph, graph::io::read_manifest(dir / "snapshots.jsonl"));
  const auto prov_path = dir / "provenance.jsonl";
  if (std::filesystem::exists(prov_path)) {
    std::ifstream in(prov_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.corpus.provenance.push_back(provenance_from_json(json::parse(line)));
      } catch (const json::exception& e) {
        throw DataError(prov_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace snapgan::bench
