#include "snapgan/model/scorer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "snapgan/graph/algorithms.hpp"
#include "snapgan/model/layers.hpp"

namespace snapgan::model {

SnapshotScorer::SnapshotScorer(ad::Tape& tape, const ModelParams& params, bool track_gradients)
    : tape_(tape), params_(params) {
  params_.validate();
  for (const Tensor* t : params_.tensors()) vars_.push_back(tape_.leaf(*t, track_gradients));
}

SnapshotScorer::SnapshotScorer(ad::Tape& tape, const ModelParams& params, std::vector<ad::Var> vars)
    : tape_(tape), params_(params), vars_(std::move(vars)) {
  params_.validate();
  const auto tensors = params_.tensors();
  if (vars_.size() != tensors.size()) {
    throw std::invalid_argument("scorer needs one var per parameter tensor");
  }
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (&vars_[i].tape() != &tape_ || vars_[i].shape() != tensors[i]->shape()) {
      throw std::invalid_argument("scorer var " + std::to_string(i) + " has the wrong tape or shape");
    }
  }
}

void SnapshotScorer::check_input_dim(std::size_t dim) const {
  if (dim != params_.input_dim) {
    throw std::invalid_argument("attribute dimension " + std::to_string(dim) +
                                " does not match model input dimension " +
                                std::to_string(params_.input_dim));
  }
}

ad::Var SnapshotScorer::embed(std::shared_ptr<const ad::SparseMatrix> adjacency,
                              const ad::Var& features) {
  check_input_dim(features.value().cols());
  std::vector<ad::Var> layers;
  ad::Var z = features;
  for (std::size_t l = 0; l < params_.gcn_weights.size(); ++l) {
    z = gcn_forward(vars_[l], adjacency, z);
    layers.push_back(z);
  }
  return layers.size() == 1 ? layers.front() : ad::concat_cols(layers);
}

void SnapshotScorer::attach_graph(const graph::Graph& graph,
                                  std::shared_ptr<const ad::SparseMatrix> adjacency) {
  check_input_dim(graph.attribute_dim());
  if (!adjacency) {
    adjacency = std::make_shared<const ad::SparseMatrix>(graph::normalized_adjacency(graph));
  }
  if (adjacency->rows() != graph.vertex_count()) {
    throw std::invalid_argument("precomputed adjacency does not match the graph");
  }
  ad::Var features = tape_.constant(graph.attributes());
  global_ = GlobalCache{&graph, embed(adjacency, features)};
}

ad::Var SnapshotScorer::readout(const ad::Var& embedding, std::span<const std::size_t> rows,
                                std::span<const std::size_t> degrees,
                                std::span<const graph::VertexId> ids, ad::Mode mode, Rng& rng) {
  const ArchitectureConfig& arch = params_.arch;
  const std::size_t k = arch.pool_rows(rows.size());
  ad::Var h = ad::gather_rows(embedding, degpool_indices(embedding.value(), rows, degrees, ids, k));

  std::size_t v = params_.gcn_weights.size();
  for (std::size_t i = 0; i < params_.conv_kernels.size(); ++i, v += 2) {
    h = ad::relu(ad::add_row(ad::conv1d(h, vars_[v], arch.conv1d_stride), vars_[v + 1]));
  }
  if (arch.fixed_k) {
    h = ad::reshape(h, ad::Shape{1, h.value().size()});
  } else {
    h = ad::mean_rows(h);
  }
  h = ad::relu(ad::add_row(ad::matmul(h, vars_[v]), vars_[v + 1]));
  h = ad::dropout(h, arch.dropout_rate, mode, rng);
  ad::Var out = ad::add_row(ad::matmul(h, vars_[v + 2]), vars_[v + 3]);
  return ad::reshape(out, ad::Shape{});
}

ad::Var SnapshotScorer::score(const graph::Snapshot& snapshot, AdjacencySource source,
                              ad::Mode mode, Rng& rng) {
  if (snapshot.vertices.empty()) throw std::invalid_argument("cannot score an empty snapshot");

  if (source == AdjacencySource::kGlobal) {
    if (!global_) {
      throw std::invalid_argument("global adjacency requested but no graph is attached");
    }
    const graph::Graph& g = *global_->graph;
    std::vector<std::size_t> rows, degrees;
    std::vector<graph::VertexId> ids;
    for (graph::VertexId v : snapshot.vertices) {
      if (v >= g.vertex_count()) throw std::invalid_argument("snapshot vertex outside the graph");
      rows.push_back(v);
      degrees.push_back(g.out_degree(v));
      ids.push_back(v);
    }
    return readout(global_->embedding, rows, degrees, ids, mode, rng);
  }

  check_input_dim(snapshot.attributes.cols());
  // Canonical order (ascending vertex id) so the result is independent of
  // how V_t happens to be listed.
  std::vector<std::size_t> perm(snapshot.vertices.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return snapshot.vertices[a] < snapshot.vertices[b];
  });
  graph::Snapshot canonical;
  canonical.directed = snapshot.directed;
  canonical.edges = snapshot.edges;
  std::sort(canonical.edges.begin(), canonical.edges.end(),
            [](const graph::Edge& a, const graph::Edge& b) {
              return std::tie(a.src, a.dst, a.weight) < std::tie(b.src, b.dst, b.weight);
            });
  canonical.attributes = Tensor(ad::Shape{perm.size(), snapshot.attributes.cols()});
  for (std::size_t i = 0; i < perm.size(); ++i) {
    canonical.vertices.push_back(snapshot.vertices[perm[i]]);
    const auto src = snapshot.attributes.row(perm[i]);
    std::copy(src.begin(), src.end(), canonical.attributes.row(i).begin());
  }

  auto adjacency = std::make_shared<const ad::SparseMatrix>(graph::normalized_adjacency(canonical));
  ad::Var embedding = embed(adjacency, tape_.constant(canonical.attributes));
  const auto degrees = graph::snapshot_out_degrees(canonical);
  std::vector<std::size_t> rows(perm.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return readout(embedding, rows, degrees, canonical.vertices, mode, rng);
}

ad::Var snapshot_score(SnapshotScorer& scorer, const graph::Snapshot& snapshot,
                       AdjacencySource source, ad::Mode mode, Rng& rng) {
  return scorer.score(snapshot, source, mode, rng);
}

double score_value(const ModelParams& params, const graph::Snapshot& snapshot,
                   AdjacencySource source, const graph::Graph* graph) {
  ad::Tape tape;
  SnapshotScorer scorer(tape, params, false);
  if (source == AdjacencySource::kGlobal) {
    if (!graph) throw std::invalid_argument("global adjacency requested but no graph given");
    scorer.attach_graph(*graph);
  }
  Rng unused(0);
  return scorer.score(snapshot, source, ad::Mode::kEval, unused).value().item();
}

double discriminator_probability(const ModelParams& params, const graph::Snapshot& snapshot) {
  if (params.head != Head::kDiscriminator) {
    throw std::invalid_argument("discriminator_probability needs discriminator-head parameters");
  }
  return ad::sigmoid(score_value(params, snapshot, AdjacencySource::kSnapshot));
}

ad::Var generator_logits(SnapshotScorer& scorer, std::span<const graph::Snapshot> pool,
                         ad::Mode mode, Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("generator needs a nonempty candidate pool");
  std::vector<ad::Var> logits;
  logits.reserve(pool.size());
  for (const auto& s : pool) logits.push_back(scorer.score(s, AdjacencySource::kGlobal, mode, rng));
  return ad::stack_scalars(logits);
}

std::vector<double> generator_distribution(const ModelParams& params,
                                           std::span<const graph::Snapshot> pool,
                                           const graph::Graph& graph) {
  if (params.head != Head::kGenerator) {
    throw std::invalid_argument("generator_distribution needs generator-head parameters");
  }
  if (pool.empty()) throw std::invalid_argument("generator needs a nonempty candidate pool");
  ad::Tape tape;
  SnapshotScorer scorer(tape, params, false);
  scorer.attach_graph(graph);
  Rng unused(0);
  ad::Var p = ad::softmax(generator_logits(scorer, pool, ad::Mode::kEval, unused));
  const auto values = p.value().values();
  return {values.begin(), values.end()};
}

}  // namespace snapgan::model
