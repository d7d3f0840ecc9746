#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "snapgan/autodiff/ops.hpp"
#include "snapgan/graph/snapshot.hpp"
#include "snapgan/model/architecture.hpp"

namespace snapgan::model {

enum class AdjacencySource {
  kSnapshot,  // GCN over the snapshot's own edges (discriminator)
  kGlobal,    // GCN over the whole graph, pooled over V_t (generator)
};

// Binds a parameter set to a tape and evaluates snapshot scores on it.
// Parameters become tape leaves (with gradients when `track_gradients`) and
// are listed by parameter_vars() in ModelParams::tensors() order.
class SnapshotScorer {
 public:
  SnapshotScorer(ad::Tape& tape, const ModelParams& params, bool track_gradients);
  // Uses caller-owned vars (one per ModelParams::tensors() entry, matching
  // shapes) instead of creating leaves; the values in `params` are ignored.
  SnapshotScorer(ad::Tape& tape, const ModelParams& params, std::vector<ad::Var> vars);

  const ModelParams& params() const { return params_; }
  std::span<const ad::Var> parameter_vars() const { return vars_; }

  // Runs the GCN stack once over `graph` and caches the concatenated layer
  // outputs for kGlobal scoring. `adjacency` may carry a precomputed
  // normalized_adjacency(graph).
  void attach_graph(const graph::Graph& graph,
                    std::shared_ptr<const ad::SparseMatrix> adjacency = nullptr);
  bool has_graph() const { return global_.has_value(); }

  // Scalar score f(g_t). Vertex order in the snapshot does not matter.
  ad::Var score(const graph::Snapshot& snapshot, AdjacencySource source, ad::Mode mode, Rng& rng);

  // Concatenated GCN layer outputs (n x sum(c_l)) for an adjacency/features pair.
  ad::Var embed(std::shared_ptr<const ad::SparseMatrix> adjacency, const ad::Var& features);

 private:
  struct GlobalCache {
    const graph::Graph* graph;
    ad::Var embedding;
  };

  ad::Var readout(const ad::Var& embedding, std::span<const std::size_t> rows,
                  std::span<const std::size_t> degrees, std::span<const graph::VertexId> ids,
                  ad::Mode mode, Rng& rng);
  void check_input_dim(std::size_t dim) const;

  ad::Tape& tape_;
  const ModelParams& params_;
  std::vector<ad::Var> vars_;
  std::optional<GlobalCache> global_;
};

// Head-level entry points ------------------------------------------------

ad::Var snapshot_score(SnapshotScorer& scorer, const graph::Snapshot& snapshot,
                       AdjacencySource source, ad::Mode mode, Rng& rng);

// Eval-mode score without gradient tracking. `graph` is required for kGlobal.
double score_value(const ModelParams& params, const graph::Snapshot& snapshot,
                   AdjacencySource source, const graph::Graph* graph = nullptr);

// sigma(f_phi(g_t)) on the snapshot adjacency. Throws std::invalid_argument
// for generator-head parameters.
double discriminator_probability(const ModelParams& params, const graph::Snapshot& snapshot);

// Per-snapshot generator logits on a tape (rank-1, aligned with pool).
ad::Var generator_logits(SnapshotScorer& scorer, std::span<const graph::Snapshot> pool,
                         ad::Mode mode, Rng& rng);

// Softmax over eval-mode generator logits of the whole pool. Throws for an
// empty pool or discriminator-head parameters.
std::vector<double> generator_distribution(const ModelParams& params,
                                           std::span<const graph::Snapshot> pool,
                                           const graph::Graph& graph);

}  // namespace snapgan::model
