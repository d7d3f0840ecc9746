#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "snapgan/graph/snapshot.hpp"

namespace snapgan::eval {

using graph::SnapshotId;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t hits = 0;
};

// Hits among the first K ids of `ranking`. `truth` maps id -> anomalous;
// ids missing from it count as negatives. Throws std::invalid_argument when
// K is 0 or exceeds the ranking, or truth has no positive.
PrecisionRecall precision_recall_at_k(std::span<const SnapshotId> ranking,
                                      const std::unordered_map<SnapshotId, bool>& truth,
                                      std::size_t k);

struct Fold {
  std::vector<SnapshotId> train;
  std::vector<SnapshotId> test;
};

// Shuffles ids with `seed` and deals them into `folds` test sets whose sizes
// differ by at most one. Throws std::invalid_argument for folds < 1 or
// folds > |ids|.
std::vector<Fold> kfold_split(std::span<const SnapshotId> ids, std::size_t folds,
                              std::uint64_t seed);

// -sum log l(v). Throws std::invalid_argument unless every l is in (0, 1].
double aggregate_node_scores(std::span<const double> likelihoods);

// -log of the weighted geometric mean (prod l_e^w_e)^(1/W), W = sum w_e.
// Throws std::invalid_argument for an empty input, l outside (0, 1], or a
// weight that is not positive.
double aggregate_edge_scores(std::span<const double> likelihoods, std::span<const double> weights);

// Ids ordered by score descending, ties by id ascending.
struct RankedResult {
  std::size_t fold = 0;
  std::vector<SnapshotId> ids;
  std::vector<double> scores;
};

RankedResult rank_by_scores(std::span<const SnapshotId> ids, std::span<const double> scores,
                            std::size_t fold = 0);

}  // namespace snapgan::eval
