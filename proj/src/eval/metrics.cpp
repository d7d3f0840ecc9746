#include "snapgan/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "snapgan/common/rng.hpp"

namespace snapgan::eval {

PrecisionRecall precision_recall_at_k(std::span<const SnapshotId> ranking,
                                      const std::unordered_map<SnapshotId, bool>& truth,
                                      std::size_t k) {
  if (k == 0 || k > ranking.size()) {
    throw std::invalid_argument("K = " + std::to_string(k) + " outside [1, " +
                                std::to_string(ranking.size()) + "]");
  }
  std::size_t positives = 0;
  for (const auto& [id, positive] : truth) positives += positive;
  if (positives == 0) throw std::invalid_argument("precision/recall need at least one positive");
  PrecisionRecall out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto it = truth.find(ranking[i]);
    out.hits += it != truth.end() && it->second;
  }
  out.precision = static_cast<double>(out.hits) / static_cast<double>(k);
  out.recall = static_cast<double>(out.hits) / static_cast<double>(positives);
  return out;
}

std::vector<Fold> kfold_split(std::span<const SnapshotId> ids, std::size_t folds,
                              std::uint64_t seed) {
  if (folds < 1 || folds > ids.size()) {
    throw std::invalid_argument("cannot split " + std::to_string(ids.size()) + " ids into " +
                                std::to_string(folds) + " folds");
  }
  std::vector<SnapshotId> shuffled(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span<SnapshotId>(shuffled));
  std::vector<Fold> out(folds);
  for (std::size_t i = 0; i < shuffled.size(); ++i) out[i % folds].test.push_back(shuffled[i]);
  for (std::size_t f = 0; f < folds; ++f) {
    std::sort(out[f].test.begin(), out[f].test.end());
    for (std::size_t g = 0; g < folds; ++g) {
      if (g != f) out[f].train.insert(out[f].train.end(), out[g].test.begin(), out[g].test.end());
    }
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

double aggregate_node_scores(std::span<const double> likelihoods) {
  double total = 0;
  for (double l : likelihoods) {
    if (!(l > 0 && l <= 1)) throw std::invalid_argument("node likelihoods must lie in (0, 1]");
    total -= std::log(l);
  }
  return total;
}

double aggregate_edge_scores(std::span<const double> likelihoods, std::span<const double> weights) {
  if (likelihoods.empty() || likelihoods.size() != weights.size()) {
    throw std::invalid_argument("need one positive weight per edge likelihood");
  }
  double log_sum = 0, weight_sum = 0;
  for (std::size_t i = 0; i < likelihoods.size(); ++i) {
    if (!(likelihoods[i] > 0 && likelihoods[i] <= 1)) {
      throw std::invalid_argument("edge likelihoods must lie in (0, 1]");
    }
    if (!(weights[i] > 0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("edge weights must be positive");
    }
    log_sum += weights[i] * std::log(likelihoods[i]);
    weight_sum += weights[i];
  }
  return -log_sum / weight_sum;
}

RankedResult rank_by_scores(std::span<const SnapshotId> ids, std::span<const double> scores,
                            std::size_t fold) {
  if (ids.size() != scores.size()) throw std::invalid_argument("one score per id required");
  for (double s : scores)
    if (std::isnan(s)) throw std::invalid_argument("cannot rank NaN scores");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  RankedResult out;
  out.fold = fold;
  for (std::size_t i : order) {
    out.ids.push_back(ids[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

}  // namespace snapgan::eval
