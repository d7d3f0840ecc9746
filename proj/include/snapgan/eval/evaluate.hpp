#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "snapgan/eval/metrics.hpp"
#include "snapgan/train/trainer.hpp"

namespace snapgan::eval {

enum class RankerKind {
  kGan,        // generator probabilities after adversarial training
  kDiscOnly,   // discriminator probabilities, generator frozen at init
  kDegreeSum,  // sum of global degrees over V_t
  kRandom,     // uniform random scores
  kOracle,     // score = label
};

std::string to_string(RankerKind kind);
RankerKind ranker_from_string(const std::string& name);

enum class Protocol {
  // k-fold: test-fold labels are hidden from training, the test fold is ranked.
  kCrossValidation,
  // All labels visible, the whole corpus is ranked once (fold 0).
  kTransductive,
};

std::string to_string(Protocol protocol);
Protocol protocol_from_string(const std::string& name);

struct EvalConfig {
  std::vector<std::size_t> ks{10};
  std::size_t folds = 10;
  Protocol protocol = Protocol::kCrossValidation;
  RankerKind ranker = RankerKind::kGan;
  // Drives the split and the random ranker.
  std::uint64_t seed = 0;
  train::TrainConfig train;
  model::ArchitectureConfig arch;
};

struct EvalRow {
  std::size_t fold = 0;
  std::size_t k = 0;       // requested K
  std::size_t k_used = 0;  // K clamped to the ranked set
  double precision = 0.0;
  double recall = 0.0;  // NaN when the ranked set has no positive
  std::size_t hits = 0;
  std::size_t positives = 0;
  std::size_t ranked = 0;
};

struct KSummary {
  std::size_t k = 0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;  // over folds with a positive
  std::size_t folds = 0;
};

struct EvalReport {
  RankerKind ranker = RankerKind::kGan;
  Protocol protocol = Protocol::kCrossValidation;
  std::vector<RankedResult> rankings;  // one per fold
  std::vector<EvalRow> rows;           // one per (fold, K)
  std::vector<KSummary> summary;       // one per K
};

// Anomaly scores (higher = more anomalous) for `pool`. kGan and kDiscOnly
// read the trained parameters in `state`; kRandom draws from `rng`.
std::vector<double> ranker_scores(RankerKind ranker, std::span<const graph::Snapshot> pool,
                                  const graph::Graph& graph, const train::TrainState* state,
                                  Rng& rng);

// Training settings for a ranker: disc-only runs no generator epochs.
train::TrainConfig ranker_train_config(RankerKind ranker, const train::TrainConfig& base);

// Runs the protocol. Throws snapgan::DataError when a snapshot is unlabeled
// or the corpus has no positive.
EvalReport evaluate(const graph::Graph& graph, std::span<const graph::Snapshot> corpus,
                    const EvalConfig& config);

// Ranks `pool` with already trained parameters (no training, fold 0).
RankedResult rank_pool(RankerKind ranker, std::span<const graph::Snapshot> pool,
                       const graph::Graph& graph, const train::TrainState* state, Rng& rng);

nlohmann::json to_json(const EvalReport& report);
// report.jsonl (one line per row, then one per K summary) and metrics.csv.
void write_report(const std::filesystem::path& dir, const EvalReport& report);
std::string metrics_csv(const EvalReport& report);

}  // namespace snapgan::eval
