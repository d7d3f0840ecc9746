#include "snapgan/eval/evaluate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "snapgan/common/errors.hpp"
#include "snapgan/model/scorer.hpp"

namespace snapgan::eval {
namespace {

using graph::Snapshot;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {nan(), nan()};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size() - 1))};
}

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

bool needs_training(RankerKind r) { return r == RankerKind::kGan || r == RankerKind::kDiscOnly; }

}  // namespace

std::string to_string(RankerKind kind) {
  switch (kind) {
    case RankerKind::kGan: return "gan";
    case RankerKind::kDiscOnly: return "disc-only";
    case RankerKind::kDegreeSum: return "degree-sum";
    case RankerKind::kRandom: return "random";
    case RankerKind::kOracle: return "oracle";
  }
  return "unknown";
}

RankerKind ranker_from_string(const std::string& name) {
  for (RankerKind k : {RankerKind::kGan, RankerKind::kDiscOnly, RankerKind::kDegreeSum,
                       RankerKind::kRandom, RankerKind::kOracle}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown ranker '" + name + "'");
}

std::string to_string(Protocol p) {
  return p == Protocol::kCrossValidation ? "cross-validation" : "transductive";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "cross-validation" || name == "cv") return Protocol::kCrossValidation;
  if (name == "transductive") return Protocol::kTransductive;
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

std::vector<double> ranker_scores(RankerKind ranker, std::span<const Snapshot> pool,
                                  const graph::Graph& graph, const train::TrainState* state,
                                  Rng& rng) {
  std::vector<double> scores;
  scores.reserve(pool.size());
  if (needs_training(ranker) && !state) {
    throw std::invalid_argument(to_string(ranker) + " ranking needs trained parameters");
  }
  switch (ranker) {
    case RankerKind::kGan:
      return model::generator_distribution(state->generator, pool, graph);
    case RankerKind::kDiscOnly:
      for (const auto& s : pool) scores.push_back(model::discriminator_probability(state->discriminator, s));
      break;
    case RankerKind::kDegreeSum:
      for (const auto& s : pool) {
        double total = 0;
        for (graph::VertexId v : s.vertices) total += static_cast<double>(graph.out_degree(v));
        scores.push_back(total);
      }
      break;
    case RankerKind::kRandom:
      for (std::size_t i = 0; i < pool.size(); ++i) scores.push_back(rng.uniform());
      break;
    case RankerKind::kOracle:
      for (const auto& s : pool) {
        if (!s.label) throw DataError("oracle ranking needs labels");
        scores.push_back(s.anomalous() ? 1.0 : 0.0);
      }
      break;
  }
  return scores;
}

train::TrainConfig ranker_train_config(RankerKind ranker, const train::TrainConfig& base) {
  train::TrainConfig c = base;
  if (ranker == RankerKind::kDiscOnly) c.generator_epochs = 0;
  return c;
}

RankedResult rank_pool(RankerKind ranker, std::span<const Snapshot> pool,
                       const graph::Graph& graph, const train::TrainState* state, Rng& rng) {
  const auto scores = ranker_scores(ranker, pool, graph, state, rng);
  std::vector<SnapshotId> ids;
  for (const auto& s : pool) ids.push_back(s.id);
  return rank_by_scores(ids, scores);
}

EvalReport evaluate(const graph::Graph& graph, std::span<const Snapshot> corpus,
                    const EvalConfig& config) {
  if (config.ks.empty()) throw std::invalid_argument("no K values to evaluate");
  for (std::size_t k : config.ks)
    if (k == 0) throw std::invalid_argument("K must be positive");
  std::unordered_map<SnapshotId, bool> truth;
  std::unordered_map<SnapshotId, std::size_t> index;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].label) throw DataError("snapshot " + std::to_string(corpus[i].id) + " is unlabeled");
    if (!index.emplace(corpus[i].id, i).second) {
      throw DataError("duplicate snapshot id " + std::to_string(corpus[i].id));
    }
    truth[corpus[i].id] = corpus[i].anomalous();
    positives += corpus[i].anomalous();
  }
  if (positives == 0) throw DataError("corpus has no anomalous snapshot");

  std::vector<Fold> folds;
  if (config.protocol == Protocol::kTransductive) {
    Fold all;
    for (const auto& s : corpus) all.test.push_back(s.id);
    folds.push_back(std::move(all));
  } else {
    std::vector<SnapshotId> ids;
    for (const auto& s : corpus) ids.push_back(s.id);
    folds = kfold_split(ids, config.folds, config.seed);
  }

  EvalReport report;
  report.ranker = config.ranker;
  report.protocol = config.protocol;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<Snapshot> pool(corpus.begin(), corpus.end());
    if (config.protocol == Protocol::kCrossValidation) {
      for (SnapshotId id : folds[f].test) pool[index.at(id)].label.reset();
    }
    std::optional<train::TrainState> state;
    if (needs_training(config.ranker)) {
      train::TrainConfig tc = ranker_train_config(config.ranker, config.train);
      tc.seed = config.train.seed + f;
      state = train::train(pool, graph, tc, config.arch);
    }
    Rng rng(config.seed, 1000 + f);
    const auto scores = ranker_scores(config.ranker, corpus, graph, state ? &*state : nullptr, rng);

    std::vector<SnapshotId> test_ids;
    std::vector<double> test_scores;
    std::unordered_map<SnapshotId, bool> test_truth;
    std::size_t test_positives = 0;
    for (SnapshotId id : folds[f].test) {
      test_ids.push_back(id);
      test_scores.push_back(scores[index.at(id)]);
      test_truth[id] = truth.at(id);
      test_positives += truth.at(id);
    }
    RankedResult ranked = rank_by_scores(test_ids, test_scores, f);
    for (std::size_t k : config.ks) {
      EvalRow row;
      row.fold = f;
      row.k = k;
      row.k_used = std::min(k, ranked.ids.size());
      row.positives = test_positives;
      row.ranked = ranked.ids.size();
      if (test_positives > 0) {
        const auto pr = precision_recall_at_k(ranked.ids, test_truth, row.k_used);
        row.precision = pr.precision;
        row.recall = pr.recall;
        row.hits = pr.hits;
      } else {
        row.precision = 0.0;
        row.recall = nan();
      }
      report.rows.push_back(row);
    }
    report.rankings.push_back(std::move(ranked));
  }

  for (std::size_t k : config.ks) {
    std::vector<double> precisions, recalls;
    for (const auto& row : report.rows) {
      if (row.k != k) continue;
      precisions.push_back(row.precision);
      if (!std::isnan(row.recall)) recalls.push_back(row.recall);
    }
    KSummary s;
    s.k = k;
    s.folds = precisions.size();
    std::tie(s.precision_mean, s.precision_std) = mean_std(precisions);
    std::tie(s.recall_mean, s.recall_std) = mean_std(recalls);
    report.summary.push_back(s);
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["ranker"] = to_string(report.ranker);
  j["protocol"] = to_string(report.protocol);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"fold", r.fold}, {"k", r.k}, {"k_used", r.k_used},
                         {"precision", r.precision}, {"recall", number_or_null(r.recall)},
                         {"hits", r.hits}, {"positives", r.positives}, {"ranked", r.ranked}});
  }
  j["summary"] = nlohmann::json::array();
  for (const auto& s : report.summary) {
    j["summary"].push_back({{"k", s.k}, {"folds", s.folds},
                            {"precision_mean", number_or_null(s.precision_mean)},
                            {"precision_std", number_or_null(s.precision_std)},
                            {"recall_mean", number_or_null(s.recall_mean)},
                            {"recall_std", number_or_null(s.recall_std)}});
  }
  return j;
}

std::string metrics_csv(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "ranker,protocol,fold,k,k_used,precision,recall,hits,positives,ranked\n";
  for (const auto& r : report.rows) {
    out << to_string(report.ranker) << ',' << to_string(report.protocol) << ',' << r.fold << ','
        << r.k << ',' << r.k_used << ',' << r.precision << ',';
    if (!std::isnan(r.recall)) out << r.recall;
    out << ',' << r.hits << ',' << r.positives << ',' << r.ranked << '\n';
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  const nlohmann::json j = to_json(report);
  std::ofstream lines(dir / "report.jsonl", std::ios::trunc);
  if (!lines) throw std::runtime_error("cannot write " + (dir / "report.jsonl").string());
  for (const auto& row : j["rows"]) {
    nlohmann::json line = row;
    line["type"] = "fold";
    line["ranker"] = j["ranker"];
    lines << line.dump() << '\n';
  }
  for (const auto& s : j["summary"]) {
    nlohmann::json line = s;
    line["type"] = "summary";
    line["ranker"] = j["ranker"];
    lines << line.dump() << '\n';
  }
  std::ofstream csv(dir / "metrics.csv", std::ios::trunc);
  csv << metrics_csv(report);
}

}  // namespace snapgan::eval
