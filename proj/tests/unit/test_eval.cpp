#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "snapgan/common/errors.hpp"
#include "snapgan/common/rng.hpp"
#include "snapgan/eval/evaluate.hpp"
#include "snapgan/eval/metrics.hpp"

using namespace snapgan;
using namespace snapgan::eval;
using graph::Edge;
using graph::Graph;
using graph::Label;
using graph::Snapshot;

namespace {

std::unordered_map<SnapshotId, bool> truth_of(std::initializer_list<std::pair<SnapshotId, bool>> xs) {
  return {xs.begin(), xs.end()};
}

// A ring of triangles; snapshot i is triangle i, anomalous when i is in `bad`.
struct Ring {
  Graph graph;
  std::vector<Snapshot> corpus;
};

Ring triangle_ring(std::size_t count, const std::set<std::size_t>& bad) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = static_cast<graph::VertexId>(3 * i);
    edges.push_back({b, b + 1});
    edges.push_back({b + 1, b + 2});
    edges.push_back({b, b + 2});
    edges.push_back({b + 2, static_cast<graph::VertexId>((3 * i + 3) % (3 * count))});
  }
  ad::Tensor attrs(ad::Shape{3 * count, 2}, 0.0);
  for (std::size_t v = 0; v < 3 * count; ++v) {
    attrs(v, 0) = bad.count(v / 3) ? 2.0 : 0.1 * static_cast<double>(v % 3);
    attrs(v, 1) = 1.0;
  }
  Ring r{Graph::build(edges, std::move(attrs), false), {}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = static_cast<graph::VertexId>(3 * i);
    Snapshot s = graph::induced_snapshot(r.graph, i, {b, b + 1, b + 2});
    s.label = bad.count(i) ? Label::kAnomalous : Label::kNormal;
    r.corpus.push_back(std::move(s));
  }
  return r;
}

train::TrainConfig tiny_train() {
  train::TrainConfig c;
  c.k = 2;
  c.generator_epochs = 3;
  c.discriminator_epochs = 2;
  return c;
}

model::ArchitectureConfig tiny_arch() {
  model::ArchitectureConfig a;
  a.gcn_channels = {4, 1};
  a.conv1d_channels = {3, 2};
  a.dense_width = 4;
  return a;
}

}  // namespace

TEST_CASE("precision and recall examples") {
  const std::vector<SnapshotId> ranking{1, 2, 3, 4};
  const auto truth = truth_of({{1, true}, {2, false}, {3, true}, {4, false}});
  auto pr = precision_recall_at_k(ranking, truth, 2);
  CHECK(pr.precision == 0.5);
  CHECK(pr.recall == 0.5);
  CHECK(pr.hits == 1);

  const std::vector<SnapshotId> sorted{1, 3, 2, 4};
  pr = precision_recall_at_k(sorted, truth, 2);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);

  pr = precision_recall_at_k(ranking, truth, 4);
  CHECK(pr.recall == 1.0);
  CHECK(pr.precision == 0.5);

  CHECK_THROWS_AS(precision_recall_at_k(ranking, truth_of({{1, false}}), 2), std::invalid_argument);
  CHECK_THROWS_AS(precision_recall_at_k(ranking, truth, 0), std::invalid_argument);
  CHECK_THROWS_AS(precision_recall_at_k(ranking, truth, 5), std::invalid_argument);
}

TEST_CASE("hits identity: precision*K and recall*positives are the same integer") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(30);
    std::vector<SnapshotId> ids(n);
    std::unordered_map<SnapshotId, bool> truth;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ids[i] = 1000 + 7 * i;
      truth[ids[i]] = rng.uniform() < 0.3;
      positives += truth[ids[i]];
    }
    if (positives == 0) {
      truth[ids[0]] = true;
      positives = 1;
    }
    rng.shuffle(std::span<SnapshotId>(ids));
    const std::size_t k = 1 + rng.uniform_index(n);
    const auto pr = precision_recall_at_k(ids, truth, k);
    const double a = pr.precision * static_cast<double>(k);
    const double b = pr.recall * static_cast<double>(positives);
    CHECK(std::abs(a - std::round(a)) < 1e-9);
    CHECK(std::abs(b - std::round(b)) < 1e-9);
    CHECK(std::llround(a) == static_cast<long long>(pr.hits));
    CHECK(std::llround(b) == static_cast<long long>(pr.hits));
  }
}

TEST_CASE("kfold split examples and properties") {
  std::vector<SnapshotId> ten(10);
  for (std::size_t i = 0; i < 10; ++i) ten[i] = i;
  const auto singles = kfold_split(ten, 10, 3);
  REQUIRE(singles.size() == 10);
  for (const auto& f : singles) {
    CHECK(f.test.size() == 1);
    CHECK(f.train.size() == 9);
  }

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const std::size_t folds = 1 + rng.uniform_index(n);
    std::vector<SnapshotId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = 3 * i + 1;
    const auto split = kfold_split(ids, folds, trial);
    REQUIRE(split.size() == folds);
    std::multiset<SnapshotId> covered;
    std::size_t lo = n, hi = 0;
    for (const auto& f : split) {
      covered.insert(f.test.begin(), f.test.end());
      lo = std::min(lo, f.test.size());
      hi = std::max(hi, f.test.size());
      std::set<SnapshotId> test(f.test.begin(), f.test.end());
      CHECK(f.train.size() + f.test.size() == n);
      for (SnapshotId id : f.train) CHECK(test.count(id) == 0);
    }
    CHECK(covered == std::multiset<SnapshotId>(ids.begin(), ids.end()));
    CHECK(hi - lo <= 1);
    const auto again = kfold_split(ids, folds, trial);
    for (std::size_t f = 0; f < folds; ++f) CHECK(again[f].test == split[f].test);
  }

  CHECK_THROWS_AS(kfold_split(ten, 11, 0), std::invalid_argument);
  CHECK_THROWS_AS(kfold_split(ten, 0, 0), std::invalid_argument);
}

TEST_CASE("node score aggregation") {
  CHECK(aggregate_node_scores(std::vector<double>{0.5, 0.5}) == doctest::Approx(-std::log(0.25)).epsilon(1e-15));
  CHECK(aggregate_node_scores(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.3863).epsilon(1e-4));
  CHECK(aggregate_node_scores(std::vector<double>{1.0, 1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(aggregate_node_scores(std::vector<double>{0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_node_scores(std::vector<double>{1.5}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_node_scores(std::vector<double>{-0.1}), std::invalid_argument);
}

TEST_CASE("edge score aggregation") {
  CHECK(aggregate_edge_scores(std::vector<double>{0.25, 1.0}, std::vector<double>{1, 1}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double w : {0.1, 1.0, 7.5}) {
    CHECK(aggregate_edge_scores(std::vector<double>{0.3}, std::vector<double>{w}) ==
          doctest::Approx(-std::log(0.3)).epsilon(1e-14));
  }
  CHECK(aggregate_edge_scores(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(aggregate_edge_scores(std::vector<double>{0.0}, std::vector<double>{1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(aggregate_edge_scores(std::vector<double>{0.5}, std::vector<double>{0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(aggregate_edge_scores(std::vector<double>{0.5}, std::vector<double>{-1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(aggregate_edge_scores(std::vector<double>{}, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(aggregate_edge_scores(std::vector<double>{0.5}, std::vector<double>{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("log-space aggregation matches the naive product") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    std::vector<double> l(n), w(n);
    double product = 1.0, weighted = 1.0, total_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = 0.01 + 0.99 * rng.uniform();
      w[i] = 0.1 + 3.0 * rng.uniform();
      product *= l[i];
      weighted *= std::pow(l[i], w[i]);
      total_w += w[i];
    }
    CHECK(std::abs(aggregate_node_scores(l) - (-std::log(product))) < 1e-9);
    CHECK(std::abs(aggregate_edge_scores(l, w) - (-std::log(std::pow(weighted, 1.0 / total_w)))) <
          1e-9);
  }
}

TEST_CASE("ranking order: score descending, ties by id") {
  const std::vector<SnapshotId> ids{7, 3, 5, 1};
  const std::vector<double> scores{0.5, 0.9, 0.5, 0.5};
  const auto r = rank_by_scores(ids, scores, 4);
  CHECK(r.fold == 4);
  CHECK(r.ids == std::vector<SnapshotId>{3, 1, 5, 7});
  CHECK(r.scores == std::vector<double>{0.9, 0.5, 0.5, 0.5});

  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(20);
    std::vector<SnapshotId> xs(n);
    std::vector<double> ss(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = i;
      ss[i] = static_cast<double>(rng.uniform_index(4));
    }
    const auto rr = rank_by_scores(xs, ss);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(rr.scores[i - 1] >= rr.scores[i]);
      if (rr.scores[i - 1] == rr.scores[i]) CHECK(rr.ids[i - 1] < rr.ids[i]);
    }
  }
}

TEST_CASE("ranker names round trip") {
  for (RankerKind k : {RankerKind::kGan, RankerKind::kDiscOnly, RankerKind::kDegreeSum,
                       RankerKind::kRandom, RankerKind::kOracle}) {
    CHECK(ranker_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(ranker_from_string("best"), std::invalid_argument);
  CHECK(protocol_from_string("cv") == Protocol::kCrossValidation);
  CHECK(protocol_from_string(to_string(Protocol::kTransductive)) == Protocol::kTransductive);
  CHECK_THROWS_AS(protocol_from_string("loo"), std::invalid_argument);
  CHECK(ranker_train_config(RankerKind::kDiscOnly, train::TrainConfig{}).generator_epochs == 0);
}

TEST_CASE("oracle ranker precision is min(1, positives / K)") {
  const auto ring = triangle_ring(20, {1, 4, 9, 13, 17});
  EvalConfig config;
  config.ranker = RankerKind::kOracle;
  config.protocol = Protocol::kTransductive;
  config.ks = {1, 3, 5, 8, 20};
  const auto report = evaluate(ring.graph, ring.corpus, config);
  REQUIRE(report.rows.size() == config.ks.size());
  for (const auto& row : report.rows) {
    CHECK(row.precision == doctest::Approx(std::min(1.0, 5.0 / static_cast<double>(row.k))));
    CHECK(row.recall == doctest::Approx(std::min(1.0, static_cast<double>(row.k) / 5.0)));
  }
}

TEST_CASE("report has one row per fold and K") {
  const auto ring = triangle_ring(12, {0, 5, 7});
  EvalConfig config;
  config.ranker = RankerKind::kDegreeSum;
  config.folds = 4;
  config.ks = {1, 2, 3};
  const auto report = evaluate(ring.graph, ring.corpus, config);
  CHECK(report.rows.size() == 12);
  CHECK(report.rankings.size() == 4);
  CHECK(report.summary.size() == 3);
  std::set<std::pair<std::size_t, std::size_t>> keys;
  for (const auto& row : report.rows) {
    keys.insert({row.fold, row.k});
    CHECK(row.ranked == 3);
    CHECK(row.k_used == std::min<std::size_t>(row.k, 3));
    if (row.positives == 0) CHECK(std::isnan(row.recall));
  }
  CHECK(keys.size() == 12);
  for (const auto& s : report.summary) CHECK(s.folds == 4);
  for (const auto& r : report.rankings) {
    for (std::size_t i = 1; i < r.scores.size(); ++i) CHECK(r.scores[i - 1] >= r.scores[i]);
  }

  const auto csv = metrics_csv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("random ranker precision tracks the positive rate") {
  const std::set<std::size_t> bad{0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  const auto ring = triangle_ring(20, bad);
  EvalConfig config;
  config.ranker = RankerKind::kRandom;
  config.protocol = Protocol::kTransductive;
  config.ks = {5};
  double total = 0;
  const int runs = 2000;
  for (int s = 0; s < runs; ++s) {
    config.seed = s;
    total += evaluate(ring.graph, ring.corpus, config).rows[0].precision;
  }
  // Hypergeometric mean 0.5, sd of one run ~0.23 so the mean's sd is ~0.005.
  CHECK(total / runs == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("metrics are invariant under snapshot id relabeling") {
  const auto ring = triangle_ring(15, {2, 3, 11});
  auto relabeled = ring.corpus;
  // Order-preserving relabel keeps id tie-breaks identical.
  for (auto& s : relabeled) s.id = 500 + 3 * s.id;
  for (RankerKind kind : {RankerKind::kDegreeSum, RankerKind::kOracle, RankerKind::kGan}) {
    EvalConfig config;
    config.ranker = kind;
    config.protocol = Protocol::kTransductive;
    config.ks = {2, 4};
    config.train = tiny_train();
    config.arch = tiny_arch();
    const auto a = evaluate(ring.graph, ring.corpus, config);
    const auto b = evaluate(ring.graph, relabeled, config);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].precision == b.rows[i].precision);
      CHECK(a.rows[i].hits == b.rows[i].hits);
    }
  }
}

TEST_CASE("cross-validation hides the test fold and is deterministic") {
  const auto ring = triangle_ring(10, {1, 6});
  EvalConfig config;
  config.ranker = RankerKind::kGan;
  config.folds = 2;
  config.ks = {2};
  config.train = tiny_train();
  config.arch = tiny_arch();
  const auto a = evaluate(ring.graph, ring.corpus, config);
  const auto b = evaluate(ring.graph, ring.corpus, config);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(metrics_csv(a) == metrics_csv(b));

  config.ranker = RankerKind::kDiscOnly;
  const auto d = evaluate(ring.graph, ring.corpus, config);
  CHECK(d.rows.size() == 2);
}

TEST_CASE("evaluate errors") {
  auto ring = triangle_ring(6, {1});
  EvalConfig config;
  config.ranker = RankerKind::kDegreeSum;
  config.folds = 2;
  auto unlabeled = ring.corpus;
  unlabeled[3].label.reset();
  CHECK_THROWS_AS(evaluate(ring.graph, unlabeled, config), DataError);
  auto clean = triangle_ring(6, {}).corpus;
  CHECK_THROWS_AS(evaluate(ring.graph, clean, config), DataError);
  config.ks = {0};
  CHECK_THROWS_AS(evaluate(ring.graph, ring.corpus, config), std::invalid_argument);
  config.ks = {1};
  config.folds = 7;
  CHECK_THROWS_AS(evaluate(ring.graph, ring.corpus, config), std::invalid_argument);
}

TEST_CASE("report files") {
  const auto ring = triangle_ring(8, {2, 5});
  EvalConfig config;
  config.ranker = RankerKind::kOracle;
  config.folds = 2;
  config.ks = {1, 2};
  const auto report = evaluate(ring.graph, ring.corpus, config);
  const auto dir = std::filesystem::temp_directory_path() / "snapgan_test_eval_report";
  std::filesystem::remove_all(dir);
  write_report(dir, report);
  std::ifstream lines(dir / "report.jsonl");
  std::string line;
  std::size_t folds = 0, summaries = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["ranker"] == "oracle");
    if (j["type"] == "fold") ++folds;
    if (j["type"] == "summary") ++summaries;
  }
  CHECK(folds == 4);
  CHECK(summaries == 2);
  CHECK(std::filesystem::exists(dir / "metrics.csv"));
  std::filesystem::remove_all(dir);
}
