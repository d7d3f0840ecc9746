#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <tuple>

#include "snapgan/common/errors.hpp"
#include "snapgan/graph/algorithms.hpp"
#include "snapgan/model/gradcheck_cases.hpp"
#include "snapgan/model/layers.hpp"
#include "snapgan/model/scorer.hpp"
#include "snapgan/model/serialization.hpp"

using namespace snapgan;
using namespace snapgan::model;
using graph::Edge;
using graph::Graph;
using graph::Snapshot;
using graph::VertexId;

namespace {

ArchitectureConfig tiny_arch() {
  ArchitectureConfig arch;
  arch.gcn_channels = {6, 4, 1};
  arch.conv1d_channels = {4, 3};
  arch.dense_width = 5;
  return arch;
}

Graph random_graph(Rng& rng, std::size_t n, std::size_t d, double p) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.push_back({u, v, 1.0});
  ad::Tensor attrs(ad::Shape{n, d});
  for (double& x : attrs.values()) x = rng.uniform(-1, 1);
  return Graph::build(edges, attrs, false);
}

// Reorders V_t (with its attribute rows) and E_t by the given permutations.
Snapshot reorder(const Snapshot& s, const std::vector<std::size_t>& vperm,
                 const std::vector<std::size_t>& eperm) {
  Snapshot out = s;
  out.attributes = ad::Tensor(s.attributes.shape());
  for (std::size_t i = 0; i < vperm.size(); ++i) {
    out.vertices[i] = s.vertices[vperm[i]];
    const auto src = s.attributes.row(vperm[i]);
    std::copy(src.begin(), src.end(), out.attributes.row(i).begin());
  }
  for (std::size_t i = 0; i < eperm.size(); ++i) out.edges[i] = s.edges[eperm[i]];
  return out;
}

}  // namespace

TEST_CASE("gcn_forward examples") {
  ad::Tape tape;
  auto one = std::make_shared<const ad::SparseMatrix>(
      ad::SparseMatrix::from_entries(1, 1, {{0, 0, 1.0}}));
  ad::Var out = gcn_forward(tape.constant(ad::Tensor::matrix({{1, 0}, {0, 1}})), one,
                            tape.constant(ad::Tensor::matrix({{-2, 3}})));
  CHECK(out.value() == ad::Tensor::matrix({{0, 3}}));

  // Dense oracle for a single unit edge: D^-1/2 (A+I) D^-1/2 = [[.5,.5],[.5,.5]].
  Graph g = Graph::build({{0, 1, 1.0}}, ad::Tensor::matrix({{2}, {4}}), false);
  auto a = std::make_shared<const ad::SparseMatrix>(graph::normalized_adjacency(g));
  ad::Var z = gcn_forward(tape.constant(ad::Tensor::matrix({{1}})), a,
                          tape.constant(g.attributes()));
  CHECK(z.value()(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(z.value()(1, 0) == doctest::Approx(3.0).epsilon(1e-15));

  CHECK_THROWS_AS(gcn_forward(tape.constant(ad::Tensor::matrix({{1, 0}, {0, 1}})), a,
                              tape.constant(g.attributes())),
                  std::invalid_argument);
}

TEST_CASE("degpool examples") {
  ad::Tape tape;
  SUBCASE("padding") {
    ad::Var z = tape.constant(ad::Tensor::matrix({{1, 2}, {3, 4}}));
    const std::vector<std::size_t> deg{1, 2};
    ad::Var p = degpool(z, deg, 4);
    CHECK(p.value() == ad::Tensor::matrix({{3, 4}, {1, 2}, {0, 0}, {0, 0}}));
  }
  SUBCASE("pure degree order") {
    ad::Var z = tape.constant(ad::Tensor::matrix({{0}, {1}, {2}}));
    const std::vector<std::size_t> deg{1, 5, 3};
    CHECK(degpool(z, deg, 3).value() == ad::Tensor::matrix({{1}, {2}, {0}}));
  }
  SUBCASE("tie on degree broken by last channel") {
    ad::Var z = tape.constant(ad::Tensor::matrix({{7, 0.1}, {-7, 0.9}}));
    const std::vector<std::size_t> deg{2, 2};
    CHECK(degpool(z, deg, 1).value() == ad::Tensor::matrix({{-7, 0.9}}));
  }
  SUBCASE("seven vertices pooled to three") {
    // Degrees 3,1,4,1,5,2,4; the two degree-4 rows tie on the last channel
    // and are separated by the one before it.
    ad::Var z = tape.constant(ad::Tensor::matrix(
        {{0, 0, 1}, {1, 1, 1}, {2, 0.2, 0.5}, {3, 3, 3}, {4, 4, 0}, {5, 5, 5}, {6, 0.7, 0.5}}));
    const std::vector<std::size_t> deg{3, 1, 4, 1, 5, 2, 4};
    CHECK(degpool(z, deg, 3).value() ==
          ad::Tensor::matrix({{4, 4, 0}, {6, 0.7, 0.5}, {2, 0.2, 0.5}}));
  }
  SUBCASE("k below one") {
    ad::Var z = tape.constant(ad::Tensor::matrix({{1}}));
    const std::vector<std::size_t> deg{0};
    CHECK_THROWS_AS(degpool(z, deg, 0), std::invalid_argument);
  }
}

TEST_CASE("degpool matches a brute-force comparator over all presentations") {
  Rng rng(5);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(5);
    const std::size_t c = 1 + rng.uniform_index(3);
    const std::size_t k = 1 + rng.uniform_index(7);
    // Small value alphabets force frequent ties at every level.
    ad::Tensor feats(ad::Shape{n, c});
    for (double& x : feats.values()) x = static_cast<double>(rng.uniform_index(2));
    std::vector<std::size_t> deg(n);
    for (auto& d : deg) d = rng.uniform_index(3);
    std::vector<VertexId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<VertexId>(10 * i + rng.uniform_index(10));

    // Oracle: the unique ordering of vertex ids whose key sequence is
    // non-decreasing, found by scanning every permutation.
    auto key = [&](std::size_t i) {
      std::vector<double> kv{-static_cast<double>(deg[i])};
      for (std::size_t ch = c; ch-- > 0;) kv.push_back(-feats(i, ch));
      kv.push_back(ids[i]);
      return kv;
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> expected;
    int sorted_count = 0;
    do {
      bool ok = true;
      for (std::size_t i = 0; i + 1 < n; ++i) ok = ok && key(perm[i]) < key(perm[i + 1]);
      if (ok) {
        expected = perm;
        ++sorted_count;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(sorted_count == 1);

    ad::Tensor want(ad::Shape{k, c}, 0.0);
    for (std::size_t r = 0; r < std::min(k, n); ++r)
      for (std::size_t ch = 0; ch < c; ++ch) want(r, ch) = feats(expected[r], ch);

    // Every presentation order of the same rows must give the same output.
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      ad::Tensor f(ad::Shape{n, c});
      std::vector<std::size_t> d(n);
      std::vector<VertexId> t(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < c; ++ch) f(i, ch) = feats(perm[i], ch);
        d[i] = deg[perm[i]];
        t[i] = ids[perm[i]];
      }
      ad::Tape tape;
      ad::Var out = degpool(tape.constant(f), d, k, t);
      REQUIRE(out.value().shape() == ad::Shape{k, c});
      CHECK(out.value() == want);
      for (std::size_t r = n; r < k; ++r)
        for (std::size_t ch = 0; ch < c; ++ch) CHECK(out.value()(r, ch) == 0.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("architecture sizing") {
  ArchitectureConfig arch;
  CHECK_NOTHROW(arch.validate());
  CHECK(arch.concat_channels() == 225);
  CHECK(arch.min_pool_rows() == 3);
  CHECK(arch.pool_rows(10) == 7);
  CHECK(arch.pool_rows(100) == 70);
  CHECK(arch.pool_rows(11) == 8);
  CHECK(arch.pool_rows(1) == 3);
  arch.degpool_k_fraction = 0.0;
  CHECK_THROWS_AS(arch.validate(), std::invalid_argument);
  arch = {};
  arch.dropout_rate = 1.0;
  CHECK_THROWS_AS(arch.validate(), std::invalid_argument);
  arch = {};
  arch.gcn_channels = {4, 0};
  CHECK_THROWS_AS(arch.validate(), std::invalid_argument);
}

TEST_CASE("zero parameters give a zero score") {
  Rng rng(2);
  Graph g = random_graph(rng, 9, 4, 0.4);
  for (Head head : {Head::kDiscriminator, Head::kGenerator}) {
    ModelParams p = ModelParams::zeros(ArchitectureConfig{}, 4, head);
    Snapshot s = graph::induced_snapshot(g, 1, {0, 3, 4, 8});
    CHECK(score_value(p, s, AdjacencySource::kSnapshot) == 0.0);
    CHECK(score_value(p, s, AdjacencySource::kGlobal, &g) == 0.0);
  }
}

TEST_CASE("scoring is deterministic in eval mode") {
  Rng rng(3);
  Graph g = random_graph(rng, 12, 3, 0.3);
  ModelParams p = ModelParams::initialize(ArchitectureConfig{}, 3, Head::kDiscriminator, rng);
  Snapshot s = graph::induced_snapshot(g, 0, {1, 2, 5, 7, 9});
  const double a = score_value(p, s, AdjacencySource::kSnapshot);
  const double b = score_value(p, s, AdjacencySource::kSnapshot);
  CHECK(a == b);
  CHECK(std::isfinite(a));

  // Train mode with equal seeds also repeats exactly.
  auto train_score = [&](std::uint64_t seed) {
    ad::Tape tape;
    SnapshotScorer scorer(tape, p, true);
    Rng r(seed);
    return scorer.score(s, AdjacencySource::kSnapshot, ad::Mode::kTrain, r).value().item();
  };
  CHECK(train_score(9) == train_score(9));
}

TEST_CASE("score is invariant to vertex and edge listing order") {
  Rng rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    Graph g = random_graph(rng, 8, 3, 0.6);
    ModelParams disc = ModelParams::initialize(tiny_arch(), 3, Head::kDiscriminator, rng);
    ModelParams gen = ModelParams::initialize(tiny_arch(), 3, Head::kGenerator, rng);
    const std::size_t n = 3 + trial % 2;
    std::vector<VertexId> members;
    while (members.size() < n) {
      VertexId v = static_cast<VertexId>(rng.uniform_index(8));
      if (std::find(members.begin(), members.end(), v) == members.end()) members.push_back(v);
    }
    Snapshot s = graph::induced_snapshot(g, 0, members);
    const double ref_disc = score_value(disc, s, AdjacencySource::kSnapshot);
    const double ref_gen = score_value(gen, s, AdjacencySource::kGlobal, &g);

    std::vector<std::size_t> vperm(n);
    std::iota(vperm.begin(), vperm.end(), std::size_t{0});
    std::vector<std::size_t> eperm(s.edges.size());
    std::iota(eperm.begin(), eperm.end(), std::size_t{0});
    std::size_t checked = 0;
    do {
      std::reverse(eperm.begin(), eperm.end());
      Snapshot r = reorder(s, vperm, eperm);
      CHECK(score_value(disc, r, AdjacencySource::kSnapshot) == ref_disc);
      CHECK(score_value(gen, r, AdjacencySource::kGlobal, &g) == ref_gen);
      ++checked;
    } while (std::next_permutation(vperm.begin(), vperm.end()));
    CHECK(checked == (n == 3 ? 6u : 24u));

    // Exhaustive edge orderings for the vertex order as given.
    std::sort(eperm.begin(), eperm.end());
    if (eperm.size() <= 5) {
      do {
        CHECK(score_value(disc, reorder(s, vperm, eperm), AdjacencySource::kSnapshot) == ref_disc);
      } while (std::next_permutation(eperm.begin(), eperm.end()));
    }
  }
}

TEST_CASE("scorer gradients match finite differences") {
  const auto cases = scorer_gradcheck_cases();
  ad::GradCheckOptions options;
  options.skip_nonsmooth = true;
  const auto reports = ad::run_gradcheck_cases(cases, 100, 77, options);
  for (const auto& r : reports) {
    INFO(r.name << " worst relative error " << r.worst_rel_error << ", skipped "
                << r.entries_skipped << " of " << r.entries_checked + r.entries_skipped);
    CHECK(r.passed);
    CHECK(r.entries_checked > 10000);
  }
}

TEST_CASE("scorer input errors") {
  Rng rng(6);
  Graph g = random_graph(rng, 6, 3, 0.5);
  ModelParams p = ModelParams::initialize(tiny_arch(), 4, Head::kGenerator, rng);
  Snapshot s = graph::induced_snapshot(g, 0, {0, 1, 2});
  CHECK_THROWS_AS(score_value(p, s, AdjacencySource::kSnapshot), std::invalid_argument);
  ModelParams q = ModelParams::initialize(tiny_arch(), 3, Head::kGenerator, rng);
  ad::Tape tape;
  SnapshotScorer scorer(tape, q, false);
  Rng r(0);
  CHECK_THROWS_AS(scorer.score(s, AdjacencySource::kGlobal, ad::Mode::kEval, r),
                  std::invalid_argument);
  Snapshot empty;
  empty.attributes = ad::Tensor(ad::Shape{0, 3});
  CHECK_THROWS_AS(scorer.score(empty, AdjacencySource::kSnapshot, ad::Mode::kEval, r),
                  std::invalid_argument);
}

TEST_CASE("discriminator probability") {
  Rng rng(7);
  Graph g = random_graph(rng, 5, 2, 0.5);
  Snapshot s = graph::induced_snapshot(g, 0, {0, 1, 2, 3});
  ModelParams p = ModelParams::zeros(tiny_arch(), 2, Head::kDiscriminator);
  CHECK(discriminator_probability(p, s) == 0.5);
  p.out_bias[0] = std::log(3.0);
  CHECK(discriminator_probability(p, s) == doctest::Approx(0.75).epsilon(1e-15));
  p.head = Head::kGenerator;
  CHECK_THROWS_AS(discriminator_probability(p, s), std::invalid_argument);
}

TEST_CASE("generator distribution") {
  Rng rng(8);
  // Two disjoint triangles with identical attributes are indistinguishable.
  std::vector<Edge> edges{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {6, 7}};
  ad::Tensor attrs(ad::Shape{8, 2});
  for (std::size_t v = 0; v < 8; ++v) {
    attrs(v, 0) = v < 6 ? 0.5 : rng.uniform(-1, 1);
    attrs(v, 1) = v < 6 ? -0.25 : rng.uniform(-1, 1);
  }
  Graph g = Graph::build(edges, attrs, false);
  ModelParams p = ModelParams::initialize(tiny_arch(), 2, Head::kGenerator, rng);

  std::vector<Snapshot> one{graph::induced_snapshot(g, 0, {6, 7})};
  CHECK(generator_distribution(p, one, g) == std::vector<double>{1.0});

  std::vector<Snapshot> twins{graph::induced_snapshot(g, 0, {0, 1, 2}),
                              graph::induced_snapshot(g, 1, {3, 4, 5})};
  const auto half = generator_distribution(p, twins, g);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(generator_distribution(p, std::span<const Snapshot>{}, g),
                  std::invalid_argument);
  ModelParams d = p;
  d.head = Head::kDiscriminator;
  CHECK_THROWS_AS(generator_distribution(d, twins, g), std::invalid_argument);
}

TEST_CASE("generator distribution sums to one and ignores a score offset") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(rng, 15, 3, 0.3);
    ModelParams p = ModelParams::initialize(tiny_arch(), 3, Head::kGenerator, rng);
    std::vector<Snapshot> pool;
    const std::size_t m = 1 + rng.uniform_index(8);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<VertexId> vs;
      for (VertexId v = 0; v < 15; ++v)
        if (rng.bernoulli(0.3)) vs.push_back(v);
      if (vs.empty()) vs.push_back(0);
      pool.push_back(graph::induced_snapshot(g, i, vs));
    }
    const auto probs = generator_distribution(p, pool, g);
    double total = 0;
    for (double x : probs) {
      CHECK(x > 0.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);

    // The output bias adds the same constant to every logit.
    ModelParams shifted = p;
    shifted.out_bias[0] += rng.uniform(-5, 5);
    const auto again = generator_distribution(shifted, pool, g);
    for (std::size_t i = 0; i < m; ++i) CHECK(again[i] == doctest::Approx(probs[i]).epsilon(1e-12));
  }
}

TEST_CASE("fixed k flattens the conv output") {
  Rng rng(10);
  ArchitectureConfig arch = tiny_arch();
  arch.fixed_k = 6;
  CHECK(arch.dense_input_dim() == 4 * 3);
  Graph g = random_graph(rng, 10, 3, 0.4);
  ModelParams p = ModelParams::initialize(arch, 3, Head::kDiscriminator, rng);
  CHECK(p.dense_weight.shape() == ad::Shape{12, 5});
  for (std::vector<VertexId> vs : {std::vector<VertexId>{0, 1}, std::vector<VertexId>{0, 1, 2, 3, 4, 5, 6, 7, 8}}) {
    CHECK(std::isfinite(score_value(p, graph::induced_snapshot(g, 0, vs), AdjacencySource::kSnapshot)));
  }
}

TEST_CASE("model checkpoint round trip") {
  Rng rng(11);
  ArchitectureConfig arch = tiny_arch();
  arch.fixed_k = 4;
  arch.dropout_rate = 0.1;
  ModelParams p = ModelParams::initialize(arch, 3, Head::kGenerator, rng);
  const auto dir = std::filesystem::temp_directory_path() / "snapgan_test_model";
  std::filesystem::create_directories(dir);
  const auto path = dir / "gen.ckpt";
  save_model(path, p);
  ModelParams q = load_model(path);
  CHECK(q.head == Head::kGenerator);
  CHECK(q.arch == arch);
  CHECK(q.input_dim == 3);
  const auto a = p.tensors();
  const auto b = q.tensors();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);

  // A checkpoint that does not match its sidecar architecture is rejected.
  ModelParams other = ModelParams::initialize(tiny_arch(), 3, Head::kGenerator, rng);
  save_model(dir / "other.ckpt", other);
  std::filesystem::copy_file(dir / "gen.ckpt.json", dir / "other.ckpt.json",
                             std::filesystem::copy_options::overwrite_existing);
  CHECK_THROWS_AS(load_model(dir / "other.ckpt"), DataError);
  CHECK_THROWS_AS(load_model(dir / "missing.ckpt"), DataError);
  CHECK_THROWS_AS(architecture_from_json(nlohmann::json{{"bogus", 1}}), DataError);
  std::filesystem::remove_all(dir);
}
