#include "snapgan/model/gradcheck_cases.hpp"

#include <memory>

#include "snapgan/graph/snapshot.hpp"
#include "snapgan/model/scorer.hpp"

namespace snapgan::model {
namespace {

ArchitectureConfig small_arch(bool fixed) {
  ArchitectureConfig arch;
  arch.gcn_channels = {5, 4, 1};
  arch.conv1d_channels = {4, 3};
  arch.conv1d_kernel_sizes = {2, 2};
  arch.dense_width = 6;
  if (fixed) arch.fixed_k = 5;
  return arch;
}

struct Instance {
  ModelParams params;
  std::shared_ptr<graph::Graph> graph;
  graph::Snapshot snapshot;
};

Instance draw_instance(Rng& rng, const ArchitectureConfig& arch, Head head) {
  constexpr std::size_t kDim = 3;
  const std::size_t n = 4 + rng.uniform_index(5);
  std::vector<graph::Edge> edges;
  for (graph::VertexId u = 0; u < n; ++u)
    for (graph::VertexId v = u + 1; v < n; ++v)
      if (rng.bernoulli(0.5)) edges.push_back({u, v, rng.uniform(0.5, 2.0)});
  Tensor attrs(ad::Shape{n, kDim});
  for (double& x : attrs.values()) x = rng.uniform(-1, 1);
  auto g = std::make_shared<graph::Graph>(graph::Graph::build(edges, attrs, false));

  std::vector<graph::VertexId> members;
  for (graph::VertexId v = 0; v < n; ++v)
    if (members.size() < 3 || rng.bernoulli(0.6)) members.push_back(v);
  rng.shuffle(std::span<graph::VertexId>(members));

  Instance inst{ModelParams::initialize(arch, kDim, head, rng), g,
                graph::induced_snapshot(*g, 0, members)};
  // Nonzero biases so those paths are exercised too.
  for (auto& b : inst.params.conv_biases)
    for (double& x : b.values()) x = rng.uniform(-0.2, 0.2);
  for (double& x : inst.params.dense_bias.values()) x = rng.uniform(-0.2, 0.2);
  return inst;
}

ad::GradCheckCase make_case(std::string name, bool fixed, AdjacencySource source) {
  auto state = std::make_shared<Instance>();
  const Head head = source == AdjacencySource::kGlobal ? Head::kGenerator : Head::kDiscriminator;
  ad::GradCheckCase c;
  c.name = std::move(name);
  c.make_inputs = [state, fixed, head](Rng& rng) {
    *state = draw_instance(rng, small_arch(fixed), head);
    std::vector<Tensor> inputs;
    for (const Tensor* t : state->params.tensors()) inputs.push_back(*t);
    return inputs;
  };
  c.fn = [state, source](ad::Tape& tape, std::span<const ad::Var> inputs) {
    SnapshotScorer scorer(tape, state->params, std::vector<ad::Var>(inputs.begin(), inputs.end()));
    if (source == AdjacencySource::kGlobal) scorer.attach_graph(*state->graph);
    Rng unused(0);
    return scorer.score(state->snapshot, source, ad::Mode::kEval, unused);
  };
  return c;
}

}  // namespace

std::vector<ad::GradCheckCase> scorer_gradcheck_cases() {
  return {make_case("scorer_snapshot", false, AdjacencySource::kSnapshot),
          make_case("scorer_global", false, AdjacencySource::kGlobal),
          make_case("scorer_fixed_k", true, AdjacencySource::kSnapshot)};
}

}  // namespace snapgan::model
