#include "snapgan/train/trainer.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "snapgan/common/errors.hpp"
#include "snapgan/graph/algorithms.hpp"
#include "snapgan/model/serialization.hpp"

namespace snapgan::train {
namespace {

std::vector<const ad::Tensor*> gradients(const ad::Tape& tape, const model::SnapshotScorer& scorer) {
  std::vector<const ad::Tensor*> grads;
  for (const ad::Var& v : scorer.parameter_vars()) grads.push_back(tape.grad(v));
  return grads;
}

void check_finite(const model::ModelParams& params, const std::string& what) {
  if (!params.all_finite()) throw NumericError(what + ": parameters became non-finite");
}

Optimizer make_optimizer(const TrainConfig& c, double lr) {
  return Optimizer(c.optimizer, lr, c.adam_beta1, c.adam_beta2, c.adam_epsilon);
}

}  // namespace

GeneratorStepResult generator_gradient_step(model::ModelParams& theta,
                                            std::span<const graph::Snapshot> pool,
                                            const graph::Graph& graph,
                                            std::shared_ptr<const ad::SparseMatrix> adjacency,
                                            const std::function<double(std::size_t)>& reward,
                                            const TrainConfig& config, Optimizer& optimizer,
                                            Rng& rng) {
  if (config.k > pool.size()) {
    throw std::invalid_argument("K = " + std::to_string(config.k) + " exceeds the pool size " +
                                std::to_string(pool.size()));
  }
  ad::Tape tape;
  model::SnapshotScorer scorer(tape, theta, true);
  scorer.attach_graph(graph, std::move(adjacency));
  ad::Var logits = model::generator_logits(
      scorer, pool, config.generator_dropout ? ad::Mode::kTrain : ad::Mode::kEval, rng);
  const auto probs_t = ad::softmax(logits).value();
  const auto probs = probs_t.values();

  std::vector<double> pool_rewards;
  if (config.expected_reward_baseline) {
    for (std::size_t i = 0; i < probs.size(); ++i) pool_rewards.push_back(reward(i));
  }
  GeneratorStepResult result;
  ad::Var surrogate;
  for (std::size_t b = 0; b < config.generator_sample_batches; ++b) {
    const auto samples = sample_topk(probs, config.k, SampleMode::kSample, rng,
                                     config.sample_with_replacement);
    std::vector<double> rewards;
    for (std::size_t s : samples) rewards.push_back(reward(s));
    std::vector<double> baselines(samples.size(), 0.0);
    if (config.expected_reward_baseline) {
      baselines = expected_draw_baselines(probs, pool_rewards, samples,
                                          config.sample_with_replacement);
    }
    for (double& b : baselines) b += config.reward_baseline;
    ad::Var term = policy_surrogate(logits, samples, rewards, config.sample_with_replacement,
                                    baselines);
    surrogate = b == 0 ? term : ad::add(surrogate, term);
    result.samples.insert(result.samples.end(), samples.begin(), samples.end());
    result.rewards.insert(result.rewards.end(), rewards.begin(), rewards.end());
  }
  if (config.generator_sample_batches > 1) {
    surrogate = ad::scale(surrogate, 1.0 / static_cast<double>(config.generator_sample_batches));
  }
  result.surrogate = surrogate.value().item();
  if (!std::isfinite(result.surrogate)) throw NumericError("generator surrogate is not finite");
  tape.backward(ad::scale(surrogate, -1.0));

  auto params = theta.tensors();
  optimizer.step(params, gradients(tape, scorer));
  check_finite(theta, "generator step");
  return result;
}

GeneratorStepResult generator_gradient_step(model::ModelParams& theta,
                                            const model::ModelParams& phi,
                                            std::span<const graph::Snapshot> pool,
                                            const graph::Graph& graph, const TrainConfig& config,
                                            Optimizer& optimizer, Rng& rng) {
  auto reward = [&](std::size_t i) { return generator_reward(phi, pool[i]); };
  return generator_gradient_step(theta, pool, graph, nullptr, reward, config, optimizer, rng);
}

double discriminator_step(model::ModelParams& phi, std::span<const graph::Snapshot> true_anomalous,
                          std::span<const graph::Snapshot> generated, Optimizer& optimizer,
                          Rng& rng) {
  ad::Tape tape;
  model::SnapshotScorer scorer(tape, phi, true);
  ad::Var loss = discriminator_loss(scorer, true_anomalous, generated, ad::Mode::kTrain, rng);
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw NumericError("discriminator loss is not finite");
  tape.backward(loss);
  auto params = phi.tensors();
  optimizer.step(params, gradients(tape, scorer));
  check_finite(phi, "discriminator step");
  return value;
}

TrainState train(std::span<const graph::Snapshot> pool, const graph::Graph& graph,
                 const TrainConfig& config, const model::ArchitectureConfig& arch,
                 const TrainHooks& hooks) {
  config.validate(pool.size());
  arch.validate();
  std::vector<graph::Snapshot> positives;
  for (const auto& s : pool)
    if (s.label == graph::Label::kAnomalous) positives.push_back(s);
  if (positives.empty()) throw DataError("training pool has no snapshot labeled anomalous");

  Rng root(config.seed);
  Rng init_rng = root.fork(0);
  Rng rng = root.fork(1);
  TrainState state{
      model::ModelParams::initialize(arch, graph.attribute_dim(), model::Head::kGenerator, init_rng),
      model::ModelParams::initialize(arch, graph.attribute_dim(), model::Head::kDiscriminator,
                                     init_rng)};
  Optimizer gen_opt = make_optimizer(config, config.generator_lr);
  Optimizer disc_opt = make_optimizer(config, config.discriminator_lr);
  const auto adjacency =
      std::make_shared<const ad::SparseMatrix>(graph::normalized_adjacency(graph));

  for (std::size_t round = 1; state.generator_epochs < config.generator_epochs ||
                              state.discriminator_epochs < config.discriminator_epochs;
       ++round) {
    if (state.discriminator_epochs < config.discriminator_epochs) {
      // Negatives for this epoch come from the current generator.
      const auto probs = model::generator_distribution(state.generator, pool, graph);
      const auto picks = sample_topk(probs, config.k, SampleMode::kSample, rng,
                                     config.sample_with_replacement);
      std::vector<graph::Snapshot> negatives;
      for (std::size_t i : picks) negatives.push_back(pool[i]);
      double total = 0;
      for (std::size_t s = 0; s < config.discriminator_steps_per_epoch; ++s) {
        total += discriminator_step(state.discriminator, positives, negatives, disc_opt, rng);
      }
      const double loss = total / static_cast<double>(config.discriminator_steps_per_epoch);
      state.discriminator_loss_history.push_back(loss);
      ++state.discriminator_epochs;
      if (hooks.on_epoch) hooks.on_epoch({"discriminator", state.discriminator_epochs, round, loss, 0.0});
    }

    if (state.generator_epochs < config.generator_epochs) {
      // phi is frozen during a generator epoch, so rewards are cached.
      std::vector<std::optional<double>> cache(pool.size());
      auto reward = [&](std::size_t i) {
        if (!cache[i]) cache[i] = generator_reward(state.discriminator, pool[i]);
        return *cache[i];
      };
      double loss_total = 0, reward_total = 0;
      std::size_t reward_count = 0;
      for (std::size_t s = 0; s < config.generator_steps_per_epoch; ++s) {
        const auto step = generator_gradient_step(state.generator, pool, graph, adjacency, reward,
                                                  config, gen_opt, rng);
        loss_total -= step.surrogate;
        for (double r : step.rewards) reward_total += r;
        reward_count += step.rewards.size();
      }
      const double loss = loss_total / static_cast<double>(config.generator_steps_per_epoch);
      const double mean_reward = reward_total / static_cast<double>(reward_count);
      state.generator_loss_history.push_back(loss);
      state.mean_reward_history.push_back(mean_reward);
      ++state.generator_epochs;
      if (hooks.on_epoch) hooks.on_epoch({"generator", state.generator_epochs, round, loss, mean_reward});
    }
    if (hooks.on_round) hooks.on_round(state, round);
  }
  return state;
}

TrainState train_to_directory(std::span<const graph::Snapshot> pool, const graph::Graph& graph,
                              const TrainConfig& config, const model::ArchitectureConfig& arch,
                              const std::filesystem::path& run_dir) {
  std::filesystem::create_directories(run_dir);
  {
    std::ofstream cfg(run_dir / "config.json", std::ios::trunc);
    cfg << nlohmann::json{{"train", to_json(config)}, {"architecture", model::to_json(arch)}}.dump(2)
        << '\n';
  }
  std::ofstream metrics(run_dir / "metrics.jsonl", std::ios::trunc);
  if (!metrics) throw std::runtime_error("cannot write " + (run_dir / "metrics.jsonl").string());

  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochRecord& r) {
    nlohmann::json line{{"player", r.player}, {"epoch", r.epoch}, {"round", r.round}, {"loss", r.loss}};
    if (r.player == "generator") line["mean_reward"] = r.mean_reward;
    metrics << line.dump() << '\n';
  };
  hooks.on_round = [&](const TrainState& state, std::size_t round) {
    if (config.checkpoint_every == 0 || round % config.checkpoint_every != 0) return;
    const auto dir = run_dir / "checkpoints" / ("round_" + std::to_string(round));
    std::filesystem::create_directories(dir);
    model::save_model(dir / "generator.ckpt", state.generator);
    model::save_model(dir / "discriminator.ckpt", state.discriminator);
  };
  TrainState state = train(pool, graph, config, arch, hooks);
  model::save_model(run_dir / "generator.ckpt", state.generator);
  model::save_model(run_dir / "discriminator.ckpt", state.discriminator);
  return state;
}

}  // namespace snapgan::train
