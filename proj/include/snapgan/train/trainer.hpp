#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "snapgan/model/architecture.hpp"
#include "snapgan/train/config.hpp"
#include "snapgan/train/objectives.hpp"
#include "snapgan/train/optimizer.hpp"

namespace snapgan::train {

struct TrainState {
  model::ModelParams generator;      // theta
  model::ModelParams discriminator;  // phi
  std::size_t generator_epochs = 0;
  std::size_t discriminator_epochs = 0;
  std::vector<double> generator_loss_history;      // one per generator epoch
  std::vector<double> mean_reward_history;         // one per generator epoch
  std::vector<double> discriminator_loss_history;  // one per discriminator epoch
};

struct EpochRecord {
  std::string player;  // "generator" or "discriminator"
  std::size_t epoch = 0;
  std::size_t round = 0;
  double loss = 0.0;
  // Generator epochs only: mean reward of the sampled snapshots.
  double mean_reward = 0.0;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  // Called after each alternation round (one epoch per player with budget left).
  std::function<void(const TrainState&, std::size_t round)> on_round;
};

struct GeneratorStepResult {
  std::vector<std::size_t> samples;
  std::vector<double> rewards;
  double surrogate = 0.0;
};

// One policy-gradient update of theta: K draws from the generator over the
// pool, rewards from `reward(pool_index)`, one optimizer step ascending the
// surrogate. Throws NumericError when the distribution or update is not
// finite and std::invalid_argument when K exceeds the pool.
GeneratorStepResult generator_gradient_step(model::ModelParams& theta,
                                            std::span<const graph::Snapshot> pool,
                                            const graph::Graph& graph,
                                            std::shared_ptr<const ad::SparseMatrix> adjacency,
                                            const std::function<double(std::size_t)>& reward,
                                            const TrainConfig& config, Optimizer& optimizer,
                                            Rng& rng);

// Convenience overload with rewards from phi and a fresh adjacency.
GeneratorStepResult generator_gradient_step(model::ModelParams& theta,
                                            const model::ModelParams& phi,
                                            std::span<const graph::Snapshot> pool,
                                            const graph::Graph& graph, const TrainConfig& config,
                                            Optimizer& optimizer, Rng& rng);

// One descent step on the discriminator loss; returns the loss before the step.
double discriminator_step(model::ModelParams& phi, std::span<const graph::Snapshot> true_anomalous,
                          std::span<const graph::Snapshot> generated, Optimizer& optimizer,
                          Rng& rng);

// Alternates one discriminator epoch and one generator epoch until both
// epoch budgets are spent. p_true is the set of pool snapshots labeled
// anomalous; unlabeled snapshots only enter as generator candidates.
// Throws snapgan::DataError without anomalous labels and NumericError on
// NaN/Inf losses or parameters.
TrainState train(std::span<const graph::Snapshot> pool, const graph::Graph& graph,
                 const TrainConfig& config, const model::ArchitectureConfig& arch,
                 const TrainHooks& hooks = {});

// train() plus a run directory: config.json, metrics.jsonl (one line per
// epoch), checkpoints/round_<r>/ every checkpoint_every rounds, and the final
// generator.ckpt / discriminator.ckpt with their sidecars.
TrainState train_to_directory(std::span<const graph::Snapshot> pool, const graph::Graph& graph,
                              const TrainConfig& config, const model::ArchitectureConfig& arch,
                              const std::filesystem::path& run_dir);

}  // namespace snapgan::train
