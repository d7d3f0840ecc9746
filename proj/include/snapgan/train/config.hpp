#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace snapgan::train {

enum class OptimizerKind { kAdam, kSgd };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct TrainConfig {
  // Snapshots drawn from the generator per step (policy-gradient sample
  // count and discriminator negatives per epoch).
  std::size_t k = 10;
  std::size_t generator_epochs = 100;
  std::size_t discriminator_epochs = 60;
  std::size_t generator_steps_per_epoch = 1;
  std::size_t discriminator_steps_per_epoch = 4;
  // Independent K-draws averaged into one generator gradient.
  std::size_t generator_sample_batches = 16;
  double generator_lr = 1e-3;
  double discriminator_lr = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool sample_with_replacement = false;
  // Subtracted from every reward in the policy-gradient estimator.
  double reward_baseline = 0.0;
  // Also subtract, per draw, the expected reward of that draw given the
  // earlier ones (reward mean over the not-yet-drawn part of the pool).
  bool expected_reward_baseline = true;
  // Run the generator's policy-gradient forward pass with dropout active.
  bool generator_dropout = false;
  // Write a checkpoint every this many rounds when a run directory is used
  // (0 disables periodic checkpoints; the final one is always written).
  std::size_t checkpoint_every = 0;

  // Throws std::invalid_argument. pool_size 0 skips the K <= |pool| check.
  void validate(std::size_t pool_size = 0) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json to_json(const TrainConfig& config);
// Missing keys keep defaults; unknown keys throw snapgan::DataError.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace snapgan::train
