#include "snapgan/train/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "snapgan/common/errors.hpp"

namespace snapgan::train {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

void TrainConfig::validate(std::size_t pool_size) const {
  if (k < 1) throw std::invalid_argument("K must be at least 1");
  if (pool_size > 0 && k > pool_size) {
    throw std::invalid_argument("K = " + std::to_string(k) + " exceeds the pool size " +
                                std::to_string(pool_size));
  }
  if (!(generator_lr > 0) || !(discriminator_lr > 0) || !std::isfinite(generator_lr) ||
      !std::isfinite(discriminator_lr)) {
    throw std::invalid_argument("learning rates must be positive and finite");
  }
  if (generator_steps_per_epoch < 1 || discriminator_steps_per_epoch < 1) {
    throw std::invalid_argument("steps per epoch must be at least 1");
  }
  if (generator_sample_batches < 1) throw std::invalid_argument("sample batches must be at least 1");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (!std::isfinite(reward_baseline)) throw std::invalid_argument("reward baseline must be finite");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"k", c.k},
          {"generator_epochs", c.generator_epochs},
          {"discriminator_epochs", c.discriminator_epochs},
          {"generator_steps_per_epoch", c.generator_steps_per_epoch},
          {"discriminator_steps_per_epoch", c.discriminator_steps_per_epoch},
          {"generator_sample_batches", c.generator_sample_batches},
          {"generator_lr", c.generator_lr},
          {"discriminator_lr", c.discriminator_lr},
          {"optimizer", to_string(c.optimizer)},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"seed", c.seed},
          {"sample_with_replacement", c.sample_with_replacement},
          {"reward_baseline", c.reward_baseline},
          {"expected_reward_baseline", c.expected_reward_baseline},
          {"generator_dropout", c.generator_dropout},
          {"checkpoint_every", c.checkpoint_every}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("train config must be an object");
  const nlohmann::json defaults = to_json(TrainConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw DataError("unknown train config key '" + key + "'");
  }
  TrainConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("k", c.k);
    get("generator_epochs", c.generator_epochs);
    get("discriminator_epochs", c.discriminator_epochs);
    get("generator_steps_per_epoch", c.generator_steps_per_epoch);
    get("discriminator_steps_per_epoch", c.discriminator_steps_per_epoch);
    get("generator_sample_batches", c.generator_sample_batches);
    get("generator_lr", c.generator_lr);
    get("discriminator_lr", c.discriminator_lr);
    if (j.contains("optimizer")) c.optimizer = optimizer_from_string(j["optimizer"].get<std::string>());
    get("adam_beta1", c.adam_beta1);
    get("adam_beta2", c.adam_beta2);
    get("adam_epsilon", c.adam_epsilon);
    get("seed", c.seed);
    get("sample_with_replacement", c.sample_with_replacement);
    get("reward_baseline", c.reward_baseline);
    get("expected_reward_baseline", c.expected_reward_baseline);
    get("generator_dropout", c.generator_dropout);
    get("checkpoint_every", c.checkpoint_every);
    c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("train config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("train config: ") + e.what());
  }
  return c;
}

}  // namespace snapgan::train
