#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snapgan/autodiff/ops.hpp"
#include "snapgan/model/scorer.hpp"

namespace snapgan::train {

// -(mean log sigma(f_pos) + mean log(1 - sigma(f_neg))) for discriminator
// scores already on a tape (rank-0 vars). Throws for an empty set.
ad::Var discriminator_loss(std::span<const ad::Var> true_scores,
                           std::span<const ad::Var> generated_scores);

// Scores both sets with `scorer` on their own adjacency and returns the loss.
ad::Var discriminator_loss(model::SnapshotScorer& scorer,
                           std::span<const graph::Snapshot> true_anomalous,
                           std::span<const graph::Snapshot> generated, ad::Mode mode, Rng& rng);

// log(1 + exp(f_phi(g))) in eval mode.
double generator_reward(const model::ModelParams& phi, const graph::Snapshot& snapshot);

enum class SampleMode { kSample, kArgmax };

// kArgmax: the K most probable indices (ties by index ascending).
// kSample: K sequential draws, each from the distribution renormalized over
// indices not drawn yet, or from the full distribution when
// `with_replacement`. Throws std::invalid_argument when K exceeds the
// length and snapgan::NumericError for NaN or negative entries.
std::vector<std::size_t> sample_topk(std::span<const double> distribution, std::size_t k,
                                     SampleMode mode, Rng& rng, bool with_replacement = false);

// Policy-gradient surrogate whose gradient is the score-function estimate
//   (1/K) sum_k (r_k - b) * grad log P(draw k),
// where P(draw k) is the probability of the draw sequence up to k (product of
// the sequential renormalized draw probabilities; just p(g_k) with
// replacement). With K = 1 or replacement this is exactly the plain
// per-sample estimator. `logits` is the rank-1 generator output over the pool.
ad::Var policy_surrogate(const ad::Var& logits, std::span<const std::size_t> samples,
                         std::span<const double> rewards, bool with_replacement,
                         double baseline = 0.0);

// Same estimator with a baseline c_j per draw, which must be a function of
// the draws before j to keep it unbiased. Draw j is credited with
// sum_{k >= j} r_k - (K - j) c_j (r_j - c_j with replacement).
ad::Var policy_surrogate(const ad::Var& logits, std::span<const std::size_t> samples,
                         std::span<const double> rewards, bool with_replacement,
                         std::span<const double> draw_baselines);

// c_j = expected reward of draw j given the earlier draws: the reward mean
// under `distribution` restricted to the not-yet-drawn entries (the full
// distribution with replacement).
std::vector<double> expected_draw_baselines(std::span<const double> distribution,
                                            std::span<const double> pool_rewards,
                                            std::span<const std::size_t> samples,
                                            bool with_replacement);

}  // namespace snapgan::train
