#include "snapgan/train/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "snapgan/common/errors.hpp"

namespace snapgan::train {

ad::Var discriminator_loss(std::span<const ad::Var> true_scores,
                           std::span<const ad::Var> generated_scores) {
  if (true_scores.empty() || generated_scores.empty()) {
    throw std::invalid_argument("discriminator loss needs true and generated samples");
  }
  ad::Var pos = ad::mean(ad::log_sigmoid(ad::stack_scalars(true_scores)));
  ad::Var neg = ad::mean(ad::log_sigmoid(ad::scale(ad::stack_scalars(generated_scores), -1.0)));
  return ad::scale(ad::add(pos, neg), -1.0);
}

ad::Var discriminator_loss(model::SnapshotScorer& scorer,
                           std::span<const graph::Snapshot> true_anomalous,
                           std::span<const graph::Snapshot> generated, ad::Mode mode, Rng& rng) {
  if (true_anomalous.empty() || generated.empty()) {
    throw std::invalid_argument("discriminator loss needs true and generated samples");
  }
  std::vector<ad::Var> pos, neg;
  for (const auto& s : true_anomalous) {
    pos.push_back(scorer.score(s, model::AdjacencySource::kSnapshot, mode, rng));
  }
  for (const auto& s : generated) {
    neg.push_back(scorer.score(s, model::AdjacencySource::kSnapshot, mode, rng));
  }
  return discriminator_loss(pos, neg);
}

double generator_reward(const model::ModelParams& phi, const graph::Snapshot& snapshot) {
  if (phi.head != model::Head::kDiscriminator) {
    throw std::invalid_argument("rewards come from discriminator-head parameters");
  }
  return ad::softplus(model::score_value(phi, snapshot, model::AdjacencySource::kSnapshot));
}

std::vector<std::size_t> sample_topk(std::span<const double> distribution, std::size_t k,
                                     SampleMode mode, Rng& rng, bool with_replacement) {
  const std::size_t n = distribution.size();
  if (k > n) {
    throw std::invalid_argument("cannot take " + std::to_string(k) + " of " + std::to_string(n) +
                                " snapshots");
  }
  for (double p : distribution) {
    if (!std::isfinite(p) || p < 0) throw NumericError("degenerate generator distribution");
  }
  std::vector<std::size_t> out;
  out.reserve(k);
  if (mode == SampleMode::kArgmax) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distribution[a] > distribution[b]; });
    out.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
  }

  std::vector<bool> taken(n, false);
  for (std::size_t draw = 0; draw < k; ++draw) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) total += distribution[i];
    std::size_t pick = n;
    if (total > 0) {
      const double u = rng.uniform() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || distribution[i] <= 0) continue;
        acc += distribution[i];
        pick = i;
        if (u < acc) break;
      }
    } else {
      // Remaining mass is zero: fall back to a uniform draw over what is left.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) rest.push_back(i);
      pick = rest[rng.uniform_index(rest.size())];
    }
    out.push_back(pick);
    if (!with_replacement) taken[pick] = true;
  }
  return out;
}

ad::Var policy_surrogate(const ad::Var& logits, std::span<const std::size_t> samples,
                         std::span<const double> rewards, bool with_replacement,
                         double baseline) {
  const std::vector<double> per_draw(samples.size(), baseline);
  return policy_surrogate(logits, samples, rewards, with_replacement, per_draw);
}

std::vector<double> expected_draw_baselines(std::span<const double> distribution,
                                            std::span<const double> pool_rewards,
                                            std::span<const std::size_t> samples,
                                            bool with_replacement) {
  if (distribution.size() != pool_rewards.size()) {
    throw std::invalid_argument("need one reward per pool entry");
  }
  std::vector<double> out;
  double mass = 0, weighted = 0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    mass += distribution[i];
    weighted += distribution[i] * pool_rewards[i];
  }
  for (std::size_t s : samples) {
    if (s >= distribution.size()) throw std::invalid_argument("sample index outside the pool");
    out.push_back(mass > 0 ? weighted / mass : 0.0);
    if (!with_replacement) {
      mass -= distribution[s];
      weighted -= distribution[s] * pool_rewards[s];
    }
  }
  return out;
}

ad::Var policy_surrogate(const ad::Var& logits, std::span<const std::size_t> samples,
                         std::span<const double> rewards, bool with_replacement,
                         std::span<const double> draw_baselines) {
  if (logits.value().rank() != 1) throw std::invalid_argument("logits must be rank 1");
  if (samples.empty() || samples.size() != rewards.size() ||
      samples.size() != draw_baselines.size()) {
    throw std::invalid_argument("need one reward and one baseline per sample");
  }
  const std::size_t n = logits.value().size();
  const std::size_t k = samples.size();
  for (std::size_t s : samples)
    if (s >= n) throw std::invalid_argument("sample index outside the pool");

  // Draw j's log-probability is credited with the rewards of every draw at
  // or after j, less (K - j) times its own baseline c_j:
  //   coeff_j = (1/K) (sum_{k >= j} r_k - (K - j) c_j).
  // c_j may depend on earlier draws only. With replacement the draws are
  // independent and only r_j - c_j applies.
  std::vector<double> coeff(k);
  double tail = 0;
  for (std::size_t j = k; j-- > 0;) {
    tail += rewards[j];
    const double credit = with_replacement ? rewards[j] - draw_baselines[j]
                                           : tail - static_cast<double>(k - j) * draw_baselines[j];
    coeff[j] = credit / static_cast<double>(k);
  }

  std::vector<ad::Var> terms;
  if (with_replacement) {
    ad::Var lp = ad::log_softmax(logits);
    for (std::size_t j = 0; j < k; ++j) terms.push_back(ad::scale(ad::element(lp, samples[j]), coeff[j]));
  } else {
    std::vector<bool> taken(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (taken[samples[j]]) throw std::invalid_argument("repeated sample without replacement");
      std::vector<ad::Var> rest;
      std::size_t position = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (i == samples[j]) position = rest.size();
        rest.push_back(ad::element(logits, i));
      }
      ad::Var lq = ad::element(ad::log_softmax(ad::stack_scalars(rest)), position);
      terms.push_back(ad::scale(lq, coeff[j]));
      taken[samples[j]] = true;
    }
  }
  return ad::sum(ad::stack_scalars(terms));
}

}  // namespace snapgan::train
