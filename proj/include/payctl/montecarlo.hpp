#pragma once

#include <cstdint>
#include <optional>

#include "payctl/game.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"

namespace payctl {

struct MonteCarloOptions {
  std::size_t episodes = 10000;
  std::uint64_t seed = 0;
  // Hard stop for every episode. Required for the infinite schedule.
  std::optional<std::size_t> round_cap;
};

struct MonteCarloResult {
  // Ratio estimator sum(payoff) / sum(rounds) over episodes, which targets the
  // p(t)-weighted effective payoff; standard errors by the delta method.
  Vec mean;
  Vec std_error;
  double mean_rounds = 0.0;
  std::size_t episodes = 0;
};

// Plays independent episodes round by round. Episode k draws from its own
// generator seeded from (seed, k), so results depend only on the inputs.
MonteCarloResult monte_carlo_play(const GameSpec& game, const StrategyProfile& profile,
                                  const ContinuationSchedule& schedule,
                                  const MonteCarloOptions& options);

// SplitMix64 finaliser; used to derive per-episode and per-sample seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace payctl
