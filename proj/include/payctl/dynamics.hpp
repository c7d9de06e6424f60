#pragma once

// Markov chain over action profiles induced by Markov strategies, and the
// p(t)-weighted average of the per-round profile distributions.

#include <cstddef>

#include "payctl/game.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"
#include "payctl/types.hpp"

namespace payctl {

// M[a,b] = prod_g q_g(b_g | a)
Mat transition_matrix(const GameSpec& game, const StrategyProfile& profile);
// v1(a) = prod_g q_g0(a_g)
Vec initial_distribution(const GameSpec& game, const StrategyProfile& profile);

enum class AverageMethod { Cesaro, ClosedFormDelta, TruncatedSum };
const char* to_string(AverageMethod method);

struct AverageOptions {
  // Largest accepted |v M - v|_1 of a Cesaro limit (scaled up by 1e-12 |A|).
  double tol = 1e-12;
  bool allow_fast_path = true;
};

struct AvgDistributionResult {
  Vec dist;
  AverageMethod method = AverageMethod::Cesaro;
  // Truncated sum: rounds summed; closed form: 1; Cesaro: 0.
  std::size_t iterations = 0;
  double residual = 0.0;
  // Cesaro only: answered by the unique stationary distribution.
  bool stationary_fast_path = false;
};

// Cesaro limit of v1 M^(t-1).
//
// When v(I-M) = 0, sum v = 1 has a unique solution it is the answer for every
// start. Otherwise the chain is split into communicating classes: the limit
// is the stationary law of each closed class weighted by the probability of
// being absorbed there from v1. Throws NoConvergence if the result is not
// invariant to within tol.
AvgDistributionResult cesaro_average(const Mat& transition, const Vec& start,
                                     const AverageOptions& options = {});

AvgDistributionResult average_distribution(const Mat& transition, const Vec& start,
                                           const ContinuationSchedule& schedule,
                                           const AverageOptions& options = {});
AvgDistributionResult average_distribution(const GameSpec& game, const StrategyProfile& profile,
                                           const ContinuationSchedule& schedule,
                                           const AverageOptions& options = {});

// u_bar_i = <u_i, v_bar> for every player.
Vec effective_payoffs(const GameSpec& game, const StrategyProfile& profile,
                      const ContinuationSchedule& schedule, const AverageOptions& options = {});

}  // namespace payctl
