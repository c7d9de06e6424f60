#pragma once

// Checking enforced relations against sampled opponents, and searching for
// opponents that break a candidate ruling vector.
//
// Opponents are every player outside the controlling group, each playing an
// independent Markov strategy.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "payctl/dynamics.hpp"
#include "payctl/game.hpp"
#include "payctl/ruling.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"

namespace payctl {

struct VerifyOptions {
  std::size_t samples = 1000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  // Share of samples whose opponent rows may sit on the simplex boundary.
  double boundary_fraction = 0.1;
  AverageOptions average;
};

struct VerifySample {
  std::size_t id = 0;
  bool boundary = false;
  Vec payoffs;  // u_bar for every player
  double residual = 0.0;  // |sum alpha_i u_bar_i + gamma|
};

struct VerifyReport {
  double max_abs_violation = 0.0;
  double max_interior = 0.0;
  double max_boundary = 0.0;
  std::vector<MarkovStrategy> worst_opponent;
  bool pass = true;
  std::vector<VerifySample> records;
  std::size_t skipped = 0;  // samples whose Cesaro limit did not converge
};

// Interior: every entry in [0.05, 1 - 0.05(m-1)]. Boundary: each row is a pure
// action with probability 1/2, otherwise a uniform draw from the simplex.
MarkovStrategy sample_opponent(const GameSpec& game, std::size_t player, bool boundary,
                               std::mt19937_64& rng);

// Which of `samples` draws are boundary draws: sample i is one iff
// floor((i+1) f) > floor(i f), which spreads them evenly.
bool is_boundary_sample(std::size_t i, double fraction);

// Throws InvalidParams for samples == 0, tol <= 0 or a fraction outside [0,1].
VerifyReport verify_relation(const GameSpec& game, const ContinuationSchedule& schedule,
                             const GroupStrategy& controllers, const PayoffRelation& relation,
                             const VerifyOptions& options = {});

struct FalsifyOptions {
  std::size_t budget = 200;  // random restarts
  std::uint64_t seed = 0;
  double threshold = 1e-6;
  std::size_t refine_sweeps = 40;
  AverageOptions average;
};

struct FalsificationReport {
  Vec candidate;
  // Present iff achieved > threshold.
  std::optional<std::vector<MarkovStrategy>> counterexample;
  double achieved = 0.0;  // best |<candidate, v_bar>| found
  bool inconclusive = true;
  std::size_t evaluations = 0;
};

// Maximises |<candidate, v_bar>| over opponent Markov strategies by random
// restarts followed by coordinatewise refinement.
FalsificationReport falsify_candidate(const GameSpec& game, const ContinuationSchedule& schedule,
                                      const GroupStrategy& controllers, const Vec& candidate,
                                      const FalsifyOptions& options = {});

// Controllers plus opponents, as one profile.
StrategyProfile with_opponents(const GameSpec& game, const GroupStrategy& controllers,
                               const std::vector<MarkovStrategy>& opponents);

// Players outside the group, ascending.
std::vector<std::size_t> opponent_players(const GameSpec& game, const GroupStrategy& controllers);

}  // namespace payctl
