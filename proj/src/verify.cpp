#include "payctl/verify.hpp"

#include <algorithm>
#include <cmath>

#include "payctl/error.hpp"
#include "payctl/montecarlo.hpp"

namespace payctl {

namespace {

Vec dirichlet_row(std::size_t m, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  Vec row(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < row.size(); ++k) row[k] = exp1(rng);
  return row / row.sum();
}

Vec interior_row(std::size_t m, std::mt19937_64& rng) {
  constexpr double floor = 0.05;
  const double spread = 1.0 - floor * static_cast<double>(m);
  return Vec::Constant(static_cast<Eigen::Index>(m), floor) + spread * dirichlet_row(m, rng);
}

Vec boundary_row(std::size_t m, std::mt19937_64& rng) {
  if (std::bernoulli_distribution(0.5)(rng)) {
    Vec row = Vec::Zero(static_cast<Eigen::Index>(m));
    row[static_cast<Eigen::Index>(std::uniform_int_distribution<std::size_t>(0, m - 1)(rng))] = 1.0;
    return row;
  }
  return dirichlet_row(m, rng);
}

double relation_residual(const PayoffRelation& relation, const Vec& payoffs) {
  return std::fabs(relation.alpha.dot(payoffs) + relation.gamma);
}

}  // namespace

std::vector<std::size_t> opponent_players(const GameSpec& game, const GroupStrategy& controllers) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    if (std::find(controllers.players.begin(), controllers.players.end(), i) == controllers.players.end()) {
      out.push_back(i);
    }
  }
  return out;
}

StrategyProfile with_opponents(const GameSpec& game, const GroupStrategy& controllers,
                               const std::vector<MarkovStrategy>& opponents) {
  std::vector<GroupStrategy> groups{controllers};
  for (const auto& s : opponents) groups.push_back(product_strategy(game, std::span(&s, 1)));
  return make_profile(game, std::move(groups));
}

MarkovStrategy sample_opponent(const GameSpec& game, std::size_t player, bool boundary,
                               std::mt19937_64& rng) {
  const std::size_t m = game.action_count(player);
  auto draw = [&] { return boundary ? boundary_row(m, rng) : interior_row(m, rng); };
  MarkovStrategy s;
  s.player = player;
  s.initial = draw();
  s.conditionals.resize(static_cast<Eigen::Index>(game.profile_count()), static_cast<Eigen::Index>(m));
  for (Eigen::Index a = 0; a < s.conditionals.rows(); ++a) s.conditionals.row(a) = draw().transpose();
  return s;
}

bool is_boundary_sample(std::size_t i, double fraction) {
  const double x = static_cast<double>(i);
  return std::floor((x + 1.0) * fraction) > std::floor(x * fraction);
}

VerifyReport verify_relation(const GameSpec& game, const ContinuationSchedule& schedule,
                             const GroupStrategy& controllers, const PayoffRelation& relation,
                             const VerifyOptions& options) {
  if (options.samples == 0) throw Error(ErrorKind::InvalidParams, "samples must be at least 1");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tol must be positive");
  if (!(options.boundary_fraction >= 0.0 && options.boundary_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "boundary fraction must lie in [0,1]");
  }
  if (static_cast<std::size_t>(relation.alpha.size()) != game.player_count()) {
    throw Error(ErrorKind::DimensionMismatch, "relation has " + std::to_string(relation.alpha.size()) +
                                                  " coefficients for " + std::to_string(game.player_count()) +
                                                  " players");
  }
  const auto players = opponent_players(game, controllers);
  VerifyReport report;
  report.records.reserve(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) {
    std::mt19937_64 rng(mix_seed(options.seed, i));
    const bool boundary = is_boundary_sample(i, options.boundary_fraction);
    std::vector<MarkovStrategy> opponents;
    for (auto p : players) opponents.push_back(sample_opponent(game, p, boundary, rng));
    Vec payoffs;
    try {
      payoffs = effective_payoffs(game, with_opponents(game, controllers, opponents), schedule, options.average);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
      ++report.skipped;
      continue;
    }
    const double residual = relation_residual(relation, payoffs);
    double& bucket = boundary ? report.max_boundary : report.max_interior;
    bucket = std::max(bucket, residual);
    if (residual > report.max_abs_violation || report.worst_opponent.empty()) {
      report.max_abs_violation = std::max(report.max_abs_violation, residual);
      report.worst_opponent = opponents;
    }
    report.records.push_back({i, boundary, std::move(payoffs), residual});
  }
  report.pass = report.max_abs_violation <= options.tol;
  return report;
}

namespace {

// Opponent strategies parametrised by nonnegative row weights.
struct Search {
  const GameSpec& game;
  const ContinuationSchedule& schedule;
  const GroupStrategy& controllers;
  const Vec& candidate;
  const AverageOptions& average;
  std::vector<std::size_t> players;
  std::size_t evaluations = 0;

  std::size_t row_count() const { return game.profile_count() + 1; }

  std::vector<MarkovStrategy> decode(const std::vector<Vec>& weights) const {
    std::vector<MarkovStrategy> out;
    const std::size_t rows = row_count();
    for (std::size_t k = 0; k < players.size(); ++k) {
      const std::size_t m = game.action_count(players[k]);
      auto normalised = [&](const Vec& w) {
        const double total = w.sum();
        return total > 0.0 ? Vec(w / total) : Vec::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
      };
      MarkovStrategy s;
      s.player = players[k];
      s.initial = normalised(weights[k * rows]);
      s.conditionals.resize(static_cast<Eigen::Index>(game.profile_count()), static_cast<Eigen::Index>(m));
      for (std::size_t a = 0; a < game.profile_count(); ++a) {
        s.conditionals.row(static_cast<Eigen::Index>(a)) = normalised(weights[k * rows + 1 + a]).transpose();
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  double value(const std::vector<Vec>& weights) {
    ++evaluations;
    try {
      const auto profile = with_opponents(game, controllers, decode(weights));
      const auto avg = average_distribution(game, profile, schedule, average);
      return std::fabs(candidate.dot(avg.dist));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
      return 0.0;
    }
  }
};

}  // namespace

FalsificationReport falsify_candidate(const GameSpec& game, const ContinuationSchedule& schedule,
                                      const GroupStrategy& controllers, const Vec& candidate,
                                      const FalsifyOptions& options) {
  if (static_cast<std::size_t>(candidate.size()) != game.profile_count()) {
    throw Error(ErrorKind::DimensionMismatch, "candidate has " + std::to_string(candidate.size()) +
                                                  " entries for " + std::to_string(game.profile_count()) +
                                                  " profiles");
  }
  Search search{game, schedule, controllers, candidate, options.average, opponent_players(game, controllers)};
  FalsificationReport report;
  report.candidate = candidate;
  std::vector<Vec> best_weights;

  for (std::size_t restart = 0; restart < std::max<std::size_t>(options.budget, 1); ++restart) {
    std::mt19937_64 rng(mix_seed(options.seed, restart));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> weights;
    for (auto p : search.players) {
      for (std::size_t r = 0; r < search.row_count(); ++r) {
        Vec w(static_cast<Eigen::Index>(game.action_count(p)));
        // Half the restarts start from pure rows so corner optima are reachable.
        const bool pure = restart % 2 == 1 && unit(rng) < 0.5;
        for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = pure ? 0.0 : unit(rng);
        if (pure) w[static_cast<Eigen::Index>(std::uniform_int_distribution<Eigen::Index>(0, w.size() - 1)(rng))] = 1.0;
        weights.push_back(std::move(w));
      }
    }
    double current = search.value(weights);
    double step = 0.25;
    for (std::size_t sweep = 0; sweep < options.refine_sweeps && step > 1e-6; ++sweep) {
      bool improved = false;
      for (auto& w : weights) {
        for (Eigen::Index k = 0; k < w.size(); ++k) {
          const double original = w[k];
          for (double move : {step, -step}) {
            w[k] = std::clamp(original + move, 0.0, 1.0);
            if (w[k] == original) continue;
            const double v = search.value(weights);
            if (v > current) {
              current = v;
              improved = true;
              break;
            }
            w[k] = original;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (current > report.achieved || best_weights.empty()) {
      report.achieved = std::max(report.achieved, current);
      best_weights = weights;
    }
  }
  report.evaluations = search.evaluations;
  if (report.achieved > options.threshold) {
    report.counterexample = search.decode(best_weights);
    report.inconclusive = false;
  }
  return report;
}

}  // namespace payctl
