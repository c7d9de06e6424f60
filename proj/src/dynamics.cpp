#include "payctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "payctl/error.hpp"
#include "payctl/linalg.hpp"
#include "payctl/simd.hpp"

namespace payctl {

namespace {

std::size_t as_size(Eigen::Index i) { return static_cast<std::size_t>(i); }

Vec clamp_distribution(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0 && v[i] > -1e-12) v[i] = 0.0;
  }
  return v;
}

Vec step(const Mat& m, const Vec& v) {
  Vec out(m.cols());
  simd::vecmat(view(v), m.data(), as_size(m.rows()), as_size(m.cols()), view(out));
  return out;
}

}  // namespace

Mat transition_matrix(const GameSpec& game, const StrategyProfile& profile) {
  const std::size_t n = game.profile_count();
  std::vector<JointIndex> indices;
  for (const auto& g : profile.groups) {
    indices.emplace_back(game, g.players);
    if (as_size(g.conditionals.rows()) != n || as_size(g.conditionals.cols()) != indices.back().size()) {
      throw Error(ErrorKind::InconsistentStrategy, "conditional table does not match the game");
    }
  }
  // joint[g][b]: group g's joint action inside profile b
  std::vector<std::vector<std::size_t>> joint(profile.groups.size(), std::vector<std::size_t>(n));
  for (std::size_t g = 0; g < indices.size(); ++g) {
    for (std::size_t b = 0; b < n; ++b) joint[g][b] = indices[g].of_profile(b);
  }
  Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double p = 1.0;
      for (std::size_t g = 0; g < indices.size(); ++g) {
        p *= profile.groups[g].conditionals(static_cast<Eigen::Index>(a),
                                            static_cast<Eigen::Index>(joint[g][b]));
      }
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = p;
    }
  }
  return m;
}

Vec initial_distribution(const GameSpec& game, const StrategyProfile& profile) {
  const std::size_t n = game.profile_count();
  Vec v = Vec::Ones(static_cast<Eigen::Index>(n));
  for (const auto& g : profile.groups) {
    JointIndex index(game, g.players);
    for (std::size_t b = 0; b < n; ++b) v[static_cast<Eigen::Index>(b)] *= g.initial[static_cast<Eigen::Index>(index.of_profile(b))];
  }
  return v;
}

const char* to_string(AverageMethod method) {
  switch (method) {
    case AverageMethod::Cesaro: return "cesaro";
    case AverageMethod::ClosedFormDelta: return "closed_form_delta";
    case AverageMethod::TruncatedSum: return "truncated_sum";
  }
  return "cesaro";
}

AvgDistributionResult cesaro_average(const Mat& transition, const Vec& start,
                                     const AverageOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tol must be > 0");
  const std::size_t n = as_size(transition.rows());
  AvgDistributionResult result;
  result.method = AverageMethod::Cesaro;

  if (options.allow_fast_path) {
    if (auto stationary = linalg::unique_stationary(transition)) {
      Vec v = *stationary;
      const double residual = simd::l1_distance(view(v), view(step(transition, v)));
      const bool nonnegative = v.minCoeff() >= -1e-12;
      if (nonnegative && residual <= std::max(options.tol, 1e-12 * static_cast<double>(n))) {
        result.dist = clamp_distribution(v);
        result.residual = residual;
        result.stationary_fast_path = true;
        return result;
      }
    }
  }

  const Vec limit = linalg::cesaro_limit(transition, start);
  result.residual = simd::l1_distance(view(limit), view(step(transition, limit)));
  if (result.residual > std::max(options.tol, 1e-12 * static_cast<double>(n))) {
    std::ostringstream msg;
    msg << "class decomposition left a residual of " << result.residual;
    throw Error(ErrorKind::NoConvergence, msg.str());
  }
  result.dist = clamp_distribution(limit);
  return result;
}

namespace {

AvgDistributionResult closed_form_delta(const Mat& transition, const Vec& start, double delta) {
  // v_bar = (1 - delta) v1 (I - delta M)^-1
  const Eigen::Index n = transition.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - delta * Eigen::MatrixXd(transition.transpose());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Vec x = lu.solve(Eigen::VectorXd(start));
  AvgDistributionResult result;
  result.method = AverageMethod::ClosedFormDelta;
  result.iterations = 1;
  result.dist = clamp_distribution((1.0 - delta) * x);
  result.residual = (system * x - start).lpNorm<Eigen::Infinity>();
  return result;
}

// Exact weighted sum over a finite prefix of rounds. If the schedule has a
// constant tail c < 1 after the prefix, that tail is added in closed form; a
// tail of 1 with positive survival makes the prefix irrelevant and the Cesaro
// limit is returned instead.
AvgDistributionResult truncated_sum(const Mat& transition, const Vec& start,
                                    const ContinuationSchedule& schedule,
                                    const AverageOptions& options) {
  std::size_t prefix = 0;
  double tail = 0.0;
  if (const auto* h = std::get_if<HorizonSchedule>(&schedule.variant())) {
    prefix = h->horizon;
    tail = 0.0;
  } else if (const auto* c = std::get_if<CustomSchedule>(&schedule.variant())) {
    prefix = c->values.size() + 1;
    tail = c->tail;
  }

  AvgDistributionResult result;
  result.method = AverageMethod::TruncatedSum;
  Vec sum = Vec::Zero(start.size());
  Vec v = start;
  double weight = 1.0;  // p(t)
  double total = 0.0;
  std::size_t t = 1;
  for (; t <= prefix && weight > 0.0; ++t) {
    simd::axpy(weight, view(v), view(sum));
    total += weight;
    weight *= schedule.continuation(t);
    if (t < prefix && weight > 0.0) v = step(transition, v);
  }
  result.iterations = t - 1;
  if (weight > 0.0) {
    // Rounds after the prefix continue with constant probability `tail`.
    Vec next = step(transition, v);
    if (tail >= 1.0) {
      auto limit = cesaro_average(transition, next, options);
      limit.method = AverageMethod::TruncatedSum;
      limit.iterations += result.iterations;
      return limit;
    }
    // sum_{k>=0} weight tail^k next M^k = weight * next (I - tail M)^-1
    auto geometric = closed_form_delta(transition, next, tail);
    const double tail_weight = weight / (1.0 - tail);
    simd::axpy(tail_weight, view(geometric.dist), view(sum));
    total += tail_weight;
    result.residual = geometric.residual;
  }
  result.dist = clamp_distribution(sum / total);
  return result;
}

}  // namespace

AvgDistributionResult average_distribution(const Mat& transition, const Vec& start,
                                           const ContinuationSchedule& schedule,
                                           const AverageOptions& options) {
  if (transition.rows() != transition.cols() || transition.rows() != start.size()) {
    throw Error(ErrorKind::DimensionMismatch, "transition matrix and start distribution disagree");
  }
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tol must be > 0");
  if (std::holds_alternative<InfiniteSchedule>(schedule.variant())) {
    return cesaro_average(transition, start, options);
  }
  if (const auto* d = std::get_if<DeltaSchedule>(&schedule.variant())) {
    return closed_form_delta(transition, start, d->delta);
  }
  return truncated_sum(transition, start, schedule, options);
}

AvgDistributionResult average_distribution(const GameSpec& game, const StrategyProfile& profile,
                                           const ContinuationSchedule& schedule,
                                           const AverageOptions& options) {
  return average_distribution(transition_matrix(game, profile), initial_distribution(game, profile),
                              schedule, options);
}

Vec effective_payoffs(const GameSpec& game, const StrategyProfile& profile,
                      const ContinuationSchedule& schedule, const AverageOptions& options) {
  const auto avg = average_distribution(game, profile, schedule, options);
  Vec out(static_cast<Eigen::Index>(game.player_count()));
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    out[static_cast<Eigen::Index>(i)] = expected_payoff(game, i, avg.dist);
  }
  return out;
}

}  // namespace payctl
