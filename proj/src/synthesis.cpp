#include "payctl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "payctl/error.hpp"
#include "payctl/lp.hpp"

namespace payctl {

const char* to_string(SynthesisMethod method) {
  switch (method) {
    case SynthesisMethod::IntervalR1: return "interval-r1";
    case SynthesisMethod::TwoColumn: return "two-column";
    case SynthesisMethod::LpEnumeration: return "lp-enumeration";
  }
  return "unknown";
}

const char* to_string(InfeasibleKind kind) {
  switch (kind) {
    case InfeasibleKind::ExactIntervalEmpty: return "exact-interval-empty";
    case InfeasibleKind::ExactLpEmpty: return "exact-lp-empty";
    case InfeasibleKind::SearchBudgetExhausted: return "search-budget-exhausted";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed interval of z satisfying lo <= z * w <= hi.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  void intersect_scaled(double w, double lo_bound, double hi_bound) {
    if (w > 0.0) {
      lo = std::max(lo, lo_bound / w);
      hi = std::min(hi, hi_bound / w);
    } else if (w < 0.0) {
      lo = std::max(lo, hi_bound / w);
      hi = std::min(hi, lo_bound / w);
    }
  }
};

// Everything the construction steps share.
struct Setup {
  const GameSpec& game;
  JointIndex index;
  RulingForm form;
  PayoffRelation relation;
  AllianceMode mode;
  Vec w;
  std::vector<std::size_t> own;  // controllers' joint action per profile
  double w_scale;
};

// A joint-action candidate: full-family coefficients plus the joint policy.
struct Candidate {
  SynthesisMethod method;
  Vec y_full;
  Mat rows;     // |A| x R joint conditionals
  Vec initial;  // R
  std::vector<MarkovStrategy> members;
};

Vec uniform(std::size_t n) { return Vec::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)); }

Vec unit(std::size_t n, std::size_t j) {
  Vec e = Vec::Zero(static_cast<Eigen::Index>(n));
  e[static_cast<Eigen::Index>(j)] = 1.0;
  return e;
}

// Joint distribution with sum_j y_j q_j = tau, for y in [0,1] with y[lo] = 0 and
// y[hi] = 1. Moves from the uniform point toward the extreme vertex on tau's
// side; in independent mode every member moves simultaneously, which keeps the
// row a product distribution. Returns the per-member rows as well.
struct RowChoice {
  Vec joint;
  std::vector<Vec> members;
};

RowChoice row_for_value(const Setup& s, const Vec& y, std::size_t lo, std::size_t hi, double tau) {
  const std::size_t r = s.index.size();
  tau = std::clamp(tau, 0.0, 1.0);
  const double mean = y.mean();
  const std::size_t vertex = tau >= mean ? hi : lo;
  RowChoice out;
  if (s.mode == AllianceMode::Correlated || s.index.players().size() == 1) {
    const double target_gap = tau - mean;
    const double vertex_gap = y[static_cast<Eigen::Index>(vertex)] - mean;
    const double lambda = vertex_gap == 0.0 ? 0.0 : std::clamp(target_gap / vertex_gap, 0.0, 1.0);
    out.joint = (1.0 - lambda) * uniform(r) + lambda * unit(r, vertex);
    if (s.index.players().size() == 1) out.members.push_back(out.joint);
    return out;
  }
  const auto target_actions = s.index.decode(vertex);
  const auto& players = s.index.players();
  auto members_at = [&](double lambda) {
    std::vector<Vec> rows;
    for (std::size_t k = 0; k < players.size(); ++k) {
      const std::size_t m = s.game.action_count(players[k]);
      rows.push_back((1.0 - lambda) * uniform(m) + lambda * unit(m, target_actions[k]));
    }
    return rows;
  };
  auto joint_of = [&](const std::vector<Vec>& rows) {
    Vec q(static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < r; ++j) {
      const auto actions = s.index.decode(j);
      double p = 1.0;
      for (std::size_t k = 0; k < rows.size(); ++k) p *= rows[k][static_cast<Eigen::Index>(actions[k])];
      q[static_cast<Eigen::Index>(j)] = p;
    }
    return q;
  };
  // f(0) = mean, f(1) = y[vertex]; tau lies between them.
  const double sign = y[static_cast<Eigen::Index>(vertex)] >= mean ? 1.0 : -1.0;
  double a = 0.0;
  double b = 1.0;
  for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
    const double mid = 0.5 * (a + b);
    const double f = y.dot(joint_of(members_at(mid)));
    if (sign * (f - tau) < 0.0) a = mid;
    else b = mid;
  }
  out.members = members_at(0.5 * (a + b));
  out.joint = joint_of(out.members);
  return out;
}

// Step (a): one ruling vector, infinite form.
std::optional<Candidate> interval_r1(const Setup& s, bool& proven_empty) {
  Interval z;
  for (std::size_t a = 0; a < s.own.size(); ++a) {
    const double wa = s.w[static_cast<Eigen::Index>(a)];
    // s_0(a) = rep_0(a) + z w(a) must stay in [0,1]
    if (s.own[a] == 0) z.intersect_scaled(wa, -1.0, 0.0);
    else z.intersect_scaled(wa, 0.0, 1.0);
  }
  // z = 0 always satisfies the constraints; a usable z moves some entry by
  // more than rounding noise.
  const double reach_hi = z.hi * s.w_scale;
  const double reach_lo = -z.lo * s.w_scale;
  if (std::max(reach_hi, reach_lo) <= 1e-9) {
    proven_empty = true;
    return std::nullopt;
  }
  const double chosen = reach_hi >= reach_lo ? 0.5 * z.hi : 0.5 * z.lo;
  Candidate c;
  c.method = SynthesisMethod::IntervalR1;
  c.rows.resize(static_cast<Eigen::Index>(s.own.size()), 2);
  for (std::size_t a = 0; a < s.own.size(); ++a) {
    const double rep = s.own[a] == 0 ? 1.0 : 0.0;
    const double p = std::clamp(rep + chosen * s.w[static_cast<Eigen::Index>(a)], 0.0, 1.0);
    c.rows(static_cast<Eigen::Index>(a), 0) = p;
    c.rows(static_cast<Eigen::Index>(a), 1) = 1.0 - p;
  }
  c.initial = uniform(2);
  c.y_full = Vec::Zero(2);
  c.y_full[0] = 1.0 / chosen;
  return c;
}

// Step (b): s_j1 = rep_j1 + phi w, s_j2 = rep_j2 - phi w, every other column
// repeats. Needs w = 0 wherever the controllers' last joint action is
// neither j1 nor j2.
std::optional<Candidate> two_column(const Setup& s) {
  const std::size_t r = s.index.size();
  std::optional<Candidate> best;
  double best_reach = 0.0;
  for (std::size_t j1 = 0; j1 < r; ++j1) {
    for (std::size_t j2 = j1 + 1; j2 < r; ++j2) {
      if (s.mode == AllianceMode::Independent) {
        // Rows mix j1 and j2 only, so they factor iff the two joint actions
        // differ in a single member.
        const auto a1 = s.index.decode(j1);
        const auto a2 = s.index.decode(j2);
        std::size_t differ = 0;
        for (std::size_t k = 0; k < a1.size(); ++k) differ += a1[k] != a2[k];
        if (differ != 1) continue;
      }
      Interval phi;
      bool supported = true;
      for (std::size_t a = 0; a < s.own.size() && supported; ++a) {
        const double wa = s.w[static_cast<Eigen::Index>(a)];
        if (s.own[a] == j1) phi.intersect_scaled(wa, -1.0, 0.0);
        else if (s.own[a] == j2) phi.intersect_scaled(wa, 0.0, 1.0);
        else supported = std::fabs(wa) <= 1e-12 * s.w_scale;
      }
      if (!supported) continue;
      const double reach = std::max(phi.hi, -phi.lo) * s.w_scale;
      if (reach <= 1e-9 || reach <= best_reach) continue;
      best_reach = reach;
      const double chosen = phi.hi * s.w_scale >= -phi.lo * s.w_scale ? 0.5 * phi.hi : 0.5 * phi.lo;
      Candidate c;
      c.method = SynthesisMethod::TwoColumn;
      c.rows = Mat::Zero(static_cast<Eigen::Index>(s.own.size()), static_cast<Eigen::Index>(r));
      for (std::size_t a = 0; a < s.own.size(); ++a) {
        const auto row = static_cast<Eigen::Index>(a);
        const double shift = chosen * s.w[row];
        c.rows(row, static_cast<Eigen::Index>(s.own[a])) = 1.0;
        c.rows(row, static_cast<Eigen::Index>(j1)) += shift;
        c.rows(row, static_cast<Eigen::Index>(j2)) -= shift;
        for (Eigen::Index j = 0; j < c.rows.cols(); ++j) c.rows(row, j) = std::clamp(c.rows(row, j), 0.0, 1.0);
      }
      c.initial = uniform(r);
      c.y_full = Vec::Zero(static_cast<Eigen::Index>(r));
      c.y_full[static_cast<Eigen::Index>(j1)] = 1.0 / chosen;
      best = std::move(c);
    }
  }
  return best;
}

struct LpPick {
  std::size_t lo;
  std::size_t hi;
  double slack;
  double scale;
  Vec y;
  double carry;  // (1 - delta) * sum_j y_j s_j|0, delta form only
};

// Step (c) for one (argmin, argmax) choice. Variables: y_0..y_{R-1} in [0,1],
// kappa (scale of w), eta (row slack), carry (delta form only).
std::optional<LpPick> solve_pair(const Setup& s, std::size_t lo, std::size_t hi, double tol,
                                 bool& budget_hit) {
  const std::size_t r = s.index.size();
  const bool delta_form = s.form.kind == RulingForm::Kind::Delta;
  const double delta = s.form.delta;
  const std::size_t kappa = r;
  const std::size_t eta = r + 1;
  const std::size_t carry = r + 2;
  const std::size_t nvars = delta_form ? r + 3 : r + 2;
  const auto at = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  auto build = [&](double eta_cap, double kappa_floor) {
    lp::Problem p(nvars);
    p.add(lp::Sense::Equal, 0.0).coeffs[at(lo)] = 1.0;
    p.add(lp::Sense::Equal, 1.0).coeffs[at(hi)] = 1.0;
    for (std::size_t j = 0; j < r; ++j) p.add(lp::Sense::LessEqual, 1.0).coeffs[at(j)] = 1.0;
    p.add(lp::Sense::LessEqual, 1e6).coeffs[at(kappa)] = 1.0;
    p.add(lp::Sense::GreaterEqual, kappa_floor).coeffs[at(kappa)] = 1.0;
    p.add(lp::Sense::LessEqual, eta_cap).coeffs[at(eta)] = 1.0;
    const double row_slack = delta_form ? delta : 1.0;
    for (std::size_t a = 0; a < s.own.size(); ++a) {
      const double wa = s.w[at(a)];
      // lower: t(a) - row_slack * eta >= 0
      auto& lower = p.add(lp::Sense::GreaterEqual, 0.0);
      lower.coeffs[at(kappa)] = wa;
      lower.coeffs[at(s.own[a])] += 1.0;
      lower.coeffs[at(eta)] = -row_slack;
      // upper: t(a) + row_slack * eta <= row_slack
      auto& upper = p.add(lp::Sense::LessEqual, row_slack);
      upper.coeffs[at(kappa)] = wa;
      upper.coeffs[at(s.own[a])] += 1.0;
      upper.coeffs[at(eta)] = row_slack;
      if (delta_form) {
        lower.coeffs[at(carry)] = -1.0;
        upper.coeffs[at(carry)] = -1.0;
      }
    }
    if (delta_form) {
      auto& lower = p.add(lp::Sense::GreaterEqual, 0.0);
      lower.coeffs[at(carry)] = 1.0;
      lower.coeffs[at(eta)] = -(1.0 - delta);
      auto& upper = p.add(lp::Sense::LessEqual, 1.0 - delta);
      upper.coeffs[at(carry)] = 1.0;
      upper.coeffs[at(eta)] = 1.0 - delta;
    }
    return p;
  };

  // Largest scale with no slack requirement: positive iff this choice is feasible.
  lp::Problem scale_problem = build(0.0, 0.0);
  scale_problem.objective[at(kappa)] = 1.0;
  const auto scale = lp::solve(scale_problem, tol);
  if (scale.status == lp::Status::IterationLimit) budget_hit = true;
  if (scale.status != lp::Status::Optimal || scale.x[at(kappa)] * s.w_scale <= 1e-9) return std::nullopt;

  // Most interior rows at a scale no smaller than a fraction of the maximum.
  lp::Problem slack_problem = build(0.5, 1e-3 * scale.x[at(kappa)]);
  slack_problem.objective[at(eta)] = 1.0;
  const auto slack = lp::solve(slack_problem, tol);
  const auto& x = slack.status == lp::Status::Optimal && slack.x[at(eta)] > tol ? slack.x : scale.x;
  if (slack.status == lp::Status::IterationLimit) budget_hit = true;

  LpPick pick{lo, hi, x[at(eta)], x[at(kappa)], x.head(at(r)), delta_form ? x[at(carry)] : 0.0};
  for (Eigen::Index j = 0; j < pick.y.size(); ++j) pick.y[j] = std::clamp(pick.y[j], 0.0, 1.0);
  return pick;
}

Candidate from_pick(const Setup& s, const LpPick& pick) {
  const std::size_t r = s.index.size();
  const bool delta_form = s.form.kind == RulingForm::Kind::Delta;
  const double delta = s.form.delta;
  Candidate c;
  c.method = SynthesisMethod::LpEnumeration;
  c.rows.resize(static_cast<Eigen::Index>(s.own.size()), static_cast<Eigen::Index>(r));
  std::vector<std::vector<Vec>> member_rows(s.own.size());
  for (std::size_t a = 0; a < s.own.size(); ++a) {
    const double rhs = pick.scale * s.w[static_cast<Eigen::Index>(a)] +
                       pick.y[static_cast<Eigen::Index>(s.own[a])] - pick.carry;
    double tau = rhs;
    if (delta_form) tau = delta > 0.0 ? rhs / delta : pick.y.mean();
    auto row = row_for_value(s, pick.y, pick.lo, pick.hi, tau);
    c.rows.row(static_cast<Eigen::Index>(a)) = row.joint.transpose();
    member_rows[a] = std::move(row.members);
  }
  std::vector<Vec> initial_members;
  if (delta_form) {
    auto row = row_for_value(s, pick.y, pick.lo, pick.hi, pick.carry / (1.0 - delta));
    c.initial = row.joint;
    initial_members = std::move(row.members);
  } else {
    auto row = row_for_value(s, pick.y, pick.lo, pick.hi, pick.y.mean());
    c.initial = row.joint;
    initial_members = std::move(row.members);
  }
  if (!initial_members.empty()) {
    const auto& players = s.index.players();
    for (std::size_t k = 0; k < players.size(); ++k) {
      MarkovStrategy m;
      m.player = players[k];
      m.initial = initial_members[k];
      m.conditionals.resize(static_cast<Eigen::Index>(s.own.size()), initial_members[k].size());
      for (std::size_t a = 0; a < s.own.size(); ++a) {
        m.conditionals.row(static_cast<Eigen::Index>(a)) = member_rows[a][k].transpose();
      }
      c.members.push_back(std::move(m));
    }
  }
  c.y_full = pick.y / pick.scale;
  return c;
}

void normalise_row(Eigen::Ref<Vec> row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) row[j] = std::max(0.0, row[j]);
  row /= row.sum();
}

std::optional<SynthesisResult> finish(const Setup& s, Candidate c, const SynthesisOptions& options) {
  const std::size_t r = s.index.size();
  SynthesisResult out;
  out.mode = s.mode;
  out.method = c.method;
  out.form = s.form;
  out.relation = s.relation;
  out.w = s.w;

  if (s.mode == AllianceMode::Independent) {
    if (c.members.empty()) {
      // Two-column and interval candidates are pure-or-single-member rows: read
      // the members back as marginals and check the rows factor.
      GroupStrategy joint{s.index.players(), c.initial, c.rows};
      for (Eigen::Index a = 0; a < c.rows.rows(); ++a) {
        if (!factorizes(s.game, joint.players, c.rows.row(a).transpose())) return std::nullopt;
      }
      c.members = marginals(s.game, joint);
    }
    for (auto& m : c.members) {
      normalise_row(m.initial);
      for (Eigen::Index a = 0; a < m.conditionals.rows(); ++a) {
        Vec row = m.conditionals.row(a).transpose();
        normalise_row(row);
        m.conditionals.row(a) = row.transpose();
      }
      m = make_markov_strategy(s.game, m.player, m.initial, m.conditionals);
    }
    out.members = c.members;
    out.joint = product_strategy(s.game, out.members);
  } else {
    normalise_row(c.initial);
    for (Eigen::Index a = 0; a < c.rows.rows(); ++a) {
      Vec row = c.rows.row(a).transpose();
      normalise_row(row);
      c.rows.row(a) = row.transpose();
    }
    out.joint = correlated_strategy(s.game, s.index.players(), c.initial, c.rows);
  }

  const Eigen::MatrixXd family = ruling_family(s.game, out.joint, s.form);
  const Vec achieved = family * c.y_full;
  out.residual = (achieved - s.w).cwiseAbs().maxCoeff();
  if (out.residual > options.residual_tol * s.w_scale) return std::nullopt;

  out.y.resize(static_cast<Eigen::Index>(r - 1));
  for (std::size_t j = 0; j + 1 < r; ++j) {
    out.y[static_cast<Eigen::Index>(j)] = c.y_full[static_cast<Eigen::Index>(j)] - c.y_full[static_cast<Eigen::Index>(r - 1)];
  }
  const RulingBasis basis = ruling_basis(s.game, out.joint, s.form);
  if (!enforces(s.game, basis, s.relation, 1e-8)) return std::nullopt;

  out.margin = out.joint.conditionals.minCoeff();
  if (s.form.kind == RulingForm::Kind::Delta) out.margin = std::min(out.margin, out.joint.initial.minCoeff());
  return out;
}

}  // namespace

SynthesisOutcome synthesize(const GameSpec& game, const ContinuationSchedule& schedule,
                            const SynthesisTarget& target, const SynthesisOptions& options) {
  if (target.controllers.empty()) throw Error(ErrorKind::InvalidParams, "no controllers given");
  for (auto p : target.controllers) {
    if (p >= game.player_count()) throw Error(ErrorKind::PlayerOutOfRange, "controller " + std::to_string(p + 1));
  }
  const RulingForm form = ruling_form(schedule);
  const PayoffRelation relation = make_relation(target.relation.alpha, target.relation.gamma);
  if (is_trivial(game, relation)) {
    throw Error(ErrorKind::TrivialTarget, "the relation holds for every strategy profile");
  }

  Setup s{game, JointIndex(game, target.controllers), form, relation, target.mode,
          combined_payoff_vector(game, relation), {}, 0.0};
  if (s.index.players().size() == 1) s.mode = AllianceMode::Independent;
  s.w_scale = std::max(1.0, s.w.cwiseAbs().maxCoeff());
  for (std::size_t a = 0; a < game.profile_count(); ++a) s.own.push_back(s.index.of_profile(a));
  const std::size_t r = s.index.size();
  const bool infinite = form.kind == RulingForm::Kind::Infinite;

  if (r == 2 && infinite) {
    bool empty = false;
    if (auto c = interval_r1(s, empty)) {
      if (auto done = finish(s, std::move(*c), options)) return *done;
    }
    if (empty) {
      return Infeasible{InfeasibleKind::ExactIntervalEmpty, true,
                        "no z != 0 keeps rep + z*w inside [0,1] on every profile"};
    }
  }

  if (r >= 3 && infinite) {
    if (auto c = two_column(s)) {
      if (auto done = finish(s, std::move(*c), options)) return *done;
    }
  }

  std::vector<LpPick> picks;
  bool budget_hit = false;
  for (std::size_t lo = 0; lo < r; ++lo) {
    for (std::size_t hi = 0; hi < r; ++hi) {
      if (lo == hi) continue;
      if (auto pick = solve_pair(s, lo, hi, options.lp_tol, budget_hit)) picks.push_back(std::move(*pick));
    }
  }
  std::stable_sort(picks.begin(), picks.end(), [](const LpPick& a, const LpPick& b) {
    if (a.slack != b.slack) return a.slack > b.slack;
    return a.scale > b.scale;
  });
  for (const auto& pick : picks) {
    if (auto done = finish(s, from_pick(s, pick), options)) return *done;
  }
  if (budget_hit || !picks.empty()) {
    std::ostringstream msg;
    msg << picks.size() << " feasible argmin/argmax choices failed reconstruction";
    if (budget_hit) msg << "; LP pivot budget exhausted";
    return Infeasible{InfeasibleKind::SearchBudgetExhausted, false, msg.str()};
  }
  std::ostringstream msg;
  msg << "all " << r * (r - 1) << " argmin/argmax choices of the ruling coefficients are infeasible";
  return Infeasible{InfeasibleKind::ExactLpEmpty, true, msg.str()};
}

}  // namespace payctl
