#include "payctl/ruling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "payctl/error.hpp"
#include "payctl/linalg.hpp"

namespace payctl {

RulingForm ruling_form(const ContinuationSchedule& schedule) {
  const auto cls = classify_schedule(schedule);
  switch (cls.kind) {
    case ScheduleClass::InfiniteExpectedRounds: return RulingForm::infinite();
    case ScheduleClass::DeltaRepeated: return RulingForm::discounted(cls.delta);
    case ScheduleClass::Other: break;
  }
  throw Error(ErrorKind::UnsupportedSchedule,
              schedule.describe() + " admits no strict-Markov ruling vectors");
}

Vec repeat_indicator(const GameSpec& game, const std::vector<std::size_t>& controllers,
                     const std::vector<std::size_t>& joint_action) {
  JointIndex index(game, controllers);
  // Actions are listed in the caller's controller order; reorder to sorted.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (joint_action.size() != controllers.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one action per controller");
  }
  for (std::size_t k = 0; k < controllers.size(); ++k) pairs.emplace_back(controllers[k], joint_action[k]);
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> sorted_actions;
  for (const auto& [player, action] : pairs) sorted_actions.push_back(action);
  const std::size_t target = index.encode(sorted_actions);
  Vec out(static_cast<Eigen::Index>(game.profile_count()));
  for (std::size_t a = 0; a < game.profile_count(); ++a) {
    out[static_cast<Eigen::Index>(a)] = index.of_profile(a) == target ? 1.0 : 0.0;
  }
  return out;
}

Eigen::MatrixXd ruling_family(const GameSpec& game, const GroupStrategy& controllers,
                              RulingForm form) {
  JointIndex index(game, controllers.players);
  const auto rows = static_cast<Eigen::Index>(game.profile_count());
  const auto width = static_cast<Eigen::Index>(index.size());
  if (controllers.conditionals.rows() != rows || controllers.conditionals.cols() != width ||
      controllers.initial.size() != width) {
    throw Error(ErrorKind::InconsistentStrategy, "controller strategy does not match the game");
  }
  Eigen::MatrixXd family(rows, width);
  for (Eigen::Index a = 0; a < rows; ++a) {
    const auto own = static_cast<Eigen::Index>(index.of_profile(static_cast<std::size_t>(a)));
    for (Eigen::Index j = 0; j < width; ++j) {
      const double s = controllers.conditionals(a, j);
      const double rep = j == own ? 1.0 : 0.0;
      if (form.kind == RulingForm::Kind::Infinite) {
        family(a, j) = s - rep;
      } else {
        family(a, j) = form.delta * s + (1.0 - form.delta) * controllers.initial[j] - rep;
      }
    }
  }
  return family;
}

RulingBasis ruling_basis(const GameSpec& game, const GroupStrategy& controllers, RulingForm form) {
  const Eigen::MatrixXd family = ruling_family(game, controllers, form);
  RulingBasis basis;
  basis.controllers = controllers.players;
  basis.form = form;
  basis.vectors = family.leftCols(family.cols() - 1);
  for (Eigen::Index j = 0; j + 1 < family.cols(); ++j) basis.joint_actions.push_back(static_cast<std::size_t>(j));
  basis.rank = linalg::rank(basis.vectors);
  return basis;
}

RulingBasis ruling_basis(const GameSpec& game, const GroupStrategy& controllers,
                         const ContinuationSchedule& schedule) {
  return ruling_basis(game, controllers, ruling_form(schedule));
}

PayoffRelation make_relation(Vec alpha, double gamma) {
  double scale = alpha.size() > 0 ? alpha.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) scale = std::fabs(gamma);
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "relation coefficients must be finite and not all zero");
  }
  alpha /= scale;
  gamma /= scale;
  // Coefficients that are zero up to rounding do not decide the sign.
  constexpr double kZero = 1e-12;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (std::fabs(alpha[i]) < kZero) alpha[i] = 0.0;
  }
  if (std::fabs(gamma) < kZero) gamma = 0.0;
  double first = gamma;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] != 0.0) {
      first = alpha[i];
      break;
    }
  }
  if (first < 0.0) {
    alpha = -alpha;
    gamma = -gamma;
  }
  return PayoffRelation{std::move(alpha), gamma};
}

double relation_distance(const PayoffRelation& a, const PayoffRelation& b) {
  if (a.alpha.size() != b.alpha.size()) return std::numeric_limits<double>::infinity();
  return std::max((a.alpha - b.alpha).cwiseAbs().maxCoeff(), std::fabs(a.gamma - b.gamma));
}

Vec combined_payoff_vector(const GameSpec& game, const PayoffRelation& relation) {
  if (static_cast<std::size_t>(relation.alpha.size()) != game.player_count()) {
    throw Error(ErrorKind::DimensionMismatch, "relation has " + std::to_string(relation.alpha.size()) +
                                                  " coefficients for " +
                                                  std::to_string(game.player_count()) + " players");
  }
  Vec w = game.payoffs() * relation.alpha;
  w.array() += relation.gamma;
  return w;
}

bool is_trivial(const GameSpec& game, const PayoffRelation& relation, double tol) {
  return combined_payoff_vector(game, relation).cwiseAbs().maxCoeff() <= tol;
}

namespace {

Eigen::MatrixXd payoff_block(const GameSpec& game) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(game.profile_count()),
                        static_cast<Eigen::Index>(game.player_count() + 1));
  block.leftCols(static_cast<Eigen::Index>(game.player_count())) = game.payoffs();
  block.col(block.cols() - 1).setOnes();
  return block;
}

}  // namespace

std::vector<PayoffRelation> detect_relations(const GameSpec& game, const RulingBasis& basis) {
  const Eigen::MatrixXd payoff = payoff_block(game);
  const Eigen::Index k = payoff.cols();
  const Eigen::Index r = basis.vectors.cols();
  // [U 1 | -U~] (alpha; gamma; y) = 0
  Eigen::MatrixXd system(payoff.rows(), k + r);
  system.leftCols(k) = payoff;
  system.rightCols(r) = -basis.vectors;
  const Eigen::MatrixXd null = linalg::null_space(system);
  if (null.cols() == 0) return {};

  // Project onto (alpha, gamma) and map to payoff-space vectors w; trivial
  // relations map to w = 0 and drop out of the column basis.
  const Eigen::MatrixXd coefficients = null.topRows(k);
  const Eigen::MatrixXd w = payoff * coefficients;
  // Null vectors have unit norm, so genuine relations give w of order |payoff|.
  const double scale = std::max(1.0, payoff.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd w_basis = linalg::column_basis(w, 1e-9, 1e-9 * scale);
  if (w_basis.cols() == 0) return {};

  // Minimum-norm coefficients reproducing each basis vector of the intersection,
  // then reduced row echelon form so that the listed relations do not depend
  // on which basis the SVD happened to return.
  const auto solver = payoff.completeOrthogonalDecomposition();
  Eigen::MatrixXd rows(w_basis.cols(), k);
  for (Eigen::Index c = 0; c < w_basis.cols(); ++c) rows.row(c) = solver.solve(w_basis.col(c)).transpose();
  Eigen::Index lead = 0;
  for (Eigen::Index col = 0; col < k && lead < rows.rows(); ++col) {
    Eigen::Index pivot = lead;
    rows.col(col).segment(lead, rows.rows() - lead).cwiseAbs().maxCoeff(&pivot);
    pivot += lead;
    if (std::fabs(rows(pivot, col)) <= 1e-9 * rows.cwiseAbs().maxCoeff()) continue;
    rows.row(lead).swap(rows.row(pivot));
    rows.row(lead) /= rows(lead, col);
    for (Eigen::Index other = 0; other < rows.rows(); ++other) {
      if (other != lead) rows.row(other) -= rows(other, col) * rows.row(lead);
    }
    ++lead;
  }
  std::vector<PayoffRelation> relations;
  for (Eigen::Index c = 0; c < lead; ++c) {
    auto rel = make_relation(rows.row(c).head(k - 1).transpose(), rows(c, k - 1));
    if (is_trivial(game, rel)) continue;
    relations.push_back(std::move(rel));
  }
  return relations;
}

std::vector<PayoffRelation> detect_relations(const GameSpec& game, const GroupStrategy& controllers,
                                             const ContinuationSchedule& schedule) {
  return detect_relations(game, ruling_basis(game, controllers, schedule));
}

bool enforces(const GameSpec& game, const RulingBasis& basis, const PayoffRelation& target,
              double tol) {
  const Vec w = combined_payoff_vector(game, target);
  if (w.cwiseAbs().maxCoeff() <= tol) return false;
  if (basis.vectors.cols() == 0) return false;
  const Eigen::VectorXd y = basis.vectors.completeOrthogonalDecomposition().solve(w);
  return (basis.vectors * y - w).cwiseAbs().maxCoeff() <= tol * std::max(1.0, w.cwiseAbs().maxCoeff());
}

}  // namespace payctl
