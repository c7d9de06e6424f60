#pragma once

// Ruling vectors of Markov strategies and the linear payoff relations they
// enforce.
//
// For controllers K with joint action j, let s_j(a) be the probability that
// K plays j after profile a and rep_j the indicator of "K played j in a".
// With infinitely many expected rounds every s_j - rep_j has zero inner
// product with the limiting average distribution, whatever the other players
// do. Under a constant continuation probability delta the vector is
// delta*s_j + (1-delta)*s_j|0 * 1 - rep_j instead. The family over all j sums
// to zero, so the last joint action is dropped from the basis.

#include <cstddef>
#include <optional>
#include <vector>

#include "payctl/game.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"

namespace payctl {

struct RulingForm {
  enum class Kind { Infinite, Delta } kind = Kind::Infinite;
  double delta = 0.0;

  static RulingForm infinite() { return {}; }
  static RulingForm discounted(double d) { return {Kind::Delta, d}; }
};

// Throws UnsupportedSchedule for schedules classified as Other.
RulingForm ruling_form(const ContinuationSchedule& schedule);

struct RulingBasis {
  Eigen::MatrixXd vectors;  // |A| x r, column j is one ruling vector
  std::vector<std::size_t> controllers;
  RulingForm form;
  std::vector<std::size_t> joint_actions;  // provenance of each column
  std::size_t rank = 0;                    // numerical rank at 1e-9
};

// Indicator of "the controllers play joint_action" (one action per controller).
Vec repeat_indicator(const GameSpec& game, const std::vector<std::size_t>& controllers,
                     const std::vector<std::size_t>& joint_action);

// All R ruling vectors, one per joint action (columns sum to zero).
Eigen::MatrixXd ruling_family(const GameSpec& game, const GroupStrategy& controllers,
                              RulingForm form);
// The R-1 vectors with the last joint action dropped.
RulingBasis ruling_basis(const GameSpec& game, const GroupStrategy& controllers, RulingForm form);
RulingBasis ruling_basis(const GameSpec& game, const GroupStrategy& controllers,
                         const ContinuationSchedule& schedule);

// alpha_1 u_1 + ... + alpha_n u_n + gamma = 0, kept in canonical form: the
// largest |alpha_i| is 1 (or |gamma| = 1 when alpha = 0) and the first
// nonzero coefficient is positive.
struct PayoffRelation {
  Vec alpha;
  double gamma = 0.0;
};

// Throws InvalidParams when every coefficient is zero.
PayoffRelation make_relation(Vec alpha, double gamma);
double relation_distance(const PayoffRelation& a, const PayoffRelation& b);

// w = sum alpha_i u_i + gamma 1
Vec combined_payoff_vector(const GameSpec& game, const PayoffRelation& relation);

// A relation holds for every strategy profile iff w vanishes identically.
bool is_trivial(const GameSpec& game, const PayoffRelation& relation, double tol = 1e-9);

// Relations enforced by the controllers: the nonzero part of
// span{u_1..u_n, 1} intersected with the ruling space, one canonical relation
// per dimension. Coefficients are taken orthogonal to the trivial relations
// and the list is in reduced row echelon form over (alpha_1..alpha_n, gamma).
std::vector<PayoffRelation> detect_relations(const GameSpec& game, const GroupStrategy& controllers,
                                             const ContinuationSchedule& schedule);
std::vector<PayoffRelation> detect_relations(const GameSpec& game, const RulingBasis& basis);

// Whether the target's w lies in span(basis), i.e. the relation is enforced.
bool enforces(const GameSpec& game, const RulingBasis& basis, const PayoffRelation& target,
              double tol = 1e-9);

}  // namespace payctl
