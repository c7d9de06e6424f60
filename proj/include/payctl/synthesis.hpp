#pragma once

// Synthesis of (collaborative) ruling strategies for a target payoff relation.
//
// Writing the ruling family with coefficients y_j over all R joint actions,
// the target w = sum_i alpha_i u_i + gamma 1 is enforced iff for every
// profile a
//
//   infinite:  sum_j y_j s_j(a) = w(a) + y_own(a)
//   delta:     delta sum_j y_j s_j(a) + (1-delta) sum_j y_j s_j|0 = w(a) + y_own(a)
//
// where own(a) is the controllers' joint action inside a. For fixed y each row
// only needs its right-hand side to lie in [min y, max y]; a product of
// per-member distributions reaches every such value too, because the
// multilinear map from the members' mixed actions is continuous between the
// argmin and argmax vertices. Fixing which joint actions attain min y and
// max y therefore turns feasibility into a linear program in (y, scale),
// and enumerating the R(R-1) choices decides it exactly.
//
// The solver tries, in order:
//   (a) R = 2, infinite: closed interval analysis in z = 1/y;
//   (b) R >= 3, infinite: two joint-action columns perturbed by +-phi*w;
//   (c) the enumeration LP above, maximising the slack of every row.

#include <string>
#include <variant>
#include <vector>

#include "payctl/game.hpp"
#include "payctl/ruling.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"

namespace payctl {

enum class AllianceMode { Independent, Correlated };

struct SynthesisTarget {
  PayoffRelation relation;
  std::vector<std::size_t> controllers;
  AllianceMode mode = AllianceMode::Independent;
};

enum class SynthesisMethod { IntervalR1, TwoColumn, LpEnumeration };
const char* to_string(SynthesisMethod method);

struct SynthesisOptions {
  // Row slack (relative to max y - min y) below which the LP prefers the
  // largest feasible scale instead.
  double lp_tol = 1e-9;
  // Allowed |sum y_j u~_j - w| relative to max|w| when accepting a candidate.
  double residual_tol = 1e-9;
};

struct SynthesisResult {
  AllianceMode mode = AllianceMode::Independent;
  SynthesisMethod method = SynthesisMethod::LpEnumeration;
  RulingForm form;
  PayoffRelation relation;
  // Joint policy of the controllers; a product of `members` in independent mode.
  GroupStrategy joint;
  // Per-controller strategies (independent mode only).
  std::vector<MarkovStrategy> members;
  Vec y;       // coefficients on ruling_basis(joint).vectors
  Vec w;       // target vector sum alpha_i u_i + gamma 1
  double margin = 0.0;    // smallest probability used by the controllers
  double residual = 0.0;  // max |sum y_j u~_j - w|
};

enum class InfeasibleKind { ExactIntervalEmpty, ExactLpEmpty, SearchBudgetExhausted };
const char* to_string(InfeasibleKind kind);

struct Infeasible {
  InfeasibleKind kind;
  bool conclusive;  // a proof of infeasibility within Markov strategies
  std::string detail;
};

using SynthesisOutcome = std::variant<SynthesisResult, Infeasible>;

// Throws UnsupportedSchedule (schedule classified Other), TrivialTarget,
// InvalidParams / PlayerOutOfRange for malformed targets.
SynthesisOutcome synthesize(const GameSpec& game, const ContinuationSchedule& schedule,
                            const SynthesisTarget& target, const SynthesisOptions& options = {});

}  // namespace payctl
