#pragma once

// Small dense linear programs: maximise c.x subject to rows a.x (<=|>=|=) b and
// x >= 0. Two-phase tableau simplex with Bland's rule, meant for the few dozen
// variables and constraints that synthesis produces.

#include <cstddef>
#include <vector>

#include "payctl/types.hpp"

namespace payctl::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Constraint {
  Vec coeffs;
  Sense sense;
  double rhs;
};

struct Problem {
  std::size_t variables = 0;
  Vec objective;  // maximised
  std::vector<Constraint> constraints;

  explicit Problem(std::size_t n) : variables(n), objective(Vec::Zero(static_cast<Eigen::Index>(n))) {}
  Constraint& add(Sense sense, double rhs);  // coefficients start at zero
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
const char* to_string(Status status);

struct Solution {
  Status status = Status::Infeasible;
  Vec x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

Solution solve(const Problem& problem, double tol = 1e-9, std::size_t max_pivots = 20000);

}  // namespace payctl::lp
