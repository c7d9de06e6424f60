#include "payctl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace payctl::lp {

Constraint& Problem::add(Sense sense, double rhs) {
  constraints.push_back(Constraint{Vec::Zero(static_cast<Eigen::Index>(variables)), sense, rhs});
  return constraints.back();
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows + 1),
                                                           static_cast<Eigen::Index>(cols + 1))),
        basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)); }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    t_.row(static_cast<Eigen::Index>(r)) /= p;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f != 0.0) t_.row(static_cast<Eigen::Index>(i)) -= f * t_.row(static_cast<Eigen::Index>(r));
    }
    basis_[r] = c;
  }

  // Objective row holds reduced costs of a maximisation: entering columns are
  // the ones with cost < -tol (lowest index first, Bland's rule).
  Status optimise(const std::vector<bool>& allowed, double tol, std::size_t max_pivots,
                  std::size_t& pivots) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (allowed[c] && cost(c) < -tol) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return Status::Optimal;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= tol) continue;
        const double ratio = rhs(r) / a;
        if (leave == rows_ || ratio < best - 1e-12) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-12 && basis_[r] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == rows_) return Status::Unbounded;
      if (++pivots > max_pivots) return Status::IterationLimit;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Eigen::MatrixXd t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& problem, double tol, std::size_t max_pivots) {
  const std::size_t n = problem.variables;
  const std::size_t m = problem.constraints.size();

  // Column layout: [original | slack/surplus | artificial]
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  std::vector<double> sign(m, 1.0);
  std::vector<Sense> sense(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = problem.constraints[i];
    sense[i] = c.sense;
    if (c.rhs < 0.0) {
      sign[i] = -1.0;
      if (c.sense == Sense::LessEqual) sense[i] = Sense::GreaterEqual;
      else if (c.sense == Sense::GreaterEqual) sense[i] = Sense::LessEqual;
    }
    if (sense[i] != Sense::Equal) ++slack_count;
    if (sense[i] != Sense::LessEqual) ++artificial_count;
  }
  const std::size_t cols = n + slack_count + artificial_count;
  Tableau tab(m, cols);
  std::vector<bool> is_artificial(cols, false);

  std::size_t next_slack = n;
  std::size_t next_art = n + slack_count;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = problem.constraints[i];
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign[i] * c.coeffs[static_cast<Eigen::Index>(j)];
    tab.rhs(i) = sign[i] * c.rhs;
    switch (sense[i]) {
      case Sense::LessEqual:
        tab.at(i, next_slack) = 1.0;
        tab.basis()[i] = next_slack++;
        break;
      case Sense::GreaterEqual:
        tab.at(i, next_slack++) = -1.0;
        tab.at(i, next_art) = 1.0;
        is_artificial[next_art] = true;
        tab.basis()[i] = next_art++;
        break;
      case Sense::Equal:
        tab.at(i, next_art) = 1.0;
        is_artificial[next_art] = true;
        tab.basis()[i] = next_art++;
        break;
    }
  }

  Solution solution;
  std::vector<bool> allowed(cols, true);

  // Phase one: maximise -sum(artificials).
  if (artificial_count > 0) {
    for (std::size_t c = 0; c <= cols; ++c) tab.at(m, c) = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (is_artificial[c]) tab.cost(c) = 1.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (is_artificial[tab.basis()[i]]) {
        for (std::size_t c = 0; c <= cols; ++c) tab.at(m, c) -= tab.at(i, c);
      }
    }
    const Status s = tab.optimise(allowed, tol, max_pivots, solution.pivots);
    if (s == Status::IterationLimit) {
      solution.status = s;
      return solution;
    }
    if (tab.rhs(m) < -tol * std::max(1.0, static_cast<double>(m))) {
      solution.status = Status::Infeasible;
      return solution;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis()[i]]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!is_artificial[c] && std::fabs(tab.at(i, c)) > tol) {
          tab.pivot(i, c);
          break;
        }
      }
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (is_artificial[c]) allowed[c] = false;
    }
  }

  // Phase two.
  for (std::size_t c = 0; c <= cols; ++c) tab.at(m, c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) tab.cost(j) = -problem.objective[static_cast<Eigen::Index>(j)];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis()[i];
    const double cb = b < n ? problem.objective[static_cast<Eigen::Index>(b)] : 0.0;
    if (cb != 0.0) {
      for (std::size_t c = 0; c <= cols; ++c) tab.at(m, c) += cb * tab.at(i, c);
    }
  }
  const Status s = tab.optimise(allowed, tol, max_pivots, solution.pivots);
  solution.status = s;
  if (s != Status::Optimal) return solution;

  solution.x = Vec::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) solution.x[static_cast<Eigen::Index>(tab.basis()[i])] = std::max(0.0, tab.rhs(i));
  }
  solution.objective = problem.objective.dot(solution.x);
  return solution;
}

}  // namespace payctl::lp
