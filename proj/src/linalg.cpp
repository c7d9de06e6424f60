#include "payctl/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace payctl::linalg {

namespace {

double threshold(const Eigen::VectorXd& singular, double rel_tol) {
  const double top = singular.size() > 0 ? singular.maxCoeff() : 0.0;
  return rel_tol * top;
}

}  // namespace

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.cols() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = threshold(s, rel_tol);
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > cut && s[r] > 0.0) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

std::size_t rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  const double cut = threshold(s, rel_tol);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cut && s[i] > 0.0) ++r;
  }
  return r;
}

Eigen::MatrixXd column_basis(const Eigen::MatrixXd& a, double rel_tol, double abs_tol) {
  if (a.size() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = std::max(threshold(s, rel_tol), abs_tol);
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > cut && s[r] > 0.0) ++r;
  return svd.matrixU().leftCols(r);
}

std::optional<Vec> unique_stationary(const Mat& m) {
  const Eigen::Index n = m.rows();
  // Rows of (I - M)^T are dependent through the all-ones combination, so the
  // last one can be replaced by the normalisation constraint.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd(m.transpose());
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return std::nullopt;
  Vec v = lu.solve(rhs);
  return v;
}

ChainClasses communicating_classes(const Mat& m) {
  // Tarjan's algorithm, iterative so deep chains cannot overflow the stack.
  const std::size_t n = static_cast<std::size_t>(m.rows());
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnseen), low(n, 0), comp(n, kUnseen);
  std::vector<std::size_t> stack, call;
  std::vector<std::size_t> next_edge(n, 0);
  std::vector<bool> on_stack(n, false);
  ChainClasses out;
  std::size_t counter = 0;
  auto edge = [&](std::size_t a, std::size_t b) {
    return m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) > 0.0;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnseen) continue;
    call.push_back(root);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      const std::size_t v = call.back();
      if (next_edge[v] < n) {
        const std::size_t w = next_edge[v]++;
        if (!edge(v, w)) continue;
        if (index[w] == kUnseen) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back(w);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
      if (low[v] != index[v]) continue;
      std::vector<std::size_t> members;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = out.members.size();
        members.push_back(w);
      } while (w != v);
      std::sort(members.begin(), members.end());
      out.members.push_back(std::move(members));
    }
  }
  out.closed.assign(out.members.size(), true);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (comp[a] != comp[b] && edge(a, b)) out.closed[comp[a]] = false;
    }
  }
  return out;
}

Vec cesaro_limit(const Mat& m, const Vec& start) {
  const auto classes = communicating_classes(m);
  const Eigen::Index n = m.rows();
  std::vector<std::size_t> transient;
  for (std::size_t c = 0; c < classes.members.size(); ++c) {
    if (!classes.closed[c]) transient.insert(transient.end(), classes.members[c].begin(), classes.members[c].end());
  }
  std::sort(transient.begin(), transient.end());
  const auto at = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  // h = start_T (I - M_TT)^-1: expected visits to each transient state.
  Eigen::VectorXd visits;
  if (!transient.empty()) {
    const Eigen::Index k = at(transient.size());
    Eigen::MatrixXd system(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      rhs[i] = start[at(transient[static_cast<std::size_t>(i)])];
      for (Eigen::Index j = 0; j < k; ++j) {
        system(i, j) = (i == j ? 1.0 : 0.0) - m(at(transient[static_cast<std::size_t>(j)]), at(transient[static_cast<std::size_t>(i)]));
      }
    }
    visits = system.partialPivLu().solve(rhs);
  }

  Vec limit = Vec::Zero(n);
  for (std::size_t c = 0; c < classes.members.size(); ++c) {
    if (!classes.closed[c]) continue;
    const auto& members = classes.members[c];
    double mass = 0.0;
    for (auto a : members) mass += start[at(a)];
    for (std::size_t i = 0; i < transient.size(); ++i) {
      double into = 0.0;
      for (auto b : members) into += m(at(transient[i]), at(b));
      mass += visits[at(i)] * into;
    }
    if (mass <= 0.0) continue;
    const Eigen::Index k = at(members.size());
    Mat sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(at(members[static_cast<std::size_t>(i)]), at(members[static_cast<std::size_t>(j)]));
    }
    // An irreducible block has a unique stationary law, so the bordered
    // system is nonsingular however small the entries are.
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd(sub.transpose());
    system.row(k - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs[k - 1] = 1.0;
    const Vec pi = system.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < k; ++i) limit[at(members[static_cast<std::size_t>(i)])] += mass * pi[i];
  }
  return limit;
}

}  // namespace payctl::linalg
