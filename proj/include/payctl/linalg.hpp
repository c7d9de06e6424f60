#pragma once

// Thin wrappers over Eigen decompositions used by the ruling computations.

#include <cstddef>
#include <optional>
#include <vector>

#include "payctl/types.hpp"

namespace payctl::linalg {

// Orthonormal basis (columns) of the null space of `a`. Singular values at or
// below rel_tol * sigma_max count as zero.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

// Numerical rank with the same threshold rule.
std::size_t rank(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

// Orthonormal basis of the column space. Singular values must also exceed
// abs_tol, which keeps numerically-zero input from yielding a basis.
Eigen::MatrixXd column_basis(const Eigen::MatrixXd& a, double rel_tol = 1e-9, double abs_tol = 0.0);

// Unique stationary distribution of a row-stochastic matrix, if the system
// v (I - M) = 0, sum v = 1 has full rank. nullopt when it is rank deficient.
std::optional<Vec> unique_stationary(const Mat& m);

// Communicating classes of the chain (edges are the strictly positive
// entries), each listed ascending, plus whether each class is closed.
struct ChainClasses {
  std::vector<std::vector<std::size_t>> members;
  std::vector<bool> closed;
};
ChainClasses communicating_classes(const Mat& m);

// lim (1/T) sum_{t<T} start M^t, computed exactly: the stationary law of every
// closed class, weighted by the probability of ending up in that class.
Vec cesaro_limit(const Mat& m, const Vec& start);

}  // namespace payctl::linalg
