#pragma once

#include <Eigen/Dense>
#include <span>

namespace payctl {

using Vec = Eigen::VectorXd;
// Row-major so that a row (one conditioning profile, or one chain state) is contiguous.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> view(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<double> view(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace payctl
