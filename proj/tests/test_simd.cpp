#include <doctest.h>

#include <random>
#include <vector>

#include "payctl/simd.hpp"

using namespace payctl;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Reduction order differs between variants, so allow a few ulps per term.
double bound(std::size_t n, double scale) { return 1e-14 * static_cast<double>(n + 1) * scale; }

}  // namespace

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!simd::avx2::compiled() || simd::detected_level() != simd::Level::Avx2) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 81u, 256u, 1000u}) {
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    CHECK(std::fabs(simd::scalar::dot(x.data(), y.data(), n) - simd::avx2::dot(x.data(), y.data(), n)) <= bound(n, 1.0));
    CHECK(std::fabs(simd::scalar::l1_distance(x.data(), y.data(), n) - simd::avx2::l1_distance(x.data(), y.data(), n)) <=
          bound(n, 2.0));

    auto ys = y, yv = y;
    simd::scalar::axpy(0.37, x.data(), ys.data(), n);
    simd::avx2::axpy(0.37, x.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(ys[i] - yv[i]) <= 1e-15);

    for (std::size_t cols : {1u, 3u, 4u, 9u, 13u}) {
      const auto m = random_vector(n * cols, rng);
      std::vector<double> a(cols), b(cols);
      simd::scalar::vecmat(x.data(), m.data(), n, cols, a.data());
      simd::avx2::vecmat(x.data(), m.data(), n, cols, b.data());
      for (std::size_t j = 0; j < cols; ++j) CHECK(std::fabs(a[j] - b[j]) <= bound(n, 1.0));
    }
  }
}

TEST_CASE("dispatch can be pinned to the scalar path") {
  const auto before = simd::active_level();
  CHECK(simd::set_level(simd::Level::Scalar) == simd::Level::Scalar);
  std::vector<double> x{1, 2, 3, 4, 5}, y{5, 4, 3, 2, 1};
  CHECK(simd::dot(x, y) == 35);
  CHECK(simd::l1_distance(x, y) == 12);
  std::vector<double> m{1, 0, 0, 1, 1, 1, 2, 0, 0, 2};  // 5 x 2
  std::vector<double> out(2);
  simd::vecmat(x, m.data(), 5, 2, out);
  CHECK(out == std::vector<double>{1 + 3 + 8, 2 + 3 + 10});
  CHECK(simd::set_level(simd::Level::Avx2) == simd::detected_level());
  simd::set_level(before);
}
