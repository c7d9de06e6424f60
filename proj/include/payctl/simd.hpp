#pragma once

// Dense double-precision kernels used by the chain and ruling computations.
//
// Every kernel has a portable scalar reference and an AVX2/FMA variant. The
// variant is picked once at startup from CPUID and can be overridden with
// set_level() or the PAYCTL_SIMD environment variable ("scalar" | "avx2").
// The two variants agree to within rounding; FMA contraction means they are
// not bit-identical.

#include <cstddef>
#include <span>

namespace payctl::simd {

enum class Level { Scalar, Avx2 };

const char* to_string(Level level);

// Highest level the running CPU supports.
Level detected_level();
Level active_level();
// Clamped to detected_level(); returns the level actually installed.
Level set_level(Level level);

double dot(std::span<const double> x, std::span<const double> y);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// out = v^T M, M row-major rows x cols. out must not alias v or M.
void vecmat(std::span<const double> v, const double* m, std::size_t rows, std::size_t cols,
            std::span<double> out);
double l1_distance(std::span<const double> x, std::span<const double> y);

// Direct access to each implementation, for equivalence tests and benchmarks.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void vecmat(const double* v, const double* m, std::size_t rows, std::size_t cols, double* out);
double l1_distance(const double* x, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void vecmat(const double* v, const double* m, std::size_t rows, std::size_t cols, double* out);
double l1_distance(const double* x, const double* y, std::size_t n);
}  // namespace avx2

}  // namespace payctl::simd
