#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "payctl/simd.hpp"

namespace payctl::simd {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*vecmat)(const double*, const double*, std::size_t, std::size_t, double*);
  double (*l1_distance)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{scalar::dot, scalar::axpy, scalar::vecmat, scalar::l1_distance};
constexpr Table kAvx2{avx2::dot, avx2::axpy, avx2::vecmat, avx2::l1_distance};

Level probe() {
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2::compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Level::Avx2;
  }
#endif
  return Level::Scalar;
}

Level initial_level() {
  Level level = probe();
  if (const char* env = std::getenv("PAYCTL_SIMD")) {
    if (std::string_view(env) == "scalar") level = Level::Scalar;
  }
  return level;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

const Table& table() { return current().load(std::memory_order_relaxed) == Level::Avx2 ? kAvx2 : kScalar; }

}  // namespace

const char* to_string(Level level) { return level == Level::Avx2 ? "avx2" : "scalar"; }

Level detected_level() {
  static const Level level = probe();
  return level;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

Level set_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) level = Level::Scalar;
  current().store(level, std::memory_order_relaxed);
  return level;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return table().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table().axpy(a, x.data(), y.data(), x.size());
}

void vecmat(std::span<const double> v, const double* m, std::size_t rows, std::size_t cols,
            std::span<double> out) {
  assert(v.size() == rows && out.size() == cols);
  table().vecmat(v.data(), m, rows, cols, out.data());
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return table().l1_distance(x.data(), y.data(), x.size());
}

}  // namespace payctl::simd
