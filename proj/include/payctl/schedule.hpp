#pragma once

// Continuation schedules c(t): after round t the next round is played with
// probability c(t). p(t) = c(1)...c(t-1) is the probability that round t is
// reached.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace payctl {

struct InfiniteSchedule {};
struct DeltaSchedule {
  double delta;
};
// c(t) = 1 for t < horizon, 0 afterwards.
struct HorizonSchedule {
  std::size_t horizon;
};
// c(t) = values[t-1] while t <= values.size(), then `tail`.
struct CustomSchedule {
  std::vector<double> values;
  double tail;
};

class ContinuationSchedule {
 public:
  using Variant = std::variant<InfiniteSchedule, DeltaSchedule, HorizonSchedule, CustomSchedule>;

  static ContinuationSchedule infinite();
  static ContinuationSchedule delta(double delta);
  static ContinuationSchedule horizon(std::size_t rounds);
  static ContinuationSchedule custom(std::vector<double> values, double tail);

  const Variant& variant() const { return variant_; }
  double continuation(std::size_t t) const;  // t >= 1
  std::string describe() const;

  friend bool operator==(const ContinuationSchedule& a, const ContinuationSchedule& b) {
    return a.variant_.index() == b.variant_.index() && a.describe() == b.describe();
  }

 private:
  explicit ContinuationSchedule(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

// p(1..t_max)
std::vector<double> survival_probabilities(const ContinuationSchedule& schedule, std::size_t t_max);

// Sum of p(t) in closed form; nullopt when it diverges.
std::optional<double> expected_rounds(const ContinuationSchedule& schedule);

enum class ScheduleClass { InfiniteExpectedRounds, DeltaRepeated, Other };

struct ScheduleClassification {
  ScheduleClass kind;
  double delta = 0.0;  // meaningful for DeltaRepeated
};

const char* to_string(ScheduleClass kind);

// Gate for strict-Markov ruling vectors: they exist only when the expected
// number of rounds is infinite or c(t) is a constant delta < 1.
ScheduleClassification classify_schedule(const ContinuationSchedule& schedule, double tol = 1e-12);

}  // namespace payctl
