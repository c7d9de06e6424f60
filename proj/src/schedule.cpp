#include "payctl/schedule.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "payctl/error.hpp"

namespace payctl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_probability(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    std::ostringstream msg;
    msg << what << " " << x << " outside [0,1]";
    throw Error(ErrorKind::InvalidParams, msg.str());
  }
}

// Probability of reaching the first round after the explicit list.
double custom_prefix_survival(const CustomSchedule& s) {
  double p = 1.0;
  for (double c : s.values) p *= c;
  return p;
}

}  // namespace

ContinuationSchedule ContinuationSchedule::infinite() { return ContinuationSchedule(InfiniteSchedule{}); }

ContinuationSchedule ContinuationSchedule::delta(double delta) {
  if (!std::isfinite(delta) || delta < 0.0 || delta >= 1.0) {
    throw Error(ErrorKind::InvalidParams, "delta must lie in [0,1)");
  }
  return ContinuationSchedule(DeltaSchedule{delta});
}

ContinuationSchedule ContinuationSchedule::horizon(std::size_t rounds) {
  if (rounds < 1) throw Error(ErrorKind::InvalidParams, "horizon must be >= 1");
  return ContinuationSchedule(HorizonSchedule{rounds});
}

ContinuationSchedule ContinuationSchedule::custom(std::vector<double> values, double tail) {
  for (double c : values) check_probability(c, "continuation probability");
  check_probability(tail, "tail continuation probability");
  return ContinuationSchedule(CustomSchedule{std::move(values), tail});
}

double ContinuationSchedule::continuation(std::size_t t) const {
  return std::visit(Overloaded{
                        [](const InfiniteSchedule&) { return 1.0; },
                        [](const DeltaSchedule& s) { return s.delta; },
                        [t](const HorizonSchedule& s) { return t < s.horizon ? 1.0 : 0.0; },
                        [t](const CustomSchedule& s) {
                          return t >= 1 && t <= s.values.size() ? s.values[t - 1] : s.tail;
                        },
                    },
                    variant_);
}

// Shortest text that reads back to the same double, so equal schedules
// describe identically.
static std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string ContinuationSchedule::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const InfiniteSchedule&) { out << "infinite"; },
                 [&](const DeltaSchedule& s) { out << "delta:" << shortest(s.delta); },
                 [&](const HorizonSchedule& s) { out << "horizon:" << s.horizon; },
                 [&](const CustomSchedule& s) {
                   out << "custom:[";
                   for (std::size_t i = 0; i < s.values.size(); ++i) out << (i ? "," : "") << shortest(s.values[i]);
                   out << "],tail=" << shortest(s.tail);
                 },
             },
             variant_);
  return out.str();
}

std::vector<double> survival_probabilities(const ContinuationSchedule& schedule, std::size_t t_max) {
  if (t_max < 1) throw Error(ErrorKind::InvalidParams, "t_max must be >= 1");
  std::vector<double> p(t_max);
  p[0] = 1.0;
  for (std::size_t t = 1; t < t_max; ++t) p[t] = p[t - 1] * schedule.continuation(t);
  return p;
}

std::optional<double> expected_rounds(const ContinuationSchedule& schedule) {
  return std::visit(
      Overloaded{
          [](const InfiniteSchedule&) -> std::optional<double> { return std::nullopt; },
          [](const DeltaSchedule& s) -> std::optional<double> { return 1.0 / (1.0 - s.delta); },
          [](const HorizonSchedule& s) -> std::optional<double> {
            return static_cast<double>(s.horizon);
          },
          [](const CustomSchedule& s) -> std::optional<double> {
            // Explicit prefix summed term by term, constant tail in closed form.
            double total = 0.0;
            double p = 1.0;
            for (std::size_t t = 0; t < s.values.size() && p > 0.0; ++t) {
              total += p;
              p *= s.values[t];
            }
            if (p == 0.0) return total;
            if (s.tail >= 1.0) return std::nullopt;
            return total + p / (1.0 - s.tail);
          },
      },
      schedule.variant());
}

const char* to_string(ScheduleClass kind) {
  switch (kind) {
    case ScheduleClass::InfiniteExpectedRounds: return "InfiniteExpectedRounds";
    case ScheduleClass::DeltaRepeated: return "DeltaRepeated";
    case ScheduleClass::Other: return "Other";
  }
  return "Other";
}

ScheduleClassification classify_schedule(const ContinuationSchedule& schedule, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tol must be > 0");
  using K = ScheduleClass;
  return std::visit(
      Overloaded{
          [](const InfiniteSchedule&) { return ScheduleClassification{K::InfiniteExpectedRounds}; },
          [](const DeltaSchedule& s) { return ScheduleClassification{K::DeltaRepeated, s.delta}; },
          [](const HorizonSchedule& s) {
            // One round only is c = 0 everywhere, i.e. the delta = 0 game.
            if (s.horizon == 1) return ScheduleClassification{K::DeltaRepeated, 0.0};
            return ScheduleClassification{K::Other};
          },
          [tol](const CustomSchedule& s) {
            bool constant = true;
            for (double c : s.values) constant = constant && std::fabs(c - s.tail) <= tol;
            if (constant && s.tail >= 1.0 - tol) return ScheduleClassification{K::InfiniteExpectedRounds};
            if (constant) return ScheduleClassification{K::DeltaRepeated, s.tail};
            // Divergent sum of p(t): every later round is reached with the same positive
            // probability.
            if (s.tail >= 1.0 && custom_prefix_survival(s) > 0.0) {
              return ScheduleClassification{K::InfiniteExpectedRounds};
            }
            return ScheduleClassification{K::Other};
          },
      },
      schedule.variant());
}

}  // namespace payctl
