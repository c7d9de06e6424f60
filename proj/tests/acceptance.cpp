// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "payctl/error.hpp"
#include "properties.hpp"

using namespace payctl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

VerifyReport run_verify(const GameSpec& g, const GroupStrategy& group, const PayoffRelation& rel,
                        std::size_t samples, std::uint64_t seed,
                        const ContinuationSchedule& schedule = ContinuationSchedule::infinite()) {
  VerifyOptions o;
  o.samples = samples;
  o.seed = seed;
  o.tol = 1e-8;
  return verify_relation(g, schedule, group, rel, o);
}

Outcome pin() {
  const auto g = testing::donation3();
  const auto doc = testing::load_strategy(g, "pin_u2.strategy");
  const auto t0 = Clock::now();
  const auto r = run_verify(g, product_strategy(g, doc.strategies), make_relation(vec({0, 1}), -2), 20000, 7);
  const double secs = seconds_since(t0);
  return {r.max_interior < 1e-8 && r.max_boundary < 1e-6 && secs < 60.0 && r.skipped == 0,
          fmt("interior %.3g, boundary %.3g, skipped %zu, %.2f s", r.max_interior, r.max_boundary, r.skipped, secs)};
}

Outcome equalizer() {
  const auto g = testing::donation3();
  const auto doc = testing::load_strategy(g, "equalizer.strategy");
  const auto r = run_verify(g, product_strategy(g, doc.strategies), make_relation(vec({1, -1}), 0), 20000, 8);
  return {r.max_abs_violation < 1e-8 && r.skipped == 0,
          fmt("max |u1 - u2| %.3g, skipped %zu", r.max_abs_violation, r.skipped)};
}

Outcome alliance() {
  const auto g = testing::pgg3();
  const auto protect = testing::load_strategy(g, "alliance_pin_u1.strategy");
  const auto fix = testing::load_strategy(g, "alliance_pin_u3.strategy");
  const auto a = run_verify(g, product_strategy(g, protect.strategies), make_relation(vec({1, 0, 0}), -1), 20000, 9);
  const auto b = run_verify(g, product_strategy(g, fix.strategies), make_relation(vec({0, 0, 1}), -1), 20000, 10);
  return {a.max_abs_violation < 1e-8 && b.max_abs_violation < 1e-8 && a.skipped == 0 && b.skipped == 0,
          fmt("max |u1 - 1| %.3g, max |u3 - 1| %.3g", a.max_abs_violation, b.max_abs_violation)};
}

Outcome infeasibility() {
  const auto g = testing::pgg3();
  const auto t0 = Clock::now();
  std::size_t certified = 0;
  for (int k = 0; k <= 80; ++k) {
    const double level = -4.0 + 0.1 * k;
    const auto out = synthesize(g, ContinuationSchedule::infinite(),
                                {PayoffRelation{vec({0, 0, 1}), -level}, {0}, AllianceMode::Independent});
    const auto* inf = std::get_if<Infeasible>(&out);
    certified += inf && inf->kind == InfeasibleKind::ExactIntervalEmpty && inf->conclusive;
  }
  const double secs = seconds_since(t0);
  return {certified == 81 && secs < 5.0, fmt("%zu/81 exact-interval certificates, %.3f s", certified, secs)};
}

Outcome round_trip() {
  const auto g = testing::donation3();
  double worst = 0.0;
  bool ok = true;
  for (const auto& target : {make_relation(vec({0, 1}), -2), make_relation(vec({1, -1}), 0)}) {
    const auto out = synthesize(g, ContinuationSchedule::infinite(), {target, {0}, AllianceMode::Independent});
    const auto* r = std::get_if<SynthesisResult>(&out);
    if (!r) return {false, "synthesis reported infeasible"};
    double best = 1e300;
    for (const auto& rel : detect_relations(g, r->joint, ContinuationSchedule::infinite())) {
      best = std::min(best, relation_distance(rel, target));
    }
    worst = std::max(worst, best);
    ok = ok && best < 1e-8 && run_verify(g, r->joint, target, 1000, 11).pass;
  }
  return {ok, fmt("worst detection distance %.3g, both verify at 1e-8 over 1000 samples: %s", worst,
                  ok ? "yes" : "no")};
}

Outcome delta_form() {
  const auto pd = testing::pd();
  const auto schedule = ContinuationSchedule::delta(0.9);
  const auto target = make_relation(vec({0, 1}), -2);
  const auto out = synthesize(pd, schedule, {target, {0}, AllianceMode::Independent});
  const auto* r = std::get_if<SynthesisResult>(&out);
  if (!r) return {false, "synthesis reported infeasible"};
  const auto report = run_verify(pd, r->joint, target, 1000, 12, schedule);

  // Closed form against the plain 500-term truncated sum.
  std::mt19937_64 rng(13);
  double gap = 0.0;
  const auto controller = marginals(pd, r->joint).at(0);
  for (std::size_t i = 0; i < 200; ++i) {
    const auto opp = sample_opponent(pd, 1, is_boundary_sample(i, 0.1), rng);
    const auto closed = average_distribution(pd, make_profile(pd, std::vector{controller, opp}), schedule);
    const Vec sum = testing::truncated_average(pd, {controller, opp}, [](std::size_t) { return 0.9; }, 500);
    gap = std::max(gap, (closed.dist - sum).cwiseAbs().maxCoeff());
  }
  return {report.max_abs_violation < 1e-8 && gap < 1e-10,
          fmt("max |u2 - 2| %.3g, closed form vs 500-term sum %.3g", report.max_abs_violation, gap)};
}

Outcome horizon_harness() {
  const auto pd = testing::pd();
  const auto wsls = testing::load_strategy(pd, "wsls.strategy").strategies.at(0);
  const auto group = product_strategy(pd, std::span(&wsls, 1));
  const Vec candidate = ruling_family(pd, group, RulingForm::infinite()).col(0);
  FalsifyOptions fo;
  fo.seed = 14;
  const auto report = falsify_candidate(pd, ContinuationSchedule::horizon(2), group, candidate, fo);

  auto two_rounds = [&](const MarkovStrategy& opp) {
    const Vec v = testing::truncated_average(pd, {wsls, opp}, [](std::size_t) { return 1.0; }, 2);
    return std::fabs(candidate.dot(v));
  };
  // Opponent grid: initial P(C) and four conditionals, step 0.1.
  double grid_best = 0.0;
  for (int i0 = 0; i0 <= 10; ++i0)
    for (int i1 = 0; i1 <= 10; ++i1)
      for (int i2 = 0; i2 <= 10; ++i2)
        for (int i3 = 0; i3 <= 10; ++i3)
          for (int i4 = 0; i4 <= 10; ++i4) {
            const auto opp = testing::two_action(pd, 1, {i1 / 10.0, i2 / 10.0, i3 / 10.0, i4 / 10.0}, i0 / 10.0);
            grid_best = std::max(grid_best, two_rounds(opp));
          }
  const double recomputed = report.counterexample ? two_rounds(report.counterexample->at(0)) : 0.0;
  const bool ok = report.counterexample && report.achieved > 1e-3 && grid_best > 1e-3 &&
                  std::fabs(recomputed - report.achieved) < 1e-12 && report.achieved <= grid_best + 1e-12;
  return {ok, fmt("falsifier %.6g (recomputed %.6g), grid maximum %.6g", report.achieved, recomputed, grid_best)};
}

Outcome properties() {
  const auto rows = testing::stochastic_rows(300, 21);
  const double dyadic = testing::family_sum_dyadic(120, 22);
  const double family = testing::family_sum_random(120, 23);
  const double inf = testing::vanishing_inner_product(ContinuationSchedule::infinite(), 500, 24);
  const double d3 = testing::vanishing_inner_product(ContinuationSchedule::delta(0.3), 500, 25);
  const double d9 = testing::vanishing_inner_product(ContinuationSchedule::delta(0.9), 500, 26);
  const auto scaling = testing::scaling_failures(200);
  const auto profiles = testing::profile_round_trip_failures();
  const auto files = testing::file_round_trip_failures(60, 27);
  const bool ok = rows.row_sum < 1e-10 && rows.min_entry >= 0.0 && dyadic == 0.0 && family < 1e-14 && inf < 1e-8 &&
                  d3 < 1e-8 && d9 < 1e-8 && scaling == 0 && profiles == 0 && files == 0;
  return {ok, fmt("rows %.2g, family %.2g/%.2g, <u,v> %.2g/%.2g/%.2g, scaling %zu, profiles %zu, files %zu",
                  rows.row_sum, dyadic, family, inf, d3, d9, scaling, profiles, files)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"pin reproduction", pin},
      {"equalizer reproduction", equalizer},
      {"alliance reproduction", alliance},
      {"single-controller infeasibility", infeasibility},
      {"synthesis round trip", round_trip},
      {"discounted ruling vectors", delta_form},
      {"two-round horizon harness", horizon_harness},
      {"property suites", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %-32s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
