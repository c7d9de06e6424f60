#include <doctest.h>

#include <random>

#include "payctl/error.hpp"
#include "payctl/ruling.hpp"
#include "payctl/synthesis.hpp"
#include "payctl/verify.hpp"
#include "support.hpp"

using namespace payctl;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SynthesisTarget target(Vec alpha, double gamma, std::vector<std::size_t> controllers,
                       AllianceMode mode = AllianceMode::Independent) {
  return SynthesisTarget{PayoffRelation{std::move(alpha), gamma}, std::move(controllers), mode};
}

// Checks every invariant a result promises and runs a short verification.
void check_result(const GameSpec& g, const ContinuationSchedule& schedule, const SynthesisResult& r,
                  std::size_t samples = 200) {
  CHECK(r.margin >= 0.0);
  CHECK(r.joint.conditionals.minCoeff() >= 0.0);
  CHECK((r.joint.conditionals.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(std::fabs(r.joint.initial.sum() - 1.0) < 1e-10);
  const auto basis = ruling_basis(g, r.joint, schedule);
  CHECK((basis.vectors * r.y - r.w).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(enforces(g, basis, r.relation));
  if (r.mode == AllianceMode::Independent) {
    CHECK(r.members.size() == r.joint.players.size());
    for (Eigen::Index a = 0; a < r.joint.conditionals.rows(); ++a) {
      CHECK(factorizes(g, r.joint.players, r.joint.conditionals.row(a).transpose()));
    }
  }
  VerifyOptions opts;
  opts.samples = samples;
  opts.seed = 1;
  const auto report = verify_relation(g, schedule, r.joint, r.relation, opts);
  CHECK(report.pass);
  CHECK(report.max_abs_violation < 1e-8);
}

}  // namespace

TEST_CASE("pin in the donation game") {
  const auto g = testing::donation3();
  const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 1}), -2, {0}));
  REQUIRE(std::holds_alternative<SynthesisResult>(out));
  const auto& r = std::get<SynthesisResult>(out);
  CHECK(r.y.size() == 2);
  check_result(g, ContinuationSchedule::infinite(), r);
  const auto rel = detect_relations(g, r.joint, ContinuationSchedule::infinite());
  REQUIRE(rel.size() == 1);
  CHECK(relation_distance(rel[0], make_relation(vec({0, 1}), -2)) < 1e-8);
}

TEST_CASE("equaliser in the donation game") {
  const auto g = testing::donation3();
  const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({1, -1}), 0, {0}));
  REQUIRE(std::holds_alternative<SynthesisResult>(out));
  check_result(g, ContinuationSchedule::infinite(), std::get<SynthesisResult>(out));
}

TEST_CASE("a single public goods player cannot pin a third payoff") {
  const auto g = testing::pgg3();
  for (double level : {-4.0, -1.0, 0.0, 1.0, 1.5, 2.0, 4.0}) {
    const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 0, 1}), -level, {0}));
    REQUIRE(std::holds_alternative<Infeasible>(out));
    CHECK(std::get<Infeasible>(out).kind == InfeasibleKind::ExactIntervalEmpty);
    CHECK(std::get<Infeasible>(out).conclusive);
  }
}

TEST_CASE("an alliance of two pins the third payoff") {
  const auto g = testing::pgg3();
  for (auto mode : {AllianceMode::Independent, AllianceMode::Correlated}) {
    const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 0, 1}), -1, {0, 1}, mode));
    REQUIRE(std::holds_alternative<SynthesisResult>(out));
    const auto& r = std::get<SynthesisResult>(out);
    CHECK(r.mode == mode);
    CHECK(r.y.size() == 3);
    check_result(g, ContinuationSchedule::infinite(), r);
  }
  const auto protect = synthesize(g, ContinuationSchedule::infinite(), target(vec({1, 0, 0}), -1, {0, 1}));
  REQUIRE(std::holds_alternative<SynthesisResult>(protect));
  check_result(g, ContinuationSchedule::infinite(), std::get<SynthesisResult>(protect));
}

TEST_CASE("discounted pin in the prisoner's dilemma") {
  const auto pd = testing::pd();
  const auto schedule = ContinuationSchedule::delta(0.9);
  const auto out = synthesize(pd, schedule, target(vec({0, 1}), -2, {0}));
  REQUIRE(std::holds_alternative<SynthesisResult>(out));
  const auto& r = std::get<SynthesisResult>(out);
  CHECK(r.form.kind == RulingForm::Kind::Delta);
  check_result(pd, schedule, r);
}

TEST_CASE("discounting can make a pin infeasible") {
  // With delta = 0 every relation would have to hold in the first round.
  const auto pd = testing::pd();
  const auto out = synthesize(pd, ContinuationSchedule::delta(0.0), target(vec({0, 1}), -2, {0}));
  REQUIRE(std::holds_alternative<Infeasible>(out));
  CHECK(std::get<Infeasible>(out).kind == InfeasibleKind::ExactLpEmpty);
}

TEST_CASE("two-column scheme") {
  // Player 1 has three actions; the target vanishes whenever player 1 last
  // played Z, so only the A and B columns need to move.
  Eigen::MatrixXd pay(6, 2);
  pay << 0, 2, 0, 3, 0, 1, 0, 0, 0, 1.5, 0, 1.5;
  const auto g = build_game(2, {{"A", "B", "Z"}, {"L", "R"}}, pay);
  const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 1}), -1.5, {0}));
  REQUIRE(std::holds_alternative<SynthesisResult>(out));
  CHECK(std::get<SynthesisResult>(out).method == SynthesisMethod::TwoColumn);
  check_result(g, ContinuationSchedule::infinite(), std::get<SynthesisResult>(out));
}

TEST_CASE("synthesis errors") {
  const auto g = testing::donation3();
  CHECK_THROWS_WITH_AS(synthesize(g, ContinuationSchedule::horizon(4), target(vec({0, 1}), -2, {0})),
                       doctest::Contains("UnsupportedSchedule"), Error);
  Eigen::MatrixXd mp(4, 2);
  mp << 1, -1, -1, 1, -1, 1, 1, -1;
  const auto zs = build_game(2, {{"H", "T"}, {"H", "T"}}, mp);
  CHECK_THROWS_WITH_AS(synthesize(zs, ContinuationSchedule::infinite(), target(vec({1, 1}), 0, {0})),
                       doctest::Contains("TrivialTarget"), Error);
  CHECK_THROWS_AS(synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 1}), -2, {})), Error);
  CHECK_THROWS_AS(synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 1}), -2, {2})), Error);
  CHECK_THROWS_AS(synthesize(g, ContinuationSchedule::infinite(), target(vec({0, 1, 1}), -2, {0})), Error);
}

TEST_CASE("single-controller feasibility agrees with a strategy grid") {
  // Prisoner's dilemma, player 1 alone: the only ruling vector is
  // s_C - rep_C, so a strategy enforces w iff that vector is a nonzero
  // multiple of w. Search all conditionals on a 0.05 grid.
  const auto pd = testing::pd();
  struct Case {
    Vec alpha;
    double gamma;
  };
  const std::vector<Case> cases = {
      {vec({0, 1}), -0.5}, {vec({0, 1}), -1.0}, {vec({0, 1}), -1.5}, {vec({0, 1}), -2.0},
      {vec({0, 1}), -2.5}, {vec({0, 1}), -3.0}, {vec({0, 1}), -3.5}, {vec({1, 0}), -1.0},
      {vec({1, 0}), -2.0}, {vec({1, -1}), 0.0}, {vec({1, -2}), 1.0}, {vec({1, 1}), -4.0},
  };
  for (const auto& c : cases) {
    const PayoffRelation rel{c.alpha, c.gamma};
    const Vec w = combined_payoff_vector(pd, rel);
    bool grid_found = false;
    for (int i0 = 0; i0 <= 20 && !grid_found; ++i0)
      for (int i1 = 0; i1 <= 20 && !grid_found; ++i1)
        for (int i2 = 0; i2 <= 20 && !grid_found; ++i2)
          for (int i3 = 0; i3 <= 20 && !grid_found; ++i3) {
            const double u[4] = {i0 * 0.05 - 1, i1 * 0.05 - 1, i2 * 0.05, i3 * 0.05};
            double norm = 0, cross = 0;
            for (int a = 0; a < 4; ++a) {
              norm = std::max(norm, std::fabs(u[a]));
              for (int b = 0; b < 4; ++b) cross = std::max(cross, std::fabs(u[a] * w[b] - u[b] * w[a]));
            }
            grid_found = norm > 1e-12 && cross < 1e-9;
          }
    const auto out = synthesize(pd, ContinuationSchedule::infinite(), target(c.alpha, c.gamma, {0}));
    const bool feasible = std::holds_alternative<SynthesisResult>(out);
    INFO("alpha = " << c.alpha.transpose() << ", gamma = " << c.gamma);
    CHECK(feasible == grid_found);
    if (feasible) {
      CHECK(std::get<SynthesisResult>(out).method == SynthesisMethod::IntervalR1);
    } else {
      CHECK(std::get<Infeasible>(out).kind == InfeasibleKind::ExactIntervalEmpty);
    }
  }
}

TEST_CASE("scaling the target changes nothing") {
  const auto g = testing::donation3();
  for (double lambda : {2.0, -1.0}) {
    const auto out = synthesize(g, ContinuationSchedule::infinite(), target(vec({0, lambda}), -2 * lambda, {0}));
    REQUIRE(std::holds_alternative<SynthesisResult>(out));
    const auto& r = std::get<SynthesisResult>(out);
    CHECK(relation_distance(r.relation, make_relation(vec({0, 1}), -2)) < 1e-12);
    check_result(g, ContinuationSchedule::infinite(), r);
  }
  const auto pg = testing::pgg3();
  for (double lambda : {2.0, -1.0}) {
    const auto out = synthesize(pg, ContinuationSchedule::infinite(), target(vec({0, 0, lambda}), -lambda, {0}));
    REQUIRE(std::holds_alternative<Infeasible>(out));
  }
}
