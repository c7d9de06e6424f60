#pragma once

// Randomised property checks shared by the unit tests and the acceptance
// binary. Each returns the worst deviation it saw.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "payctl/dynamics.hpp"
#include "payctl/game.hpp"
#include "payctl/io.hpp"
#include "payctl/ruling.hpp"
#include "payctl/synthesis.hpp"
#include "payctl/verify.hpp"
#include "support.hpp"

namespace testing {

struct Setting {
  payctl::GameSpec game;
  std::vector<std::size_t> controllers;
};

inline std::vector<Setting> settings() {
  return {{pd(), {0}}, {donation3(), {0}}, {donation3(), {1}}, {pgg3(), {0}}, {pgg3(), {0, 1}}, {pgg3(), {1, 2}}};
}

// Strategies for every player, strict Markov (rows differ almost surely).
inline std::vector<payctl::MarkovStrategy> random_players(const payctl::GameSpec& g, std::mt19937_64& rng,
                                                          double floor) {
  std::vector<payctl::MarkovStrategy> out;
  for (std::size_t i = 0; i < g.player_count(); ++i) out.push_back(random_strategy(g, i, rng, floor));
  return out;
}

inline payctl::GroupStrategy group_of(const payctl::GameSpec& g, const std::vector<payctl::MarkovStrategy>& players,
                                      const std::vector<std::size_t>& controllers) {
  std::vector<payctl::MarkovStrategy> members;
  for (auto c : controllers) members.push_back(players[c]);
  return payctl::product_strategy(g, members);
}

struct StochasticCheck {
  double row_sum = 0.0;
  double min_entry = 0.0;
};

inline StochasticCheck stochastic_rows(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  StochasticCheck out;
  const auto all = settings();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& s = all[t % all.size()];
    const auto players = random_players(s.game, rng, t % 2 ? 0.0 : 0.05);
    const auto m = payctl::transition_matrix(s.game, payctl::make_profile(s.game, players));
    out.row_sum = std::max(out.row_sum, (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
    out.min_entry = std::min(out.min_entry, m.minCoeff());
  }
  return out;
}

// Largest |entry| of the summed ruling family. Strategies use dyadic
// probabilities so that every row sum is exact in binary floating point.
inline double family_sum_dyadic(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 64);
  double worst = 0.0;
  const auto all = settings();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& s = all[t % all.size()];
    std::vector<payctl::MarkovStrategy> members;
    for (auto c : s.controllers) {
      const auto m = s.game.action_count(c);
      auto dyadic_row = [&] {
        payctl::Vec r = payctl::Vec::Zero(static_cast<Eigen::Index>(m));
        int left = 64;
        for (std::size_t k = 0; k + 1 < m; ++k) {
          const int take = std::min(left, pick(rng));
          r[static_cast<Eigen::Index>(k)] = take / 64.0;
          left -= take;
        }
        r[static_cast<Eigen::Index>(m - 1)] = left / 64.0;
        return r;
      };
      payctl::Mat table(static_cast<Eigen::Index>(s.game.profile_count()), static_cast<Eigen::Index>(m));
      for (Eigen::Index a = 0; a < table.rows(); ++a) table.row(a) = dyadic_row().transpose();
      members.push_back(payctl::make_markov_strategy(s.game, c, dyadic_row(), table));
    }
    const auto group = payctl::product_strategy(s.game, members);
    for (double d : {-1.0, 0.5, 0.75, 0.25}) {
      const auto form = d < 0 ? payctl::RulingForm::infinite() : payctl::RulingForm::discounted(d);
      const auto fam = payctl::ruling_family(s.game, group, form);
      worst = std::max(worst, fam.rowwise().sum().cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Same sum for arbitrary random strategies.
inline double family_sum_random(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const auto all = settings();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& s = all[t % all.size()];
    const auto group = group_of(s.game, random_players(s.game, rng, 0.0), s.controllers);
    for (double d : {-1.0, 0.3, 0.9}) {
      const auto form = d < 0 ? payctl::RulingForm::infinite() : payctl::RulingForm::discounted(d);
      worst = std::max(worst, payctl::ruling_family(s.game, group, form).rowwise().sum().cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// max |<u~_j, v_bar>| over `pairs` random controller/opponent draws.
inline double vanishing_inner_product(const payctl::ContinuationSchedule& schedule, std::size_t pairs,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const auto all = settings();
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto& s = all[t % all.size()];
    // Controllers strict Markov; opponents anywhere in the simplex, some with
    // a floor so both ergodic and reducible chains appear.
    auto players = random_players(s.game, rng, 0.0);
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (std::find(s.controllers.begin(), s.controllers.end(), i) == s.controllers.end() && t % 3 == 0) {
        players[i] = random_strategy(s.game, i, rng, 0.05);
      }
    }
    const auto group = group_of(s.game, players, s.controllers);
    const auto basis = payctl::ruling_basis(s.game, group, schedule);
    const auto v = payctl::average_distribution(s.game, payctl::make_profile(s.game, players), schedule).dist;
    worst = std::max(worst, (basis.vectors.transpose() * v).cwiseAbs().maxCoeff());
  }
  return worst;
}

// For each target and lambda in {2, -1}: both scalings agree on feasibility,
// land on the same canonical relation and verify. Returns the number of
// disagreements.
inline std::size_t scaling_failures(std::size_t samples) {
  struct T {
    payctl::GameSpec game;
    payctl::Vec alpha;
    double gamma;
    std::vector<std::size_t> controllers;
  };
  auto v = [](std::initializer_list<double> x) {
    payctl::Vec out(static_cast<Eigen::Index>(x.size()));
    Eigen::Index i = 0;
    for (double e : x) out[i++] = e;
    return out;
  };
  const std::vector<T> targets = {
      {donation3(), v({0, 1}), -2, {0}},   {donation3(), v({1, -1}), 0, {0}}, {pd(), v({0, 1}), -2, {0}},
      {pd(), v({1, 0}), -2, {0}},          {pgg3(), v({0, 0, 1}), -1, {0}},   {pgg3(), v({0, 0, 1}), -1, {0, 1}},
      {pgg3(), v({1, -1, 0}), 0, {0, 2}},
  };
  std::size_t failures = 0;
  for (const auto& t : targets) {
    const auto base = payctl::synthesize(t.game, payctl::ContinuationSchedule::infinite(),
                                         {payctl::PayoffRelation{t.alpha, t.gamma}, t.controllers});
    for (double lambda : {1.0, 2.0, -1.0}) {
      const auto out = payctl::synthesize(t.game, payctl::ContinuationSchedule::infinite(),
                                          {payctl::PayoffRelation{lambda * t.alpha, lambda * t.gamma}, t.controllers});
      if (out.index() != base.index()) {
        ++failures;
        continue;
      }
      if (const auto* r = std::get_if<payctl::SynthesisResult>(&out)) {
        const auto& r0 = std::get<payctl::SynthesisResult>(base);
        payctl::VerifyOptions o;
        o.samples = samples;
        o.seed = 5;
        const auto report = payctl::verify_relation(t.game, payctl::ContinuationSchedule::infinite(), r->joint,
                                                    payctl::PayoffRelation{lambda * t.alpha, lambda * t.gamma}, o);
        if (payctl::relation_distance(r->relation, r0.relation) > 1e-12 || !report.pass) ++failures;
      }
    }
  }
  return failures;
}

inline std::size_t profile_round_trip_failures() {
  std::size_t failures = 0;
  for (const auto& s : settings()) {
    for (std::size_t a = 0; a < s.game.profile_count(); ++a) {
      failures += payctl::profile_index(s.game, payctl::profile_from_index(s.game, a)) != a;
    }
  }
  std::vector<std::vector<std::string>> labels = {{"a", "b", "c"}, {"x", "y"}, {"p", "q", "r", "s"}, {"u", "v"}};
  const auto g = payctl::build_game(4, labels, payctl::Mat::Zero(48, 4));
  for (std::size_t a = 0; a < g.profile_count(); ++a) {
    const auto p = payctl::profile_from_index(g, a);
    failures += payctl::profile_index(g, p) != a;
    std::size_t expect = 0;
    for (std::size_t i = 0; i < 4; ++i) expect = expect * labels[i].size() + p[i];
    failures += expect != a;
  }
  return failures;
}

// Random strategies written and read back; counts any inexact field.
inline std::size_t file_round_trip_failures(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t failures = 0;
  const auto all = settings();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& s = all[t % all.size()];
    payctl::Document d;
    d.game = s.game;
    d.strategies = random_players(s.game, rng, 0.0);
    d.schedule = payctl::ContinuationSchedule::delta(std::uniform_real_distribution<double>(0, 1)(rng));
    const auto back = payctl::parse_document(payctl::write_document(d));
    failures += !(*back.game == s.game) || !(*back.schedule == *d.schedule);
    for (std::size_t k = 0; k < d.strategies.size(); ++k) {
      failures += back.strategies[k].player != d.strategies[k].player ||
                  back.strategies[k].initial != d.strategies[k].initial ||
                  back.strategies[k].conditionals != d.strategies[k].conditionals;
    }
  }
  return failures;
}

}  // namespace testing
