#pragma once

// Shared fixtures and independent reference computations for the tests.
// The oracles here deliberately avoid the library's own solvers: they
// simulate distributions round by round with plain loops.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "payctl/game.hpp"
#include "payctl/io.hpp"
#include "payctl/strategy.hpp"

namespace testing {

using payctl::GameSpec;
using payctl::Mat;
using payctl::Vec;

inline std::string games_dir() { return PAYCTL_GAMES_DIR; }

inline GameSpec donation3() {
  return payctl::donation_game({2.0, 1.0, 0.0}, {5.0, 3.0, 0.0});
}

inline GameSpec pgg3() { return payctl::public_goods_game(3, 3.0, 2.0); }

inline GameSpec pd() { return payctl::prisoners_dilemma(3.0, 0.0, 5.0, 1.0); }

inline payctl::Document load_strategy(const GameSpec& game, const std::string& name) {
  return payctl::read_document(games_dir() + "/" + name, &game);
}

// Strategy for a two-action player from its P(C | a) column.
inline payctl::MarkovStrategy two_action(const GameSpec& game, std::size_t player,
                                         const std::vector<double>& coop, double initial_coop = 1.0) {
  Mat table(static_cast<Eigen::Index>(coop.size()), 2);
  for (std::size_t a = 0; a < coop.size(); ++a) {
    table(static_cast<Eigen::Index>(a), 0) = coop[a];
    table(static_cast<Eigen::Index>(a), 1) = 1.0 - coop[a];
  }
  Vec init(2);
  init << initial_coop, 1.0 - initial_coop;
  return payctl::make_markov_strategy(game, player, init, table);
}

// Plain-loop transition matrix: M[a][b] = prod_i s_i(b_i | a).
inline std::vector<std::vector<double>> naive_transition(const GameSpec& game,
                                                         const std::vector<payctl::MarkovStrategy>& players) {
  const std::size_t n = game.profile_count();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (const auto& s : players) {
        m[a][b] *= s.conditionals(static_cast<Eigen::Index>(a),
                                  static_cast<Eigen::Index>(game.action_in(b, s.player)));
      }
    }
  }
  return m;
}

inline std::vector<double> naive_start(const GameSpec& game, const std::vector<payctl::MarkovStrategy>& players) {
  std::vector<double> v(game.profile_count(), 1.0);
  for (std::size_t b = 0; b < v.size(); ++b) {
    for (const auto& s : players) v[b] *= s.initial[static_cast<Eigen::Index>(game.action_in(b, s.player))];
  }
  return v;
}

inline std::vector<double> naive_step(const std::vector<std::vector<double>>& m, const std::vector<double>& v) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = 0; b < v.size(); ++b) out[b] += v[a] * m[a][b];
  }
  return out;
}

// sum_{t=1}^{T} p(t) v(t) / sum p(t) with p(t) = prod_{s<t} c(s).
template <typename Continuation>
Vec truncated_average(const GameSpec& game, const std::vector<payctl::MarkovStrategy>& players,
                      Continuation c, std::size_t rounds) {
  const auto m = naive_transition(game, players);
  auto v = naive_start(game, players);
  std::vector<double> sum(v.size(), 0.0);
  double p = 1.0;
  double total = 0.0;
  for (std::size_t t = 1; t <= rounds && p > 0.0; ++t) {
    for (std::size_t b = 0; b < v.size(); ++b) sum[b] += p * v[b];
    total += p;
    p *= c(t);
    v = naive_step(m, v);
  }
  Vec out(static_cast<Eigen::Index>(sum.size()));
  for (std::size_t b = 0; b < sum.size(); ++b) out[static_cast<Eigen::Index>(b)] = sum[b] / total;
  return out;
}

// Literal running average (1/T) sum_{t<=T} v(t).
inline Vec running_average(const GameSpec& game, const std::vector<payctl::MarkovStrategy>& players,
                           std::size_t rounds) {
  return truncated_average(game, players, [](std::size_t) { return 1.0; }, rounds);
}

// Uniform draw of a row-stochastic strategy with entries in [lo, hi] for two actions.
inline payctl::MarkovStrategy random_strategy(const GameSpec& game, std::size_t player, std::mt19937_64& rng,
                                              double floor = 0.0) {
  const std::size_t m = game.action_count(player);
  std::exponential_distribution<double> e(1.0);
  auto row = [&] {
    Vec r(static_cast<Eigen::Index>(m));
    for (Eigen::Index k = 0; k < r.size(); ++k) r[k] = e(rng);
    r /= r.sum();
    return Vec(Vec::Constant(r.size(), floor) + (1.0 - floor * static_cast<double>(m)) * r);
  };
  Mat table(static_cast<Eigen::Index>(game.profile_count()), static_cast<Eigen::Index>(m));
  for (Eigen::Index a = 0; a < table.rows(); ++a) table.row(a) = row().transpose();
  Vec init = row();
  init /= init.sum();
  for (Eigen::Index a = 0; a < table.rows(); ++a) table.row(a) /= table.row(a).sum();
  return payctl::make_markov_strategy(game, player, init, table);
}

}  // namespace testing
