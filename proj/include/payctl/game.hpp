#pragma once

// Finite n-player base games.
//
// Players and actions are 0-based in the library. Action profiles are
// enumerated lexicographically with player 0 most significant, so for a
// 2x2 game the order is CC, CD, DC, DD.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "payctl/types.hpp"

namespace payctl {

using Profile = std::vector<std::size_t>;

class GameSpec {
 public:
  std::size_t player_count() const { return labels_.size(); }
  std::size_t action_count(std::size_t player) const;
  const std::vector<std::string>& action_labels(std::size_t player) const;
  std::size_t profile_count() const { return profile_count_; }

  // |A| x n, column i is player i's payoff vector.
  const Eigen::MatrixXd& payoffs() const { return payoffs_; }
  Vec payoff_vector(std::size_t player) const;

  // Action of `player` inside the profile with the given canonical index.
  std::size_t action_in(std::size_t profile_index, std::size_t player) const {
    return (profile_index / strides_[player]) % counts_[player];
  }
  std::size_t stride(std::size_t player) const { return strides_[player]; }

  std::string profile_name(std::size_t profile_index) const;

  friend bool operator==(const GameSpec& a, const GameSpec& b) {
    return a.labels_ == b.labels_ && a.payoffs_ == b.payoffs_;
  }

 private:
  friend GameSpec build_game(std::size_t, std::vector<std::vector<std::string>>,
                             const Eigen::MatrixXd&);

  std::vector<std::vector<std::string>> labels_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t profile_count_ = 0;
  Eigen::MatrixXd payoffs_;
};

// Throws DimensionMismatch, NonFiniteEntry, DuplicateActionLabel, InvalidParams.
GameSpec build_game(std::size_t player_count, std::vector<std::vector<std::string>> action_labels,
                    const Eigen::MatrixXd& payoff_rows);

GameSpec prisoners_dilemma(double reward, double sucker, double temptation, double punishment);
// Two-player donation game. Action k costs its user costs[k] and gives the
// opponent benefits[k]; a zero-cost zero-benefit action is labelled "D".
GameSpec donation_game(const std::vector<double>& costs, const std::vector<double>& benefits);
// Binary contribute/defect public goods game.
GameSpec public_goods_game(std::size_t players, double cost, double multiplier);

// String-keyed front end for the builtins above. Recognised kinds:
//   prisoners_dilemma {R,S,T,P}   donation {costs, benefits}
//   public_goods {n, cost, multiplier}
GameSpec builtin_game(std::string_view kind, const std::map<std::string, std::vector<double>>& params);

std::size_t profile_index(const GameSpec& game, const Profile& profile);
std::size_t profile_index(const GameSpec& game, const std::vector<std::string>& labels);
Profile profile_from_index(const GameSpec& game, std::size_t index);

// Validate a profile distribution: entries >= -1e-12 (clamped to 0), sum 1 within 1e-10.
Vec make_distribution(const GameSpec& game, Vec probs);

// <u_i, v>
double expected_payoff(const GameSpec& game, std::size_t player, const Vec& dist);

}  // namespace payctl
