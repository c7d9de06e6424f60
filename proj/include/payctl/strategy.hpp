#pragma once

// Markov (one-step memory) strategies.
//
// A MarkovStrategy is one player's initial mixed action plus one mixed action
// per last-round profile. A GroupStrategy is the same object for a set of
// players acting jointly: its rows are distributions over the group's joint
// actions. Independent players are a GroupStrategy whose rows are product
// distributions; a correlated alliance may use arbitrary joint rows.

#include <cstddef>
#include <span>
#include <vector>

#include "payctl/game.hpp"
#include "payctl/types.hpp"

namespace payctl {

inline constexpr double kMixedActionTol = 1e-12;

// Validate a mixed action over `actions` entries (entries in [0,1], sum 1).
// `what` names the row in error messages.
void check_mixed_action(const Vec& probs, std::size_t actions, const std::string& what);

struct MarkovStrategy {
  std::size_t player = 0;
  Vec initial;       // m_i entries
  Mat conditionals;  // |A| x m_i; row a is the next-action distribution after profile a
};

// Validates shapes and every row. Throws InconsistentStrategy / InvalidProbability.
MarkovStrategy make_markov_strategy(const GameSpec& game, std::size_t player, Vec initial,
                                    Mat conditionals);

// Deterministically replays the player's own last action.
MarkovStrategy repeat_strategy(const GameSpec& game, std::size_t player, Vec initial);
// Same mixed action after every history.
MarkovStrategy memoryless_strategy(const GameSpec& game, std::size_t player, const Vec& mix);

// Maps joint actions of a player subset to indices, lexicographic with the
// lowest-numbered player most significant.
class JointIndex {
 public:
  JointIndex(const GameSpec& game, std::vector<std::size_t> players);

  const std::vector<std::size_t>& players() const { return players_; }
  std::size_t size() const { return size_; }
  std::size_t of_profile(std::size_t profile_index) const;
  std::vector<std::size_t> decode(std::size_t joint) const;
  std::size_t encode(const std::vector<std::size_t>& actions) const;

 private:
  const GameSpec* game_;
  std::vector<std::size_t> players_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

struct GroupStrategy {
  std::vector<std::size_t> players;  // sorted ascending
  Vec initial;                       // R = prod m_k entries
  Mat conditionals;                  // |A| x R
};

// Joint strategy of independently randomising players (product rows).
GroupStrategy product_strategy(const GameSpec& game, std::span<const MarkovStrategy> members);
// Arbitrary joint rows (shared randomness). Validates every row.
GroupStrategy correlated_strategy(const GameSpec& game, std::vector<std::size_t> players,
                                  Vec initial, Mat conditionals);

// Per-member marginals of a group strategy.
std::vector<MarkovStrategy> marginals(const GameSpec& game, const GroupStrategy& group);

// Whether a joint distribution over the group's actions is a product of its
// marginals. Two-member two-action groups use the 2x2 determinant; larger
// groups alternate rank-one projections for up to 500 sweeps.
bool factorizes(const GameSpec& game, const std::vector<std::size_t>& players, const Vec& joint,
                double tol = 1e-9);

// Strategies for every player, possibly with some players grouped.
struct StrategyProfile {
  std::vector<GroupStrategy> groups;
};

// Throws InconsistentStrategy unless the groups cover each player exactly once.
StrategyProfile make_profile(const GameSpec& game, std::vector<GroupStrategy> groups);
StrategyProfile make_profile(const GameSpec& game, const std::vector<MarkovStrategy>& players);

}  // namespace payctl
