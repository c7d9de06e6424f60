#include "payctl/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "payctl/error.hpp"

namespace payctl {

void check_mixed_action(const Vec& probs, std::size_t actions, const std::string& what) {
  if (static_cast<std::size_t>(probs.size()) != actions) {
    throw Error(ErrorKind::InconsistentStrategy, what + " has " + std::to_string(probs.size()) +
                                                     " entries, expected " + std::to_string(actions));
  }
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (!std::isfinite(probs[j]) || probs[j] < 0.0 || probs[j] > 1.0) {
      std::ostringstream msg;
      msg << what << " entry " << j + 1 << " = " << probs[j] << " outside [0,1]";
      throw Error(ErrorKind::InvalidProbability, msg.str());
    }
  }
  const double sum = probs.sum();
  if (std::fabs(sum - 1.0) > kMixedActionTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sums to " << sum;
    throw Error(ErrorKind::InvalidProbability, msg.str());
  }
}

namespace {

void check_rows(const GameSpec& game, const Vec& initial, const Mat& conditionals,
                std::size_t width, const std::string& owner) {
  check_mixed_action(initial, width, owner + " initial");
  if (static_cast<std::size_t>(conditionals.rows()) != game.profile_count() ||
      static_cast<std::size_t>(conditionals.cols()) != width) {
    std::ostringstream msg;
    msg << owner << " conditional table is " << conditionals.rows() << "x" << conditionals.cols()
        << ", expected " << game.profile_count() << "x" << width;
    throw Error(ErrorKind::InconsistentStrategy, msg.str());
  }
  for (std::size_t a = 0; a < game.profile_count(); ++a) {
    Vec row = conditionals.row(static_cast<Eigen::Index>(a)).transpose();
    check_mixed_action(row, width, owner + " row " + std::to_string(a + 1) + " (" + game.profile_name(a) + ")");
  }
}

std::string player_name(std::size_t player) { return "strategy." + std::to_string(player + 1); }

}  // namespace

MarkovStrategy make_markov_strategy(const GameSpec& game, std::size_t player, Vec initial,
                                    Mat conditionals) {
  if (player >= game.player_count()) {
    throw Error(ErrorKind::PlayerOutOfRange, "player " + std::to_string(player + 1));
  }
  check_rows(game, initial, conditionals, game.action_count(player), player_name(player));
  return MarkovStrategy{player, std::move(initial), std::move(conditionals)};
}

MarkovStrategy repeat_strategy(const GameSpec& game, std::size_t player, Vec initial) {
  const std::size_t m = game.action_count(player);
  Mat table = Mat::Zero(static_cast<Eigen::Index>(game.profile_count()), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < game.profile_count(); ++a) {
    table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(game.action_in(a, player))) = 1.0;
  }
  return make_markov_strategy(game, player, std::move(initial), std::move(table));
}

MarkovStrategy memoryless_strategy(const GameSpec& game, std::size_t player, const Vec& mix) {
  Mat table(static_cast<Eigen::Index>(game.profile_count()), mix.size());
  for (Eigen::Index a = 0; a < table.rows(); ++a) table.row(a) = mix.transpose();
  return make_markov_strategy(game, player, mix, std::move(table));
}

JointIndex::JointIndex(const GameSpec& game, std::vector<std::size_t> players)
    : game_(&game), players_(std::move(players)) {
  if (players_.empty()) throw Error(ErrorKind::InvalidParams, "empty player group");
  std::sort(players_.begin(), players_.end());
  if (std::adjacent_find(players_.begin(), players_.end()) != players_.end()) {
    throw Error(ErrorKind::InvalidParams, "duplicate player in group");
  }
  counts_.resize(players_.size());
  strides_.resize(players_.size());
  for (std::size_t k = 0; k < players_.size(); ++k) counts_[k] = game.action_count(players_[k]);
  for (std::size_t k = players_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= counts_[k];
  }
}

std::size_t JointIndex::of_profile(std::size_t profile_index) const {
  std::size_t joint = 0;
  for (std::size_t k = 0; k < players_.size(); ++k) {
    joint += game_->action_in(profile_index, players_[k]) * strides_[k];
  }
  return joint;
}

std::vector<std::size_t> JointIndex::decode(std::size_t joint) const {
  if (joint >= size_) throw Error(ErrorKind::IndexOutOfRange, "joint action " + std::to_string(joint));
  std::vector<std::size_t> actions(players_.size());
  for (std::size_t k = 0; k < players_.size(); ++k) actions[k] = (joint / strides_[k]) % counts_[k];
  return actions;
}

std::size_t JointIndex::encode(const std::vector<std::size_t>& actions) const {
  if (actions.size() != players_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "joint action needs one action per group member");
  }
  std::size_t joint = 0;
  for (std::size_t k = 0; k < players_.size(); ++k) {
    if (actions[k] >= counts_[k]) {
      throw Error(ErrorKind::UnknownAction, "player " + std::to_string(players_[k] + 1) +
                                                " action " + std::to_string(actions[k]));
    }
    joint += actions[k] * strides_[k];
  }
  return joint;
}

namespace {

Vec product_row(const JointIndex& index, const std::vector<const double*>& member_rows) {
  Vec joint(static_cast<Eigen::Index>(index.size()));
  for (std::size_t j = 0; j < index.size(); ++j) {
    const auto actions = index.decode(j);
    double p = 1.0;
    for (std::size_t k = 0; k < actions.size(); ++k) p *= member_rows[k][actions[k]];
    joint[static_cast<Eigen::Index>(j)] = p;
  }
  return joint;
}

}  // namespace

GroupStrategy product_strategy(const GameSpec& game, std::span<const MarkovStrategy> members) {
  if (members.empty()) throw Error(ErrorKind::InvalidParams, "empty player group");
  std::vector<const MarkovStrategy*> sorted;
  for (const auto& m : members) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const MarkovStrategy* a, const MarkovStrategy* b) { return a->player < b->player; });
  std::vector<std::size_t> players;
  for (const auto* m : sorted) {
    if (static_cast<std::size_t>(m->conditionals.rows()) != game.profile_count()) {
      throw Error(ErrorKind::InconsistentStrategy, "conditional table row count mismatch");
    }
    players.push_back(m->player);
  }
  JointIndex index(game, players);
  if (index.players().size() != sorted.size()) {
    throw Error(ErrorKind::InconsistentStrategy, "duplicate player in group");
  }
  GroupStrategy group;
  group.players = index.players();
  std::vector<const double*> rows(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) rows[k] = sorted[k]->initial.data();
  group.initial = product_row(index, rows);
  group.conditionals.resize(static_cast<Eigen::Index>(game.profile_count()),
                            static_cast<Eigen::Index>(index.size()));
  for (std::size_t a = 0; a < game.profile_count(); ++a) {
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      rows[k] = sorted[k]->conditionals.row(static_cast<Eigen::Index>(a)).data();
    }
    group.conditionals.row(static_cast<Eigen::Index>(a)) = product_row(index, rows).transpose();
  }
  return group;
}

GroupStrategy correlated_strategy(const GameSpec& game, std::vector<std::size_t> players,
                                  Vec initial, Mat conditionals) {
  JointIndex index(game, std::move(players));
  std::string owner = "joint";
  for (auto p : index.players()) owner += "." + std::to_string(p + 1);
  check_rows(game, initial, conditionals, index.size(), owner);
  return GroupStrategy{index.players(), std::move(initial), std::move(conditionals)};
}

namespace {

Vec marginal(const JointIndex& index, std::size_t member, const Vec& joint, std::size_t actions) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(actions));
  for (std::size_t j = 0; j < index.size(); ++j) {
    out[static_cast<Eigen::Index>(index.decode(j)[member])] += joint[static_cast<Eigen::Index>(j)];
  }
  return out;
}

}  // namespace

std::vector<MarkovStrategy> marginals(const GameSpec& game, const GroupStrategy& group) {
  JointIndex index(game, group.players);
  std::vector<MarkovStrategy> out;
  for (std::size_t k = 0; k < group.players.size(); ++k) {
    const std::size_t m = game.action_count(group.players[k]);
    MarkovStrategy s;
    s.player = group.players[k];
    s.initial = marginal(index, k, group.initial, m);
    s.conditionals.resize(group.conditionals.rows(), static_cast<Eigen::Index>(m));
    for (Eigen::Index a = 0; a < group.conditionals.rows(); ++a) {
      s.conditionals.row(a) = marginal(index, k, group.conditionals.row(a).transpose(), m).transpose();
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool factorizes(const GameSpec& game, const std::vector<std::size_t>& players, const Vec& joint,
                double tol) {
  JointIndex index(game, players);
  if (static_cast<std::size_t>(joint.size()) != index.size()) {
    throw Error(ErrorKind::DimensionMismatch, "joint distribution size");
  }
  if (players.size() == 1) return true;
  if (players.size() == 2 && index.size() == 4) {
    return std::fabs(joint[0] * joint[3] - joint[1] * joint[2]) <= tol;
  }
  // Alternating rank-one projection: refit each member's factor against the
  // others until the product stops improving.
  const std::size_t q = players.size();
  std::vector<Vec> factors(q);
  for (std::size_t k = 0; k < q; ++k) {
    factors[k] = marginal(index, k, joint, game.action_count(index.players()[k]));
  }
  auto product_at = [&](std::size_t j, std::size_t skip) {
    const auto actions = index.decode(j);
    double p = 1.0;
    for (std::size_t k = 0; k < q; ++k) {
      if (k != skip) p *= factors[k][static_cast<Eigen::Index>(actions[k])];
    }
    return p;
  };
  double error = 0.0;
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (std::size_t k = 0; k < q; ++k) {
      Vec num = Vec::Zero(factors[k].size());
      Vec den = Vec::Zero(factors[k].size());
      for (std::size_t j = 0; j < index.size(); ++j) {
        const auto a = static_cast<Eigen::Index>(index.decode(j)[k]);
        const double rest = product_at(j, k);
        num[a] += joint[static_cast<Eigen::Index>(j)] * rest;
        den[a] += rest * rest;
      }
      for (Eigen::Index a = 0; a < num.size(); ++a) factors[k][a] = den[a] > 0.0 ? num[a] / den[a] : 0.0;
    }
    error = 0.0;
    for (std::size_t j = 0; j < index.size(); ++j) {
      error = std::max(error, std::fabs(joint[static_cast<Eigen::Index>(j)] - product_at(j, q)));
    }
    if (error <= tol) return true;
  }
  return error <= tol;
}

StrategyProfile make_profile(const GameSpec& game, std::vector<GroupStrategy> groups) {
  std::vector<int> covered(game.player_count(), 0);
  for (const auto& g : groups) {
    JointIndex index(game, g.players);
    if (static_cast<std::size_t>(g.conditionals.rows()) != game.profile_count() ||
        static_cast<std::size_t>(g.conditionals.cols()) != index.size() ||
        static_cast<std::size_t>(g.initial.size()) != index.size()) {
      throw Error(ErrorKind::InconsistentStrategy, "group strategy shape does not match the game");
    }
    for (auto p : g.players) covered[p]++;
  }
  for (std::size_t p = 0; p < covered.size(); ++p) {
    if (covered[p] != 1) {
      throw Error(ErrorKind::InconsistentStrategy,
                  "player " + std::to_string(p + 1) + " covered " + std::to_string(covered[p]) + " times");
    }
  }
  return StrategyProfile{std::move(groups)};
}

StrategyProfile make_profile(const GameSpec& game, const std::vector<MarkovStrategy>& players) {
  std::vector<GroupStrategy> groups;
  for (const auto& s : players) groups.push_back(product_strategy(game, std::span(&s, 1)));
  return make_profile(game, std::move(groups));
}

}  // namespace payctl
