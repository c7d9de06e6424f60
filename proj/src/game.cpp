#include "payctl/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "payctl/error.hpp"
#include "payctl/simd.hpp"

namespace payctl {

std::size_t GameSpec::action_count(std::size_t player) const {
  if (player >= counts_.size()) {
    throw Error(ErrorKind::PlayerOutOfRange, "player " + std::to_string(player));
  }
  return counts_[player];
}

const std::vector<std::string>& GameSpec::action_labels(std::size_t player) const {
  if (player >= labels_.size()) {
    throw Error(ErrorKind::PlayerOutOfRange, "player " + std::to_string(player));
  }
  return labels_[player];
}

Vec GameSpec::payoff_vector(std::size_t player) const {
  if (player >= labels_.size()) {
    throw Error(ErrorKind::PlayerOutOfRange, "player " + std::to_string(player));
  }
  return payoffs_.col(static_cast<Eigen::Index>(player));
}

std::string GameSpec::profile_name(std::size_t profile_index) const {
  std::string name;
  for (std::size_t p = 0; p < labels_.size(); ++p) name += labels_[p][action_in(profile_index, p)];
  return name;
}

GameSpec build_game(std::size_t player_count, std::vector<std::vector<std::string>> action_labels,
                    const Eigen::MatrixXd& payoff_rows) {
  if (player_count < 2) throw Error(ErrorKind::InvalidParams, "need at least 2 players");
  if (action_labels.size() != player_count) {
    throw Error(ErrorKind::DimensionMismatch, "expected action labels for " +
                                                  std::to_string(player_count) + " players, got " +
                                                  std::to_string(action_labels.size()));
  }
  GameSpec game;
  game.counts_.resize(player_count);
  game.strides_.resize(player_count);
  std::size_t total = 1;
  for (std::size_t p = 0; p < player_count; ++p) {
    const auto& labels = action_labels[p];
    if (labels.size() < 2) {
      throw Error(ErrorKind::InvalidParams,
                  "player " + std::to_string(p + 1) + " needs at least 2 actions");
    }
    std::set<std::string> seen;
    for (const auto& label : labels) {
      if (label.empty()) throw Error(ErrorKind::InvalidParams, "empty action label");
      if (!seen.insert(label).second) {
        throw Error(ErrorKind::DuplicateActionLabel,
                    "player " + std::to_string(p + 1) + " label '" + label + "'");
      }
    }
    game.counts_[p] = labels.size();
    total *= labels.size();
  }
  std::size_t stride = 1;
  for (std::size_t p = player_count; p-- > 0;) {
    game.strides_[p] = stride;
    stride *= game.counts_[p];
  }
  if (static_cast<std::size_t>(payoff_rows.rows()) != total ||
      static_cast<std::size_t>(payoff_rows.cols()) != player_count) {
    std::ostringstream msg;
    msg << "payoff table is " << payoff_rows.rows() << "x" << payoff_rows.cols() << ", expected "
        << total << "x" << player_count;
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  for (Eigen::Index r = 0; r < payoff_rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < payoff_rows.cols(); ++c) {
      if (!std::isfinite(payoff_rows(r, c))) {
        throw Error(ErrorKind::NonFiniteEntry,
                    "payoff row " + std::to_string(r + 1) + " column " + std::to_string(c + 1));
      }
    }
  }
  game.labels_ = std::move(action_labels);
  game.profile_count_ = total;
  game.payoffs_ = payoff_rows;
  return game;
}

GameSpec prisoners_dilemma(double reward, double sucker, double temptation, double punishment) {
  Eigen::MatrixXd table(4, 2);
  table << reward, reward, sucker, temptation, temptation, sucker, punishment, punishment;
  return build_game(2, {{"C", "D"}, {"C", "D"}}, table);
}

GameSpec donation_game(const std::vector<double>& costs, const std::vector<double>& benefits) {
  if (costs.size() != benefits.size() || costs.size() < 2) {
    throw Error(ErrorKind::InvalidParams, "costs and benefits must have the same length >= 2");
  }
  const std::size_t m = costs.size();
  std::vector<std::string> labels(m);
  const bool last_is_defect = costs.back() == 0.0 && benefits.back() == 0.0;
  const std::size_t cooperative = last_is_defect ? m - 1 : m;
  for (std::size_t k = 0; k < m; ++k) {
    if (last_is_defect && k == m - 1) {
      labels[k] = "D";
    } else if (cooperative == 1) {
      labels[k] = "C";
    } else {
      labels[k] = "C" + std::to_string(k + 1);
    }
  }
  Eigen::MatrixXd table(m * m, 2);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      table(a * m + b, 0) = benefits[b] - costs[a];
      table(a * m + b, 1) = benefits[a] - costs[b];
    }
  }
  return build_game(2, {labels, labels}, table);
}

GameSpec public_goods_game(std::size_t players, double cost, double multiplier) {
  if (players < 2) throw Error(ErrorKind::InvalidParams, "public goods needs n >= 2");
  const std::size_t total = std::size_t{1} << players;
  Eigen::MatrixXd table(total, players);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t contributors = 0;
    for (std::size_t p = 0; p < players; ++p) {
      if (((idx >> (players - 1 - p)) & 1U) == 0) ++contributors;
    }
    const double share = multiplier * cost * static_cast<double>(contributors) /
                         static_cast<double>(players);
    for (std::size_t p = 0; p < players; ++p) {
      const bool cooperates = ((idx >> (players - 1 - p)) & 1U) == 0;
      table(idx, p) = share - (cooperates ? cost : 0.0);
    }
  }
  return build_game(players, std::vector<std::vector<std::string>>(players, {"C", "D"}), table);
}

namespace {

const std::vector<double>& param(const std::map<std::string, std::vector<double>>& params,
                                 const std::string& key, std::size_t expected) {
  auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorKind::InvalidParams, "missing parameter '" + key + "'");
  if (expected != 0 && it->second.size() != expected) {
    throw Error(ErrorKind::InvalidParams, "parameter '" + key + "' has wrong length");
  }
  return it->second;
}

}  // namespace

GameSpec builtin_game(std::string_view kind,
                      const std::map<std::string, std::vector<double>>& params) {
  if (kind == "prisoners_dilemma") {
    return prisoners_dilemma(param(params, "R", 1)[0], param(params, "S", 1)[0],
                             param(params, "T", 1)[0], param(params, "P", 1)[0]);
  }
  if (kind == "donation") {
    return donation_game(param(params, "costs", 0), param(params, "benefits", 0));
  }
  if (kind == "public_goods") {
    const double n = param(params, "n", 1)[0];
    if (n < 2 || n != std::floor(n)) throw Error(ErrorKind::InvalidParams, "n must be an integer >= 2");
    return public_goods_game(static_cast<std::size_t>(n), param(params, "cost", 1)[0],
                             param(params, "multiplier", 1)[0]);
  }
  throw Error(ErrorKind::UnknownKind, std::string(kind));
}

std::size_t profile_index(const GameSpec& game, const Profile& profile) {
  if (profile.size() != game.player_count()) {
    throw Error(ErrorKind::DimensionMismatch, "profile length " + std::to_string(profile.size()));
  }
  std::size_t index = 0;
  for (std::size_t p = 0; p < profile.size(); ++p) {
    if (profile[p] >= game.action_count(p)) {
      throw Error(ErrorKind::UnknownAction, "player " + std::to_string(p + 1) + " action " +
                                                std::to_string(profile[p]));
    }
    index += profile[p] * game.stride(p);
  }
  return index;
}

std::size_t profile_index(const GameSpec& game, const std::vector<std::string>& labels) {
  if (labels.size() != game.player_count()) {
    throw Error(ErrorKind::DimensionMismatch, "profile length " + std::to_string(labels.size()));
  }
  Profile profile(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const auto& known = game.action_labels(p);
    auto it = std::find(known.begin(), known.end(), labels[p]);
    if (it == known.end()) {
      throw Error(ErrorKind::UnknownLabel,
                  "player " + std::to_string(p + 1) + " has no action '" + labels[p] + "'");
    }
    profile[p] = static_cast<std::size_t>(it - known.begin());
  }
  return profile_index(game, profile);
}

Profile profile_from_index(const GameSpec& game, std::size_t index) {
  if (index >= game.profile_count()) {
    throw Error(ErrorKind::IndexOutOfRange, "profile index " + std::to_string(index));
  }
  Profile profile(game.player_count());
  for (std::size_t p = 0; p < profile.size(); ++p) profile[p] = game.action_in(index, p);
  return profile;
}

Vec make_distribution(const GameSpec& game, Vec probs) {
  if (static_cast<std::size_t>(probs.size()) != game.profile_count()) {
    throw Error(ErrorKind::DimensionMismatch, "distribution has " + std::to_string(probs.size()) +
                                                  " entries, expected " +
                                                  std::to_string(game.profile_count()));
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < -1e-12) {
      throw Error(ErrorKind::InvalidProbability, "entry " + std::to_string(i + 1));
    }
    probs[i] = std::max(probs[i], 0.0);
  }
  if (std::fabs(probs.sum() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidProbability, "distribution sums to " + std::to_string(probs.sum()));
  }
  return probs;
}

double expected_payoff(const GameSpec& game, std::size_t player, const Vec& dist) {
  if (player >= game.player_count()) {
    throw Error(ErrorKind::PlayerOutOfRange, "player " + std::to_string(player));
  }
  if (static_cast<std::size_t>(dist.size()) != game.profile_count()) {
    throw Error(ErrorKind::DimensionMismatch, "distribution length");
  }
  const auto column = game.payoffs().col(static_cast<Eigen::Index>(player));
  return simd::dot({column.data(), game.profile_count()}, view(dist));
}

}  // namespace payctl
