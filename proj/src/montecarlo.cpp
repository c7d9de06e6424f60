#include "payctl/montecarlo.hpp"

#include <cmath>
#include <random>
#include <variant>

#include "payctl/error.hpp"

namespace payctl {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Row>
std::size_t sample_row(const Row& probs, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const auto n = probs.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    acc += probs[j];
    if (u < acc) return static_cast<std::size_t>(j);
  }
  // Rounding left u above the running total: take the last action with mass.
  for (Eigen::Index j = n; j-- > 0;) {
    if (probs[j] > 0.0) return static_cast<std::size_t>(j);
  }
  return 0;
}

}  // namespace

MonteCarloResult monte_carlo_play(const GameSpec& game, const StrategyProfile& profile,
                                  const ContinuationSchedule& schedule,
                                  const MonteCarloOptions& options) {
  if (options.episodes < 1) throw Error(ErrorKind::InvalidParams, "episodes must be >= 1");
  if (std::holds_alternative<InfiniteSchedule>(schedule.variant()) && !options.round_cap) {
    throw Error(ErrorKind::MissingRoundCap, "the infinite schedule needs an explicit round cap");
  }
  if (options.round_cap && *options.round_cap < 1) {
    throw Error(ErrorKind::InvalidParams, "round cap must be >= 1");
  }

  const std::size_t n = game.player_count();
  std::vector<JointIndex> indices;
  std::vector<std::vector<std::vector<std::size_t>>> decoded;  // group -> joint -> actions
  for (const auto& g : profile.groups) {
    indices.emplace_back(game, g.players);
    std::vector<std::vector<std::size_t>> table;
    for (std::size_t j = 0; j < indices.back().size(); ++j) table.push_back(indices.back().decode(j));
    decoded.push_back(std::move(table));
  }

  Eigen::MatrixXd totals(static_cast<Eigen::Index>(options.episodes), static_cast<Eigen::Index>(n));
  Vec rounds(static_cast<Eigen::Index>(options.episodes));
  Profile actions(n);

  for (std::size_t e = 0; e < options.episodes; ++e) {
    std::mt19937_64 rng(mix_seed(options.seed, e));
    auto play = [&](auto&& row_of_group) {
      for (std::size_t g = 0; g < profile.groups.size(); ++g) {
        const std::size_t joint = sample_row(row_of_group(g), rng);
        const auto& members = profile.groups[g].players;
        for (std::size_t k = 0; k < members.size(); ++k) actions[members[k]] = decoded[g][joint][k];
      }
      return profile_index(game, actions);
    };
    std::size_t current = play([&](std::size_t g) -> const Vec& { return profile.groups[g].initial; });
    std::size_t t = 1;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    while (true) {
      sum += game.payoffs().row(static_cast<Eigen::Index>(current)).transpose();
      if (options.round_cap && t >= *options.round_cap) break;
      if (uniform01(rng) >= schedule.continuation(t)) break;
      const auto last = static_cast<Eigen::Index>(current);
      current = play([&](std::size_t g) { return profile.groups[g].conditionals.row(last); });
      ++t;
    }
    totals.row(static_cast<Eigen::Index>(e)) = sum.transpose();
    rounds[static_cast<Eigen::Index>(e)] = static_cast<double>(t);
  }

  MonteCarloResult result;
  result.episodes = options.episodes;
  const double count = static_cast<double>(options.episodes);
  const double mean_rounds = rounds.mean();
  result.mean_rounds = mean_rounds;
  result.mean = totals.colwise().sum().transpose() / rounds.sum();
  result.std_error = Vec::Zero(static_cast<Eigen::Index>(n));
  if (options.episodes > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = totals.col(static_cast<Eigen::Index>(i));
      const double ratio = result.mean[static_cast<Eigen::Index>(i)];
      const Eigen::ArrayXd resid = col.array() - ratio * rounds.array();
      const double var = resid.square().sum() / (count - 1.0);
      result.std_error[static_cast<Eigen::Index>(i)] = std::sqrt(var / count) / mean_rounds;
    }
  }
  return result;
}

}  // namespace payctl
