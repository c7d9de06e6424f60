#include <doctest.h>

#include <random>

#include "payctl/error.hpp"
#include "payctl/strategy.hpp"
#include "support.hpp"

using namespace payctl;

TEST_CASE("mixed actions are validated with the row named") {
  const auto g = testing::donation3();
  Mat table = Mat::Constant(9, 3, 1.0 / 3);
  table.row(4) << 0.5, 0.3, 0.1;
  CHECK_THROWS_WITH_AS(make_markov_strategy(g, 0, Vec::Constant(3, 1.0 / 3), table),
                       doctest::Contains("row 5 (C2C2)"), Error);
  table.row(4) << 0.5, 0.6, -0.1;
  CHECK_THROWS_WITH_AS(make_markov_strategy(g, 0, Vec::Constant(3, 1.0 / 3), table),
                       doctest::Contains("InvalidProbability"), Error);
  CHECK_THROWS_WITH_AS(make_markov_strategy(g, 0, Vec::Constant(2, 0.5), Mat::Constant(9, 3, 1.0 / 3)),
                       doctest::Contains("InconsistentStrategy"), Error);
  CHECK_THROWS_WITH_AS(make_markov_strategy(g, 2, Vec::Constant(3, 1.0 / 3), Mat::Constant(9, 3, 1.0 / 3)),
                       doctest::Contains("PlayerOutOfRange"), Error);
}

TEST_CASE("joint index order and round trip") {
  const auto g = testing::pgg3();
  JointIndex idx(g, {0, 2});
  CHECK(idx.size() == 4);
  CHECK(idx.of_profile(profile_index(g, Profile{0, 1, 1})) == 1);
  CHECK(idx.of_profile(profile_index(g, Profile{1, 0, 0})) == 2);
  for (std::size_t j = 0; j < idx.size(); ++j) CHECK(idx.encode(idx.decode(j)) == j);
  CHECK_THROWS_AS(idx.decode(4), Error);
  CHECK_THROWS_AS(JointIndex(g, {1, 1}), Error);
}

TEST_CASE("product strategy rows are products and marginals invert them") {
  const auto g = testing::pgg3();
  std::mt19937_64 rng(2);
  const std::vector<MarkovStrategy> members{testing::random_strategy(g, 0, rng), testing::random_strategy(g, 1, rng)};
  const auto joint = product_strategy(g, members);
  CHECK(joint.players == std::vector<std::size_t>{0, 1});
  CHECK(joint.conditionals(3, 2) == doctest::Approx(members[0].conditionals(3, 1) * members[1].conditionals(3, 0)));
  const auto back = marginals(g, joint);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK((back[k].conditionals - members[k].conditionals).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((back[k].initial - members[k].initial).cwiseAbs().maxCoeff() < 1e-14);
  }
  for (Eigen::Index a = 0; a < joint.conditionals.rows(); ++a) {
    CHECK(factorizes(g, joint.players, joint.conditionals.row(a).transpose()));
  }
}

TEST_CASE("factorization test") {
  const auto g = testing::pgg3();
  Vec shared(4);
  shared << 0.5, 0, 0, 0.5;  // perfectly correlated
  CHECK_FALSE(factorizes(g, {0, 1}, shared));
  Vec product(4);
  product << 0.12, 0.28, 0.18, 0.42;
  CHECK(factorizes(g, {0, 1}, product));

  // Three members, exercises the alternating projection.
  const auto four = public_goods_game(4, 1, 2);
  Vec p(2), q(2), r(2);
  p << 0.3, 0.7;
  q << 0.6, 0.4;
  r << 0.9, 0.1;
  Vec joint(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) joint[4 * i + 2 * j + k] = p[i] * q[j] * r[k];
  CHECK(factorizes(four, {0, 1, 2}, joint));
  joint[0] += 0.05;
  joint[7] -= 0.05;
  CHECK_FALSE(factorizes(four, {0, 1, 2}, joint));
}

TEST_CASE("profiles must cover every player once") {
  const auto g = testing::pgg3();
  std::mt19937_64 rng(1);
  const auto a = testing::random_strategy(g, 0, rng);
  const auto b = testing::random_strategy(g, 1, rng);
  CHECK_THROWS_WITH_AS(make_profile(g, std::vector<MarkovStrategy>{a, b}), doctest::Contains("InconsistentStrategy"), Error);
  CHECK_THROWS_AS(make_profile(g, std::vector<MarkovStrategy>{a, a, b}), Error);
}

TEST_CASE("correlated rows are validated") {
  const auto g = testing::pgg3();
  Mat rows = Mat::Constant(8, 4, 0.25);
  rows(2, 0) = 0.35;
  CHECK_THROWS_WITH_AS(correlated_strategy(g, {0, 1}, Vec::Constant(4, 0.25), rows), doctest::Contains("row 3"), Error);
}
