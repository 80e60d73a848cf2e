#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pramsey/combinatorics.hpp"
#include "pramsey/constructions.hpp"
#include "pramsey/geometry.hpp"
#include "support/test_util.hpp"

using namespace pramsey;
using namespace pramsey::constructions;
using pramsey::detail::Rng;

namespace {

Rat rat(long long n, long long d = 1) { return Rat(BigInt(n), BigInt(d)); }

std::vector<IndexPair> all_pairs(int n) {
  std::vector<IndexPair> pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace

TEST_CASE("segment spec derived quantities") {
  SegmentSpec spec(rat(1), rat(2));
  // 2 beta^2 (1 + gamma + gamma^2) = a^2 holds exactly
  CHECK(Rat(2) * spec.scale_sq() * (Rat(1) + spec.gamma + spec.gamma * spec.gamma) == spec.a_sq);
  CHECK_THROWS_AS(SegmentSpec(rat(0), rat(1)), Error);
  CHECK_THROWS_AS(SegmentSpec(rat(1), rat(-1)), Error);
}

TEST_CASE("predicted squared distances by case") {
  SegmentSpec spec(rat(1), rat(2));
  // shift-adjacent pairs realize the segment itself
  CHECK(predicted_sq_distance({1, 2}, {2, 3}, spec) == rat(1));
  // shared first index: gamma^2 a^2 / (1 + gamma + gamma^2)
  CHECK(predicted_sq_distance({1, 2}, {1, 3}, spec) == rat(4, 7));
  // shared second index
  CHECK(predicted_sq_distance({1, 3}, {2, 3}, spec) == rat(1, 7));
  // disjoint
  CHECK(predicted_sq_distance({1, 2}, {3, 4}, spec) == rat(5, 7));
  // equal pairs
  CHECK(predicted_sq_distance({2, 5}, {2, 5}, spec) == rat(0));
  CHECK_THROWS_AS(predicted_sq_distance({2, 2}, {1, 3}, spec), Error);
}

TEST_CASE("segment configuration points") {
  SUBCASE("gamma = 1 on all pairs of [3]: distance multiset {1/3, 1/3, 1}") {
    SegmentSpec spec(rat(1), rat(1));
    auto config = segment_config_points(spec, all_pairs(3));
    REQUIRE(config.size() == 3);
    REQUIRE(config.rational_mode());
    std::multiset<Rat> values;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) values.insert((*config.exact_sq)[i][j]);
    std::multiset<Rat> expected{rat(1, 3), rat(1, 3), rat(1)};
    CHECK(values == expected);
  }

  SUBCASE("gamma = 2, disjoint pairs: squared distance 5/7") {
    SegmentSpec spec(rat(1), rat(2));
    auto config = segment_config_points(spec, {{1, 2}, {3, 4}});
    CHECK((*config.exact_sq)[0][1] == rat(5, 7));
  }

  SUBCASE("empty pair list gives an empty config") {
    SegmentSpec spec(rat(1), rat(2));
    auto config = segment_config_points(spec, {});
    CHECK(config.size() == 0);
  }

  SUBCASE("malformed pair is rejected") {
    SegmentSpec spec(rat(1), rat(2));
    CHECK_THROWS_AS(segment_config_points(spec, {{3, 2}}), Error);
  }

  SUBCASE("float coordinates agree with the exact predictions") {
    std::vector<std::pair<Rat, Rat>> grid = {
        {rat(1), rat(1)}, {rat(1), rat(2)}, {rat(4), rat(1, 2)}, {rat(9, 4), rat(3, 2)},
        {rat(2), rat(1, 3)}};
    for (const auto& [a_sq, gamma] : grid) {
      SegmentSpec spec(a_sq, gamma);
      auto pairs = all_pairs(5);
      auto config = segment_config_points(spec, pairs);
      PointConfig stripped = config;
      stripped.exact_sq.reset();
      auto float_sq = geometry::squared_distance_matrix(stripped);
      for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
          double expected = predicted_sq_distance(pairs[i], pairs[j], spec).to_double();
          CHECK(float_sq.values(static_cast<int>(i), static_cast<int>(j)) ==
                doctest::Approx(expected).epsilon(1e-12));
        }
    }
  }

  SUBCASE("realized distance equals a exactly on shift-adjacent pairs") {
    SegmentSpec spec(rat(9, 4), rat(5, 3));
    auto pairs = all_pairs(6);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        bool realizes_a = predicted_sq_distance(pairs[i], pairs[j], spec) == spec.a_sq;
        CHECK(realizes_a == combinatorics::shift_adjacent(pairs[i], pairs[j]));
      }
  }

  SUBCASE("squared distances stay inside the four-value set") {
    SegmentSpec spec(rat(3), rat(7, 2));
    auto config = segment_config_points(spec, all_pairs(6));
    auto values = spec.distance_value_set();
    for (int i = 0; i < config.size(); ++i)
      for (int j = i + 1; j < config.size(); ++j) {
        const Rat& v = (*config.exact_sq)[i][j];
        CHECK(std::count(values.begin(), values.end(), v) > 0);
      }
  }

  SUBCASE("no equilateral triangle of side a, up to ground size 7") {
    SegmentSpec spec(rat(1), rat(2));
    // an exact equilateral triangle pattern with squared side a^2
    PointConfig triangle;
    triangle.dim = 2;
    triangle.points.resize(3, 2);
    triangle.points << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
    triangle.exact_sq = RatMatrix(3, std::vector<Rat>(3, rat(0)));
    (*triangle.exact_sq)[0][1] = (*triangle.exact_sq)[1][0] = spec.a_sq;
    (*triangle.exact_sq)[0][2] = (*triangle.exact_sq)[2][0] = spec.a_sq;
    (*triangle.exact_sq)[1][2] = (*triangle.exact_sq)[2][1] = spec.a_sq;
    for (int n = 3; n <= 7; ++n) {
      auto host = segment_config_points(spec, all_pairs(n));
      CHECK(geometry::find_copies(host, triangle, 0.0).empty());
    }
  }
}

TEST_CASE("brick points") {
  SUBCASE("sides 3,4: four vertices, diameter 5") {
    auto brick = brick_points(BrickSpec::from_exact_squares({rat(9), rat(16)}));
    CHECK(brick.size() == 4);
    CHECK(geometry::diameter(brick) == doctest::Approx(5.0).epsilon(1e-12));
  }

  SUBCASE("single side is a segment") {
    auto brick = brick_points(BrickSpec::from_exact_squares({rat(4)}));
    REQUIRE(brick.size() == 2);
    CHECK((*brick.exact_sq)[0][1] == rat(4));
  }

  SUBCASE("unit cube distance multiset") {
    auto cube = brick_points(BrickSpec::from_exact_squares({rat(1), rat(1), rat(1)}));
    REQUIRE(cube.size() == 8);
    std::map<Rat, int> counts;
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) ++counts[(*cube.exact_sq)[i][j]];
    CHECK(counts[rat(1)] == 12);
    CHECK(counts[rat(2)] == 12);
    CHECK(counts[rat(3)] == 4);
  }

  SUBCASE("dimension cap") {
    std::vector<Rat> squares(21, rat(1));
    CHECK_THROWS_AS(brick_points(BrickSpec::from_exact_squares(squares)), Error);
  }
}

TEST_CASE("spread points") {
  SUBCASE("c = (1,2) over {1,2,3}") {
    SpreadSpec spec;
    spec.c = {1.0, 2.0};
    spec.c_exact = std::vector<Rat>{rat(1), rat(2)};
    auto config = spread_points(spec, {1, 2, 3});
    REQUIRE(config.size() == 3);
    Eigen::MatrixXd expected(3, 3);
    expected << 1, 2, 0, 1, 0, 2, 0, 1, 2;
    CHECK((config.points - expected).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i)
      CHECK(config.points.row(i).norm() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  }

  SUBCASE("k = 1: n points pairwise rho * sqrt(2)") {
    SpreadSpec spec;
    spec.c = {2.5};
    auto config = spread_points(spec, {1, 2, 3, 4});
    auto sq = geometry::squared_distance_matrix(config);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        CHECK(std::sqrt(sq.values(i, j)) == doctest::Approx(2.5 * std::sqrt(2.0)).epsilon(1e-12));
  }

  SUBCASE("ground of size k collapses to one point; smaller ground errors") {
    SpreadSpec spec;
    spec.c = {1.0, 1.0};
    CHECK(spread_points(spec, {4, 9}).size() == 1);
    CHECK_THROWS_AS(spread_points(spec, {4}), Error);
  }

  SUBCASE("every point has norm ||c||") {
    Rng rng(7);
    SpreadSpec spec;
    for (int i = 0; i < 3; ++i) spec.c.push_back(rng.next_gaussian());
    auto config = spread_points(spec, {1, 2, 3, 4, 5});
    for (int i = 0; i < config.size(); ++i)
      CHECK(config.points.row(i).norm() == doctest::Approx(spec.norm()).epsilon(1e-12));
  }
}

TEST_CASE("gamma candidate enumeration prefix") {
  auto got = gamma_candidates(7);
  std::vector<Rat> expected = {rat(1), rat(2), rat(1, 2), rat(3), rat(1, 3), rat(3, 2), rat(2, 3)};
  CHECK(got == expected);
  auto more = gamma_candidates(15);
  CHECK(more[7] == rat(4));
  CHECK(more[8] == rat(1, 4));
}

TEST_CASE("choose_gamma") {
  SUBCASE("single-point host, segment pattern, margin 1/3 accepts gamma = 1") {
    auto choice = choose_gamma(rat(1), {}, {rat(1)}, rat(1, 3));
    CHECK(choice.gamma == rat(1));
    CHECK(choice.margin_achieved == rat(1, 3));
    CHECK(choice.candidates_tried == 1);
  }

  SUBCASE("infeasible margin exhausts the enumeration") {
    // with difference set {0, 1} the three values satisfy v1 + v3 = v2, so a
    // margin above 1/3 can never separate all of them from both 0 and 1
    CHECK_THROWS_AS(choose_gamma(rat(1), {}, {rat(1)}, rat(2, 5), 64), Error);
  }

  SUBCASE("rejection moves on to a later candidate") {
    // gamma = 1 collides head-on with the difference 1/3; gamma = 2 clears it
    auto choice = choose_gamma(rat(1), {}, {rat(1, 3)}, rat(1, 20));
    CHECK(choice.gamma == rat(2));
    CHECK(choice.candidates_tried == 2);
  }

  SUBCASE("zero-length segment is invalid") {
    CHECK_THROWS_AS(choose_gamma(rat(0), {}, {rat(1)}, rat(1, 3)), Error);
  }

  SUBCASE("postcondition re-verified by direct arithmetic") {
    std::vector<Rat> host = {rat(5, 7), rat(2)};
    std::vector<Rat> pattern = {rat(1), rat(13, 4)};
    Rat margin = rat(1, 50);
    auto choice = choose_gamma(rat(1), host, pattern, margin);
    Rat q = Rat(1) + choice.gamma + choice.gamma * choice.gamma;
    Rat g2 = choice.gamma * choice.gamma;
    std::vector<Rat> values = {rat(1) / q, (Rat(1) + g2) / q, g2 / q};
    std::vector<Rat> s = pattern, t = host;
    s.push_back(rat(0));
    t.push_back(rat(0));
    for (const auto& v : values)
      for (const auto& sv : s)
        for (const auto& tv : t) CHECK(abs(v - (sv - tv)) >= margin);
  }
}

TEST_CASE("materialize") {
  SUBCASE("segment truncation at n = 4 has C(4,2) points") {
    auto desc = ConfigDescriptor::make_segment(SegmentSpec(rat(1), rat(2)));
    CHECK(materialize(desc, 4).size() == 6);
  }

  SUBCASE("product with a single finite point is congruent to the segment part") {
    auto seg = ConfigDescriptor::make_segment(SegmentSpec(rat(1), rat(2)));
    PointConfig pt;
    pt.dim = 1;
    pt.points = Eigen::MatrixXd::Zero(1, 1);
    auto desc = ConfigDescriptor::make_product(seg, ConfigDescriptor::make_finite(pt));
    auto prod = materialize(desc, 4);
    CHECK(prod.size() == 6);
    auto seg_only = materialize(ConfigDescriptor::make_segment(SegmentSpec(rat(1), rat(2))), 4);
    CHECK(geometry::congruent(seg_only, prod, 1e-9).has_value());
  }

  SUBCASE("spread truncation at n = 4 with k = 2") {
    SpreadSpec spec;
    spec.c = {1.0, 0.5};
    auto desc = ConfigDescriptor::make_spread(spec);
    CHECK(materialize(desc, 4).size() == 6);
    CHECK_THROWS_AS(materialize(desc, 1), Error);  // ground smaller than k
  }

  SUBCASE("bad truncation parameter") {
    auto desc = ConfigDescriptor::make_segment(SegmentSpec(rat(1), rat(2)));
    CHECK_THROWS_AS(materialize(desc, 0), Error);
  }
}

TEST_CASE("product additivity is exact in rational mode") {
  auto seg = segment_config_points(SegmentSpec(rat(1), rat(2)), all_pairs(3));
  auto brick = brick_points(BrickSpec::from_exact_squares({rat(9), rat(16)}));
  auto prod = geometry::product(seg, brick);
  REQUIRE(prod.rational_mode());
  for (int i = 0; i < seg.size(); ++i)
    for (int j = 0; j < brick.size(); ++j)
      for (int i2 = 0; i2 < seg.size(); ++i2)
        for (int j2 = 0; j2 < brick.size(); ++j2) {
          Rat expect = (*seg.exact_sq)[i][i2] + (*brick.exact_sq)[j][j2];
          CHECK((*prod.exact_sq)[i * brick.size() + j][i2 * brick.size() + j2] == expect);
        }
}

TEST_CASE("iterated segment products build the brick vertex set") {
  auto s3 = geometry::product(
      geometry::product(brick_points(BrickSpec::from_exact_squares({rat(9)})),
                        brick_points(BrickSpec::from_exact_squares({rat(16)}))),
      brick_points(BrickSpec::from_exact_squares({rat(144)})));
  auto direct = brick_points(BrickSpec::from_exact_squares({rat(9), rat(16), rat(144)}));
  CHECK(s3.size() == direct.size());
  CHECK(geometry::congruent(s3, direct, 0.0).has_value());
}
