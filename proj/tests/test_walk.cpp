#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "wopt/errors.hpp"
#include "wopt/rng.hpp"
#include "wopt/walk.hpp"

using namespace wopt;

namespace {

const double kRoot3 = std::sqrt(3.0);

SampleCloud square_corners() {
  return SampleCloud({0, 0, 1, 0, 1, 1, 0, 1}, 2);
}

// Unit star: centre plus three points at distance 1, pairwise distance sqrt(3).
SampleCloud star() {
  return SampleCloud({0, 0, 1, 0, -0.5, kRoot3 / 2, -0.5, -kRoot3 / 2}, 2);
}

SampleCloud collinear(std::size_t n, std::size_t dim = 2) {
  std::vector<double> pts(n * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) pts[i * dim] = static_cast<double>(i);
  return SampleCloud(std::move(pts), dim);
}

SampleCloud random_cloud(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<double> pts(n * dim);
  for (double& v : pts) v = rng.uniform();
  return SampleCloud(std::move(pts), dim);
}

} // namespace

TEST_CASE("closure shortcuts through interior points") {
  const auto closure = squared_metric_closure(collinear(3));
  CHECK(closure.cost(0, 2) == doctest::Approx(2.0)); // via the midpoint, not 4
  CHECK(closure.path_between(0, 2) == std::vector<int>{0, 1, 2});
  CHECK(closure.cost(0, 1) == doctest::Approx(1.0));
  CHECK(closure.cost(0, 0) == 0.0);
}

TEST_CASE("closure of two points is the direct edge") {
  const SampleCloud two({0, 0, 0.3, 0.4}, 2);
  const auto closure = squared_metric_closure(two);
  CHECK(closure.cost(0, 1) == doctest::Approx(0.25));
  CHECK(closure.path_between(0, 1) == std::vector<int>{0, 1});
}

TEST_CASE("square diagonal ties resolve to the direct edge") {
  const auto closure = squared_metric_closure(square_corners());
  // diagonal² = 2 equals the two-step route 1 + 1; the direct edge wins.
  CHECK(closure.cost(0, 2) == doctest::Approx(2.0));
  CHECK(closure.path_between(0, 2) == std::vector<int>{0, 2});
}

TEST_CASE("exact walk on the square") {
  const auto w = exact_covering_walk(square_corners());
  CHECK(w.exact);
  CHECK(w.cost == doctest::Approx(3.0));
  CHECK(w.revisit_count == 0);
  CHECK(validate_walk(square_corners(), w) == doctest::Approx(w.cost));
}

TEST_CASE("exact walk on the star revisits the centre") {
  const auto w = exact_covering_walk(star());
  CHECK(w.cost == doctest::Approx(4.0));
  CHECK(w.revisit_count == 1);
  REQUIRE(w.order.size() == 5);
  // outer, centre, outer, centre, outer
  CHECK(w.order[1] == 0);
  CHECK(w.order[3] == 0);

  // The best single-visit (Hamiltonian) order costs 5.
  CHECK(min_permutation_path_length(star()) > 0.0);
  const auto closure = squared_metric_closure(star());
  double best_ham = std::numeric_limits<double>::infinity();
  std::vector<int> perm{0, 1, 2, 3};
  std::sort(perm.begin(), perm.end());
  do {
    double c = 0.0;
    for (std::size_t j = 0; j + 1 < perm.size(); ++j)
      c += squared_distance(star().point(static_cast<std::size_t>(perm[j])),
                            star().point(static_cast<std::size_t>(perm[j + 1])));
    best_ham = std::min(best_ham, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(best_ham == doctest::Approx(5.0));
}

TEST_CASE("trivial and oversized instances") {
  const SampleCloud one({0.5, 0.5}, 2);
  const auto w = exact_covering_walk(one);
  CHECK(w.cost == 0.0);
  CHECK(w.revisit_count == 0);
  CHECK(w.order == std::vector<int>{0});

  Rng rng(5);
  CHECK_THROWS_AS(exact_covering_walk(random_cloud(rng, 20, 2)), size_error);
  CHECK_THROWS_AS(brute_force_walk(random_cloud(rng, 10, 2), 2), size_error);
}

TEST_CASE("brute force basics") {
  const SampleCloud two({0, 0, 1, 1}, 2);
  CHECK(brute_force_walk(two, 2).cost == doctest::Approx(2.0));
  CHECK(brute_force_walk(star(), 2).cost == doctest::Approx(4.0));

  const auto w = brute_force_walk(collinear(4), 2);
  CHECK(w.cost == doctest::Approx(3.0));
  CHECK(w.revisit_count == 0);
  std::vector<int> fwd{0, 1, 2, 3}, bwd{3, 2, 1, 0};
  CHECK((w.order == fwd || w.order == bwd));
}

TEST_CASE("exact equals brute force on random clouds") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + rng.below(4);
    const std::size_t d = 2 + rng.below(2);
    const auto cloud = random_cloud(rng, n, d);
    const auto exact = exact_covering_walk(cloud);
    const auto brute = brute_force_walk(cloud, 2);
    CHECK(std::fabs(exact.cost - brute.cost) <= 1e-9);
  }
}

TEST_CASE("heuristic walk properties") {
  Rng rng(37);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3 + rng.below(8);
    const auto cloud = random_cloud(rng, n, 2);
    const auto exact = exact_covering_walk(cloud);
    const auto heur = heuristic_covering_walk(cloud, 1000 + static_cast<std::uint64_t>(t));
    CHECK_FALSE(heur.exact);
    CHECK(heur.cost >= exact.cost - 1e-9);
    CHECK(validate_walk(cloud, heur) == doctest::Approx(heur.cost));
  }

  // Equally spaced collinear points: 2-opt reaches the monotone order.
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto w = heuristic_covering_walk(collinear(6), seed);
    CHECK(w.cost == doctest::Approx(5.0));
    CHECK(w.revisit_count == 0);
  }

  // Seeded determinism: same seed, same result.
  const auto big = random_cloud(rng, 100, 2);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto a = heuristic_covering_walk(big, seed);
    const auto b = heuristic_covering_walk(big, seed);
    CHECK(a.cost == b.cost);
    CHECK(a.order == b.order);
  }
}

TEST_CASE("walk feasibility bound") {
  const auto line = collinear(4);
  WalkSolution identity;
  identity.order = {0, 1, 2, 3};
  identity.cost = 3.0;
  identity.revisit_count = 0;
  CHECK(k_lower_bound_walk(line, identity) == doctest::Approx(4.0));

  const auto sw = exact_covering_walk(star());
  CHECK(k_lower_bound_walk(star(), sw) == doctest::Approx(8.0));

  const SampleCloud one({0.0, 0.0}, 2);
  WalkSolution trivial;
  trivial.order = {0};
  trivial.cost = 0.0;
  CHECK(k_lower_bound_walk(one, trivial) == 0.0);

  WalkSolution bad;
  bad.order = {0, 1, 1, 2, 3};
  bad.cost = 0.0;
  CHECK_THROWS_AS(static_cast<void>(k_lower_bound_walk(line, bad)), domain_error);
  WalkSolution uncovered;
  uncovered.order = {0, 1, 2};
  uncovered.cost = 2.0;
  CHECK_THROWS_AS(static_cast<void>(k_lower_bound_walk(line, uncovered)), domain_error);
  WalkSolution wrong_cost;
  wrong_cost.order = {0, 1, 2, 3};
  wrong_cost.cost = 7.0;
  CHECK_THROWS_AS(static_cast<void>(k_lower_bound_walk(line, wrong_cost)), domain_error);
}

TEST_CASE("bound dominates the permutation-path length on random clouds") {
  Rng rng(41);
  for (int t = 0; t < 15; ++t) {
    const auto cloud = random_cloud(rng, 3 + rng.below(5), 2);
    const auto w = exact_covering_walk(cloud);
    CHECK(k_lower_bound_walk(cloud, w) >= min_permutation_path_length(cloud) - 1e-9);
  }
}

TEST_CASE("rigid motions and scaling") {
  Rng rng(43);
  const auto cloud = random_cloud(rng, 6, 2);
  const auto base = exact_covering_walk(cloud);

  const double theta = 0.83;
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<double> rotated, scaled;
  const double factor = 2.5;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    rotated.push_back(c * p[0] - s * p[1] + 3.0);
    rotated.push_back(s * p[0] + c * p[1] - 1.0);
    scaled.push_back(factor * p[0]);
    scaled.push_back(factor * p[1]);
  }
  CHECK(exact_covering_walk(SampleCloud(rotated, 2)).cost ==
        doctest::Approx(base.cost).epsilon(1e-9));
  CHECK(exact_covering_walk(SampleCloud(scaled, 2)).cost ==
        doctest::Approx(factor * factor * base.cost).epsilon(1e-9));
}

TEST_CASE("walk cost is invariant under reversal") {
  Rng rng(47);
  const auto cloud = random_cloud(rng, 7, 3);
  auto w = exact_covering_walk(cloud);
  WalkSolution rev = w;
  std::reverse(rev.order.begin(), rev.order.end());
  CHECK(validate_walk(cloud, rev) == doctest::Approx(w.cost).epsilon(1e-12));
}

TEST_CASE("duplicates are merged before walking") {
  const SampleCloud dup({0, 0, 0, 0, 1, 0, 2, 0}, 2);
  const auto w = exact_covering_walk(dup);
  CHECK(w.order.size() == 3);
  CHECK(w.cost == doctest::Approx(2.0));
}
