#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wopt/errors.hpp"
#include "wopt/measure.hpp"
#include "wopt/rng.hpp"
#include "wopt/sample_cloud.hpp"
#include "wopt/univariate.hpp"

using namespace wopt;

namespace {

SampleCloud cloud1d(std::initializer_list<double> xs) {
  return SampleCloud(std::vector<double>(xs), 1);
}

PiecewiseLinearGenerator line01() {
  return PiecewiseLinearGenerator({0.0, 1.0}, {0.0, 1.0}, 1, 1.0);
}

} // namespace

TEST_CASE("sample cloud structure") {
  const SampleCloud c({0.0, 0.0, 1.0}, 1);
  CHECK(c.size() == 3);
  CHECK(c.has_duplicates());
  REQUIRE(c.duplicate_groups().size() == 2);
  CHECK(c.duplicate_groups()[0] == std::vector<std::size_t>{0, 1});
  CHECK(c.duplicate_groups()[1] == std::vector<std::size_t>{2});
  CHECK(c.merged().size() == 2);

  CHECK_THROWS_AS(SampleCloud({}, 1), domain_error);
  CHECK_THROWS_AS(SampleCloud({1.0, 2.0, 3.0}, 2), domain_error);
  CHECK_THROWS_AS(SampleCloud({std::nan("")}, 1), domain_error);
}

TEST_CASE("duplicate groups partition random clouds") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts;
    const std::size_t n = 2 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(std::floor(rng.uniform() * 5.0));
    const SampleCloud c(pts, 1);
    std::vector<int> seen(n, 0);
    for (const auto& g : c.duplicate_groups()) {
      CHECK(!g.empty());
      for (std::size_t i : g) {
        CHECK(pts[i] == pts[g.front()]);
        ++seen[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == 1);
  }
}

TEST_CASE("generator evaluation") {
  const auto g = line01();
  CHECK(g.evaluate_scalar(0.5) == doctest::Approx(0.5));
  CHECK(g.evaluate_scalar(0.0) == 0.0);
  CHECK(g.evaluate_scalar(1.0) == 1.0);
  CHECK_THROWS_AS(g.evaluate_scalar(-0.1), domain_error);
  CHECK_THROWS_AS(g.evaluate_scalar(1.1), domain_error);

  // On the worked 5-point instance, u = 1/5 is the midpoint of the first
  // transit, so the value is the midpoint of the first two samples.
  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  CHECK(opt.generator.evaluate_scalar(0.2) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("evaluation is exact at knots") {
  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  const auto& g = opt.generator;
  for (std::size_t j = 0; j < g.knot_count(); ++j) {
    const double v = g.evaluate_scalar(g.knots()[j]);
    CHECK(v == g.values()[j]); // bit-for-bit
  }
}

TEST_CASE("generator construction rejects bad inputs") {
  CHECK_THROWS_AS(PiecewiseLinearGenerator({0.0, 0.5}, {0.0, 1.0}, 1, 1.0), domain_error);
  CHECK_THROWS_AS(PiecewiseLinearGenerator({0.0, 0.5, 0.5, 1.0}, {0, 1, 1, 0}, 1, 4.0),
                  domain_error);
  CHECK_THROWS_AS(PiecewiseLinearGenerator({0.0, 1.0}, {0.0}, 1, 1.0), domain_error);
}

TEST_CASE("pushforward discretization") {
  const PiecewiseLinearGenerator constant({0.0, 1.0}, {3.0, 3.0}, 1, 1.0);
  const auto m1 = pushforward_discretize(constant, 100);
  REQUIRE(m1.size() == 1);
  CHECK(m1.atoms[0] == 3.0);
  CHECK(m1.masses[0] == doctest::Approx(1.0).epsilon(1e-12));

  const auto m2 = pushforward_discretize(line01(), 2);
  REQUIRE(m2.size() == 2);
  CHECK(m2.atoms[0] == doctest::Approx(0.25));
  CHECK(m2.atoms[1] == doctest::Approx(0.75));
  CHECK(m2.masses[0] == doctest::Approx(0.5));

  // Total mass is 1 for any grid size.
  for (std::size_t grid : {1u, 7u, 97u, 1024u})
    CHECK(pushforward_discretize(line01(), grid).total_mass() ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pushforward plateau masses converge to the construction's atom masses") {
  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  const std::size_t grid = 100000;
  const auto push = pushforward_discretize(opt.generator, grid);
  const double tol = 2.0 / static_cast<double>(grid);
  for (std::size_t i = 0; i < opt.sorted_samples.size(); ++i) {
    double got = 0.0;
    for (std::size_t a = 0; a < push.size(); ++a)
      if (push.atoms[a] == opt.sorted_samples[i]) got += push.masses[a];
    CHECK(std::fabs(got - opt.atom_masses[i]) <= tol);
  }
}

TEST_CASE("lipschitz validation") {
  const auto ok = validate_lipschitz(line01(), 1.0, 64);
  CHECK(ok.ok);
  CHECK(ok.max_ratio == doctest::Approx(1.0).epsilon(1e-9));

  const PiecewiseLinearGenerator steep({0.0, 1.0}, {0.0, 2.0}, 1, 2.0);
  const auto bad = validate_lipschitz(steep, 1.0, 64);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_ratio == doctest::Approx(2.0).epsilon(1e-9));

  // The 1-D optimum moves at speed exactly K on transits.
  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  const auto r = validate_lipschitz(opt.generator, 25.0, 4096);
  CHECK(r.ok);
  CHECK(r.max_ratio == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(validate_lipschitz(line01(), 1.0, 1), domain_error);
}

TEST_CASE("generator json round trip") {
  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  const auto text = opt.generator.to_json();
  const auto back = PiecewiseLinearGenerator::from_json(text);
  CHECK(back.lipschitz_bound() == opt.generator.lipschitz_bound());
  REQUIRE(back.knot_count() == opt.generator.knot_count());
  for (std::size_t j = 0; j < back.knot_count(); ++j) {
    CHECK(back.knots()[j] == opt.generator.knots()[j]);
    CHECK(back.values()[j] == opt.generator.values()[j]);
  }
  CHECK_THROWS_AS(PiecewiseLinearGenerator::from_json("{\"k\": 1.0, \"breakpoints\": []}"),
                  domain_error);
}

TEST_CASE("discrete measure merging") {
  const auto m = make_discrete_measure({1.0, 1.0, 2.0}, 1, {0.25, 0.5, 0.25});
  REQUIRE(m.size() == 2);
  CHECK(m.atoms[0] == 1.0);
  CHECK(m.masses[0] == doctest::Approx(0.75));

  const auto emp = empirical_measure(SampleCloud({0.0, 0.0, 1.0}, 1));
  REQUIRE(emp.size() == 2);
  CHECK(emp.masses[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("reflection") {
  const PiecewiseLinearGenerator g({0.0, 1.0}, {2.0, 5.0}, 1, 3.0);
  const auto r = reflect_generator(g);
  CHECK(r.evaluate_scalar(0.0) == 5.0);
  CHECK(r.evaluate_scalar(1.0) == 2.0);

  const auto opt = solve_univariate_1d(cloud1d({1, 2, 4, 7, 9}), 25.0);
  const auto twice = reflect_generator(reflect_generator(opt.generator));
  REQUIRE(twice.knot_count() == opt.generator.knot_count());
  for (std::size_t j = 0; j < twice.knot_count(); ++j) {
    // Latent knots renormalize up to the latent tolerance; values are copies.
    CHECK(std::fabs(twice.knots()[j] - opt.generator.knots()[j]) <= kLatentTol);
    CHECK(twice.values()[j] == opt.generator.values()[j]);
  }
}

TEST_CASE("plateau perturbation removes atoms and keeps the bound") {
  const auto opt = solve_univariate_1d(cloud1d({0, 1}), 2.0);
  CHECK(has_plateaus(opt.generator));
  const auto smooth = perturb_plateaus(opt.generator, 1000.0);
  CHECK_FALSE(has_plateaus(smooth));
  CHECK(validate_lipschitz(smooth, opt.generator.lipschitz_bound(), 4096).ok);
}
