#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "wopt/errors.hpp"
#include "wopt/measure.hpp"
#include "wopt/multivariate.hpp"
#include "wopt/oracle.hpp"
#include "wopt/rng.hpp"
#include "wopt/univariate.hpp"
#include "wopt/walk.hpp"

using namespace wopt;

namespace {

const double kRoot3 = std::sqrt(3.0);

SampleCloud star() {
  return SampleCloud({0, 0, 1, 0, -0.5, kRoot3 / 2, -0.5, -kRoot3 / 2}, 2);
}

SampleCloud collinear4() {
  return SampleCloud({0, 0, 1, 0, 2, 0, 3, 0}, 2);
}

WalkSolution identity_walk(const SampleCloud& cloud) {
  WalkSolution w;
  w.order.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) w.order[i] = static_cast<int>(i);
  w.cost = 0.0;
  for (std::size_t i = 0; i + 1 < cloud.size(); ++i)
    w.cost += squared_distance(cloud.point(i), cloud.point(i + 1));
  w.revisit_count = 0;
  return w;
}

// Random generator that walks all samples in a random order with random
// pauses, moving at speed <= k. Returns nothing when the order does not fit
// into the unit latent budget at this K.
std::optional<PiecewiseLinearGenerator> random_walk_competitor(const SampleCloud& cloud,
                                                               double k, Rng& rng) {
  const std::size_t n = cloud.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);
  // occasional revisit
  if (n >= 3 && rng.uniform() < 0.4) order.push_back(order[rng.below(n - 1)]);

  double travel = 0.0;
  for (std::size_t j = 0; j + 1 < order.size(); ++j)
    travel += distance(cloud.point(static_cast<std::size_t>(order[j])),
                       cloud.point(static_cast<std::size_t>(order[j + 1])));
  if (travel / k >= 1.0) return std::nullopt;

  // Split the leftover latent time into random pauses at the visits.
  const double slack = 1.0 - travel / k;
  std::vector<double> pause(order.size());
  double total = 0.0;
  for (double& p : pause) {
    p = rng.uniform();
    total += p;
  }
  for (double& p : pause) p *= slack / total;

  std::vector<double> knots{0.0};
  std::vector<double> values;
  values.insert(values.end(), cloud.point(static_cast<std::size_t>(order[0])).begin(),
                cloud.point(static_cast<std::size_t>(order[0])).end());
  double t = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto p = cloud.point(static_cast<std::size_t>(order[j]));
    if (pause[j] > 0.0) {
      t += pause[j];
      knots.push_back(t);
      values.insert(values.end(), p.begin(), p.end());
    }
    if (j + 1 < order.size()) {
      const auto q = cloud.point(static_cast<std::size_t>(order[j + 1]));
      t += distance(p, q) / k;
      knots.push_back(t);
      values.insert(values.end(), q.begin(), q.end());
    }
  }
  knots.back() = 1.0;
  return PiecewiseLinearGenerator(std::move(knots), std::move(values), cloud.dim(), k);
}

} // namespace

TEST_CASE("dwell times on the star") {
  const auto walk = exact_covering_walk(star());

  const auto dwell16 = dwell_times(star(), walk, 16.0);
  CHECK(dwell16[0] == doctest::Approx(1.0 / 16.0).epsilon(1e-12)); // centre, two visits
  const auto opt16 = solve_multivariate(star(), walk, 16.0);
  CHECK(opt16.atom_masses[0] == doctest::Approx(0.125).epsilon(1e-12));

  // At K equal to the bound the centre's pause vanishes.
  const auto dwell8 = dwell_times(star(), walk, 8.0);
  CHECK(dwell8[0] == doctest::Approx(0.0));

  CHECK_THROWS_AS(static_cast<void>(dwell_times(star(), walk, 7.0)), constraint_error);
}

TEST_CASE("single point dwells forever") {
  const SampleCloud one({2.0, 3.0}, 2);
  WalkSolution w;
  w.order = {0};
  w.cost = 0.0;
  CHECK(dwell_times(one, w, 5.0) == std::vector<double>{1.0});
  const auto opt = solve_multivariate(one, w, 5.0);
  CHECK(opt.w1_value == 0.0);
  CHECK(voronoi_occupancy(opt) == std::vector<double>{1.0});
}

TEST_CASE("walking construction on the star") {
  const auto walk = exact_covering_walk(star());
  const auto opt = solve_multivariate(star(), walk, 16.0);
  CHECK(opt.w1_value == doctest::Approx(4.0 / 64.0).epsilon(1e-12)); // 1/16
  CHECK(opt.k_lower == doctest::Approx(8.0));

  // Arrival times telescope: V_{j+1} = V_j + dwell + step/K, ending at 1.
  for (std::size_t j = 0; j + 1 < walk.order.size(); ++j) {
    const double step = distance(opt.cloud.point(static_cast<std::size_t>(walk.order[j])),
                                 opt.cloud.point(static_cast<std::size_t>(walk.order[j + 1])));
    CHECK(opt.arrivals[j + 1] ==
          doctest::Approx(opt.arrivals[j] +
                          opt.dwell[static_cast<std::size_t>(walk.order[j])] + step / 16.0)
              .epsilon(1e-12));
  }
  const double end = opt.arrivals.back() + opt.dwell[static_cast<std::size_t>(walk.order.back())];
  CHECK(std::fabs(end - 1.0) <= 1e-9);

  // Total atom mass plus transit time is 1.
  double atoms = 0.0;
  for (double m : opt.atom_masses) atoms += m;
  double transit = 0.0;
  for (std::size_t j = 0; j + 1 < walk.order.size(); ++j)
    transit += distance(opt.cloud.point(static_cast<std::size_t>(walk.order[j])),
                        opt.cloud.point(static_cast<std::size_t>(walk.order[j + 1]))) /
               16.0;
  CHECK(std::fabs(atoms + transit - 1.0) <= 1e-9);

  CHECK(validate_lipschitz(opt.generator, 16.0, 8192).ok);

  const auto occ = voronoi_occupancy(opt);
  for (double o : occ) CHECK(o == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("collinear cloud reduces to the 1-D construction") {
  const auto cloud = collinear4();
  const auto walk = identity_walk(cloud);
  CHECK(k_lower_bound_walk(cloud, walk) == doctest::Approx(4.0));

  const auto opt = solve_multivariate(cloud, walk, 4.0);
  CHECK(opt.w1_value == doctest::Approx(3.0 / 16.0).epsilon(1e-12));

  const SampleCloud line({0, 1, 2, 3}, 1);
  CHECK(w1_closed_form_1d(line, 4.0) == doctest::Approx(opt.w1_value).epsilon(1e-12));

  const auto occ = voronoi_occupancy(opt);
  for (double o : occ) CHECK(o == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("closed form scales as 1/K") {
  const auto walk = exact_covering_walk(star());
  const double v = w1_closed_form_walk(walk, 16.0);
  CHECK(w1_closed_form_walk(walk, 32.0) == doctest::Approx(0.5 * v).epsilon(1e-15));

  WalkSolution square_walk = exact_covering_walk(SampleCloud({0, 0, 1, 0, 1, 1, 0, 1}, 2));
  CHECK(w1_closed_form_walk(square_walk, 12.0) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("closed form versus the transport oracle") {
  Rng rng(53);
  for (int t = 0; t < 4; ++t) {
    const std::size_t n = 4 + rng.below(4);
    std::vector<double> pts(n * 2);
    for (double& v : pts) v = rng.uniform();
    const SampleCloud cloud(pts, 2);
    const auto walk = exact_covering_walk(cloud);
    const double k = 2.0 * k_lower_bound_walk(cloud, walk);
    const auto opt = solve_multivariate(cloud, walk, k);
    const std::size_t grid = 20000;
    const auto oracle = w1_generator_vs_empirical(opt.generator, cloud, grid);
    CHECK(std::fabs(oracle.value - opt.w1_value) <= 2.0 * k / static_cast<double>(grid));
  }
}

TEST_CASE("random walk-with-pauses competitors never beat the optimum") {
  Rng rng(59);
  std::vector<double> pts(12);
  for (double& v : pts) v = rng.uniform();
  const SampleCloud cloud(pts, 2);
  const auto walk = exact_covering_walk(cloud);
  const double k = 2.0 * k_lower_bound_walk(cloud, walk);
  const double optimum = w1_closed_form_walk(walk, k);
  const auto emp = empirical_measure(cloud);
  const std::size_t grid = 20000;

  int tested = 0;
  while (tested < 30) {
    const auto competitor = random_walk_competitor(cloud, k, rng);
    if (!competitor) continue;
    ++tested;
    const double w1 = w1_discrete_exact(pushforward_discretize(*competitor, grid), emp);
    CHECK(w1 >= optimum - 2.0 * k / static_cast<double>(grid));
  }
}

TEST_CASE("centre-visit check") {
  // The walking optimum pauses at every centre.
  const auto walk = exact_covering_walk(star());
  const auto opt = solve_multivariate(star(), walk, 16.0);
  CHECK(visits_cell_centers(opt.generator, star(), {}).ok);

  // Even with zero-width pauses (K at the bound) it still touches them.
  const auto tight = solve_multivariate(star(), walk, 8.0);
  CHECK(visits_cell_centers(tight.generator, star(), {}).ok);

  // A straight line across a third sample's cell misses its centre.
  const SampleCloud three({0, 0, 1, 0.4, 2, 0}, 2);
  const PiecewiseLinearGenerator segment({0.0, 1.0}, {0, 0, 2, 0}, 2, 2.0);
  const auto report = visits_cell_centers(segment, three, {});
  CHECK_FALSE(report.ok);
  CHECK(report.cell == 1);
  CHECK(report.min_distance > 0.3);
  CHECK(report.u_lo < report.u_hi);

  const SampleCloud one({0.0, 0.0}, 2);
  const PiecewiseLinearGenerator still({0.0, 1.0}, {0, 0, 0, 0}, 2, 1.0);
  CHECK(visits_cell_centers(still, one, {}).ok);
}

TEST_CASE("degenerate walks are rejected") {
  const auto cloud = collinear4();
  WalkSolution stutter;
  stutter.order = {0, 1, 2, 3, 3};
  stutter.cost = 3.0;
  CHECK_THROWS_AS(static_cast<void>(dwell_times(cloud, stutter, 100.0)), domain_error);
}
