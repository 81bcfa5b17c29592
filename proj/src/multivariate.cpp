#include "wopt/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wopt/errors.hpp"

namespace wopt {

namespace {

// Walk step length with the standing-still endpoint convention.
struct WalkGeometry {
  const SampleCloud& cloud;
  const std::vector<int>& order;

  PointRef at(std::ptrdiff_t j) const {
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(order.size());
    if (j < 0) j = 0;
    if (j >= len) j = len - 1;
    return cloud.point(static_cast<std::size_t>(order[static_cast<std::size_t>(j)]));
  }
  double step(std::ptrdiff_t j) const { return distance(at(j), at(j + 1)); }
};

} // namespace

std::vector<double> dwell_times(const SampleCloud& cloud, const WalkSolution& walk, double k) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  const double bound = k_lower_bound_walk(cloud, walk); // also validates the walk
  if (n == 1) return {1.0};
  if (k < bound) throw constraint_error(k, bound);

  const WalkGeometry geo{mc, walk.order};
  std::vector<double> visit_sum(n, 0.0);
  std::vector<double> visits(n, 0.0);
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(walk.order.size()); ++j) {
    const std::size_t i = static_cast<std::size_t>(walk.order[static_cast<std::size_t>(j)]);
    visit_sum[i] += (distance(geo.at(j - 1), geo.at(j)) + distance(geo.at(j), geo.at(j + 1)));
    visits[i] += 1.0;
  }
  std::vector<double> dwell(n);
  for (std::size_t i = 0; i < n; ++i) {
    double phi = (1.0 / static_cast<double>(n) - visit_sum[i] / (2.0 * k)) / visits[i];
    if (phi < 0.0) {
      if (phi < -kLatentTol)
        throw construction_error("dwell_times: negative dwell despite feasible K");
      phi = 0.0;
    }
    dwell[i] = phi;
  }
  return dwell;
}

double w1_closed_form_walk(const WalkSolution& walk, double k) {
  if (!(k > 0.0)) throw domain_error("w1_closed_form_walk: K must be positive");
  return walk.cost / (4.0 * k);
}

MultivariateOptimum solve_multivariate(const SampleCloud& cloud, const WalkSolution& walk,
                                       double k) {
  SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  const std::size_t d = mc.dim();
  std::vector<double> dwell = dwell_times(cloud, walk, k);
  const double bound = n == 1 ? 0.0 : k_lower_bound_walk(cloud, walk);

  const WalkGeometry geo{mc, walk.order};
  const std::size_t len = walk.order.size();
  std::vector<double> arrivals(len, 0.0);
  std::vector<double> knots{0.0};
  std::vector<double> values;
  {
    const PointRef p0 = geo.at(0);
    values.insert(values.end(), p0.begin(), p0.end());
  }
  double t = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    arrivals[j] = t;
    const double phi = dwell[static_cast<std::size_t>(walk.order[j])];
    if (phi > kLatentTol) {
      t += phi;
      knots.push_back(t);
      const PointRef p = geo.at(static_cast<std::ptrdiff_t>(j));
      values.insert(values.end(), p.begin(), p.end());
    } else {
      t += phi;
    }
    if (j + 1 < len) {
      const double step = geo.step(static_cast<std::ptrdiff_t>(j));
      if (step <= 0.0)
        throw construction_error("solve_multivariate: coincident consecutive walk points");
      t += step / k;
      knots.push_back(t);
      const PointRef p = geo.at(static_cast<std::ptrdiff_t>(j) + 1);
      values.insert(values.end(), p.begin(), p.end());
    }
  }
  if (std::fabs(t - 1.0) > kGeomTol)
    throw construction_error("solve_multivariate: latent schedule does not cover [0,1]");
  // Snap the accumulated endpoint to exactly 1.
  if (knots.back() != 1.0) {
    if (knots.back() < 1.0 - kLatentTol) {
      knots.push_back(1.0);
      const PointRef p = geo.at(static_cast<std::ptrdiff_t>(len) - 1);
      values.insert(values.end(), p.begin(), p.end());
    } else {
      knots.back() = 1.0;
    }
  }

  std::vector<double> atom_masses(n, 0.0);
  for (std::size_t j = 0; j < len; ++j)
    atom_masses[static_cast<std::size_t>(walk.order[j])] +=
        dwell[static_cast<std::size_t>(walk.order[j])];

  MultivariateOptimum out{std::move(mc),
                          walk,
                          k,
                          bound,
                          std::move(dwell),
                          std::move(arrivals),
                          PiecewiseLinearGenerator(std::move(knots), std::move(values), d, k),
                          w1_closed_form_walk(walk, k),
                          std::move(atom_masses)};
  return out;
}

std::vector<double> voronoi_occupancy(const MultivariateOptimum& opt) {
  const std::size_t n = opt.cloud.size();
  const double k = opt.k;
  const WalkGeometry geo{opt.cloud, opt.walk.order};
  const std::size_t len = opt.walk.order.size();

  std::vector<double> occupancy(n, 0.0);
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(len); ++j) {
    const std::size_t i = static_cast<std::size_t>(opt.walk.order[static_cast<std::size_t>(j)]);
    occupancy[i] += opt.dwell[i] +
                    (distance(geo.at(j - 1), geo.at(j)) + distance(geo.at(j), geo.at(j + 1))) /
                        (2.0 * k);
  }

  const double expected = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(occupancy[i] - expected) > 1e-6)
      throw construction_error("voronoi_occupancy: cell occupancy deviates from 1/n");

  // Sampled check: each transit half lies in its endpoint's standard cell.
  const std::size_t kSamplesPerSegment = 64;
  std::vector<double> x(opt.cloud.dim());
  for (std::size_t j = 0; j + 1 < len; ++j) {
    const PointRef a = geo.at(static_cast<std::ptrdiff_t>(j));
    const PointRef b = geo.at(static_cast<std::ptrdiff_t>(j) + 1);
    for (std::size_t s = 0; s < kSamplesPerSegment; ++s) {
      const double t = (static_cast<double>(s) + 0.5) / kSamplesPerSegment;
      for (std::size_t c = 0; c < x.size(); ++c) x[c] = a[c] + t * (b[c] - a[c]);
      const std::size_t claimed = static_cast<std::size_t>(
          t <= 0.5 ? opt.walk.order[j] : opt.walk.order[j + 1]);
      const double dc = distance(x, opt.cloud.point(claimed));
      for (std::size_t other = 0; other < n; ++other)
        if (distance(x, opt.cloud.point(other)) < dc - kGeomTol)
          throw construction_error(
              "voronoi_occupancy: transit point left its endpoint's Voronoi cell");
    }
  }
  return occupancy;
}

CenterVisitReport visits_cell_centers(const PiecewiseLinearGenerator& g,
                                      const SampleCloud& cloud,
                                      const std::vector<double>& weights,
                                      std::size_t grid_size) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  std::vector<double> w = weights.empty() ? std::vector<double>(n, 0.0) : weights;
  if (w.size() != n) throw domain_error("visits_cell_centers: weight count mismatch");
  const WeightedVoronoi vor = make_weighted_voronoi(mc.flat(), mc.dim(), std::move(w));

  // Latent sample points: uniform grid plus the generator's knots, so exact
  // touch points (zero-width pauses) are never missed.
  std::vector<double> us;
  us.reserve(grid_size + g.knot_count());
  for (std::size_t s = 0; s < grid_size; ++s)
    us.push_back(static_cast<double>(s) / static_cast<double>(grid_size - 1));
  us.insert(us.end(), g.knots().begin(), g.knots().end());
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());

  std::vector<int> owner(us.size());
  std::vector<double> dist_to_owner(us.size());
  std::vector<double> x(g.dim());
  for (std::size_t s = 0; s < us.size(); ++s) {
    g.evaluate(us[s], x);
    const int c = transport_map_apply(x, vor);
    owner[s] = c;
    dist_to_owner[s] = distance(x, mc.point(static_cast<std::size_t>(c)));
  }

  // Bisects the owner change between two latent points; returns the boundary.
  auto refine_edge = [&](double inside, double outside, int cell) {
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (inside + outside);
      g.evaluate(mid, x);
      if (transport_map_apply(x, vor) == cell)
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };

  const double kAttainTol = 1e-6;
  std::size_t run_start = 0;
  CenterVisitReport report;
  for (std::size_t s = 1; s <= us.size(); ++s) {
    if (s < us.size() && owner[s] == owner[run_start]) continue;
    double best = dist_to_owner[run_start];
    for (std::size_t t = run_start; t < s; ++t) best = std::min(best, dist_to_owner[t]);
    if (best > kAttainTol) {
      report.ok = false;
      report.cell = owner[run_start];
      report.u_lo = run_start > 0
                        ? refine_edge(us[run_start], us[run_start - 1], owner[run_start])
                        : us.front();
      report.u_hi = s < us.size() ? refine_edge(us[s - 1], us[s], owner[run_start]) : us.back();
      report.min_distance = best;
      return report;
    }
    run_start = s;
  }
  return report;
}

} // namespace wopt
