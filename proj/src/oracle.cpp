#include "wopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "network_simplex.hpp"
#include "wopt/errors.hpp"

namespace wopt {

namespace {

void check_masses_match(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim != b.dim) throw dimension_error(b.dim, a.dim);
  if (std::fabs(a.total_mass() - b.total_mass()) > 1e-9)
    throw domain_error("w1: total masses differ");
}

} // namespace

double w1_discrete_exact(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  check_masses_match(a, b);

  // Drop zero-mass atoms and rebalance the tiny fp mass difference.
  std::vector<double> src_pts, snk_pts, supplies, demands;
  const std::size_t d = a.dim;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.masses[i] > 0.0) {
      supplies.push_back(a.masses[i]);
      src_pts.insert(src_pts.end(), a.atom(i).begin(), a.atom(i).end());
    }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b.masses[j] > 0.0) {
      demands.push_back(b.masses[j]);
      snk_pts.insert(snk_pts.end(), b.atom(j).begin(), b.atom(j).end());
    }
  const double sa = std::accumulate(supplies.begin(), supplies.end(), 0.0);
  const double sb = std::accumulate(demands.begin(), demands.end(), 0.0);
  if (sb > 0.0) {
    const double f = sa / sb;
    for (double& v : demands) v *= f;
  }

  double scale = 0.0;
  {
    // Upper bound on any ground distance via coordinate ranges.
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    auto feed = [&](const std::vector<double>& pts) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        lo[i % d] = std::min(lo[i % d], pts[i]);
        hi[i % d] = std::max(hi[i % d], pts[i]);
      }
    };
    feed(src_pts);
    feed(snk_pts);
    for (std::size_t c = 0; c < d; ++c) scale += (hi[c] - lo[c]) * (hi[c] - lo[c]);
    scale = std::sqrt(scale);
  }

  detail::TransportSimplex solver;
  const std::size_t n = demands.size();
  auto cost = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double t = src_pts[i * d + c] - snk_pts[j * d + c];
      s += t * t;
    }
    return std::sqrt(s);
  };
  (void)n;
  const auto res = solver.solve(supplies, demands, cost, scale);
  if (res.max_dual_violation < -1e-9 * std::max(1.0, scale))
    throw construction_error("w1_discrete_exact: dual feasibility certificate failed");
  return res.cost;
}

double w1_1d_quantile(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim != 1 || b.dim != 1) throw dimension_error(std::max(a.dim, b.dim), 1);
  check_masses_match(a, b);

  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> v; // (atom, mass)
    v.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.masses[i] > 0.0) v.emplace_back(m.atoms[i], m.masses[i]);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto va = sorted(a);
  const auto vb = sorted(b);
  const double total = a.total_mass();

  // Walk the merged quantile levels; between consecutive levels both quantile
  // functions are constant.
  double w1 = 0.0;
  double level = 0.0, ca = 0.0, cb = 0.0;
  std::size_t i = 0, j = 0;
  while (i < va.size() && j < vb.size()) {
    const double next_a = ca + va[i].second;
    const double next_b = cb + vb[j].second;
    const double next = std::min({next_a, next_b, total});
    w1 += (next - level) * std::fabs(va[i].first - vb[j].first);
    level = next;
    if (next_a <= next_b) {
      ca = next_a;
      ++i;
    }
    if (next_b <= next_a) {
      cb = next_b;
      ++j;
    }
  }
  return w1;
}

GeneratorW1 w1_generator_vs_empirical(const PiecewiseLinearGenerator& g,
                                      const SampleCloud& cloud, std::size_t grid_size) {
  if (grid_size < cloud.size())
    throw domain_error("w1_generator_vs_empirical: grid must have at least n points");
  GeneratorW1 out;
  const DiscreteMeasure push = pushforward_discretize(g, grid_size);
  const DiscreteMeasure emp = empirical_measure(cloud);
  out.value = w1_discrete_exact(push, emp);
  out.bias_bound = g.lipschitz_bound() / (2.0 * static_cast<double>(grid_size));
  return out;
}

} // namespace wopt
