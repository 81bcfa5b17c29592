#include "wopt/semidiscrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wopt/errors.hpp"

namespace wopt {

WeightedVoronoi make_weighted_voronoi(std::vector<double> atoms, std::size_t dim,
                                      std::vector<double> weights,
                                      std::vector<double> target_masses) {
  if (dim == 0) throw domain_error("weighted voronoi: dimension must be >= 1");
  if (weights.empty() || atoms.size() != weights.size() * dim)
    throw domain_error("weighted voronoi: atoms/weights size mismatch");
  if (target_masses.empty())
    target_masses.assign(weights.size(), 1.0 / static_cast<double>(weights.size()));
  if (target_masses.size() != weights.size())
    throw domain_error("weighted voronoi: target mass count mismatch");
  double total = 0.0;
  for (double a : target_masses) {
    if (!(a >= 0.0)) throw domain_error("weighted voronoi: negative target mass");
    total += a;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw domain_error("weighted voronoi: target masses must sum to 1");
  // Gauge: the diagram only depends on weight differences.
  const double w0 = weights.front();
  for (double& w : weights) w -= w0;
  return WeightedVoronoi{std::move(atoms), dim, std::move(weights), std::move(target_masses)};
}

CellAssignment cell_of_point(PointRef x, const WeightedVoronoi& vor, double tol) {
  if (tol < 0.0) throw domain_error("cell_of_point: tolerance must be nonnegative");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vor.size(); ++i)
    best = std::min(best, distance(x, vor.atom(i)) - vor.weights[i]);
  CellAssignment out;
  for (std::size_t i = 0; i < vor.size(); ++i)
    if (distance(x, vor.atom(i)) - vor.weights[i] <= best + tol)
      out.cells.push_back(static_cast<int>(i));
  return out;
}

int transport_map_apply(PointRef x, const WeightedVoronoi& vor) {
  // Exact argmin with the lowest index winning ties; no tolerance needed for
  // the map itself since boundaries carry no mass under nonatomic inputs.
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (std::size_t i = 0; i < vor.size(); ++i) {
    const double v = distance(x, vor.atom(i)) - vor.weights[i];
    if (v < best) {
      best = v;
      arg = static_cast<int>(i);
    }
  }
  return arg;
}

Sampler uniform_interval_sampler(double a, double b) {
  if (!(b > a)) throw domain_error("uniform_interval_sampler: need a < b");
  return [a, b](Rng& rng, std::span<double> out) { out[0] = rng.uniform(a, b); };
}

Sampler uniform_box_sampler(std::size_t dim) {
  if (dim == 0) throw domain_error("uniform_box_sampler: dimension must be >= 1");
  return [dim](Rng& rng, std::span<double> out) {
    for (std::size_t c = 0; c < dim; ++c) out[c] = rng.uniform();
  };
}

Sampler pushforward_sampler(const PiecewiseLinearGenerator& g) {
  if (has_plateaus(g))
    throw domain_error(
        "pushforward_sampler: generator has plateaus, so its pushforward has atoms; "
        "smooth it with perturb_plateaus first");
  return [g](Rng& rng, std::span<double> out) { g.evaluate(rng.uniform(), out); };
}

namespace {

std::vector<double> estimate_masses(const Sampler& nu, const WeightedVoronoi& vor,
                                    std::size_t samples, Rng& rng) {
  std::vector<double> mass(vor.size(), 0.0);
  std::vector<double> x(vor.dim);
  for (std::size_t s = 0; s < samples; ++s) {
    nu(rng, x);
    mass[static_cast<std::size_t>(transport_map_apply(x, vor))] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(samples);
  return mass;
}

} // namespace

WeightedVoronoi adapted_weights(const Sampler& nu, std::vector<double> atoms, std::size_t dim,
                                std::vector<double> alpha, const DualAscentOptions& opt) {
  const std::size_t n = alpha.size();
  WeightedVoronoi vor =
      make_weighted_voronoi(std::move(atoms), dim, std::vector<double>(n, 0.0), std::move(alpha));

  Rng rng(seed_combine(opt.seed, 0x5d07ULL));
  std::vector<double> x(dim);
  for (std::size_t t = 1; t <= opt.iterations; ++t) {
    std::vector<double> mass(n, 0.0);
    for (std::size_t s = 0; s < opt.batch; ++s) {
      nu(rng, x);
      mass[static_cast<std::size_t>(transport_map_apply(x, vor))] += 1.0;
    }
    const double step =
        opt.step_a / (opt.step_b + std::sqrt(static_cast<double>(t)));
    const double inv_batch = 1.0 / static_cast<double>(opt.batch);
    for (std::size_t i = 0; i < n; ++i)
      vor.weights[i] += step * (vor.target_masses[i] - mass[i] * inv_batch);
    const double w0 = vor.weights.front();
    for (double& w : vor.weights) w -= w0;
  }

  // Convergence is judged on held-out draws, never the training ones.
  const double residual =
      mass_residual(nu, vor, opt.eval_samples, seed_combine(opt.seed, 0xe5a1ULL));
  if (residual > opt.tolerance)
    throw convergence_error("adapted_weights: dual ascent did not reach the mass tolerance",
                            residual);
  return vor;
}

double mass_residual(const Sampler& nu, const WeightedVoronoi& vor, std::size_t samples,
                     std::uint64_t seed) {
  Rng rng(seed);
  const auto mass = estimate_masses(nu, vor, samples, rng);
  double r = 0.0;
  for (std::size_t i = 0; i < vor.size(); ++i)
    r = std::max(r, std::fabs(mass[i] - vor.target_masses[i]));
  return r;
}

MonteCarloEstimate transport_cost_estimate(const Sampler& nu, const WeightedVoronoi& vor,
                                           std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw domain_error("transport_cost_estimate: need at least one sample");
  Rng rng(seed);
  std::vector<double> x(vor.dim);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    nu(rng, x);
    const double c =
        distance(x, vor.atom(static_cast<std::size_t>(transport_map_apply(x, vor))));
    sum += c;
    sum_sq += c * c;
  }
  MonteCarloEstimate est;
  est.samples = samples;
  est.mean = sum / static_cast<double>(samples);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(samples) - est.mean * est.mean);
  est.standard_error = std::sqrt(var / static_cast<double>(samples));
  return est;
}

MonteCarloEstimate dual_objective_estimate(const Sampler& nu, const WeightedVoronoi& vor,
                                           std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw domain_error("dual_objective_estimate: need at least one sample");
  Rng rng(seed);
  std::vector<double> x(vor.dim);
  double base = 0.0;
  for (std::size_t i = 0; i < vor.size(); ++i)
    base += vor.target_masses[i] * vor.weights[i];
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    nu(rng, x);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vor.size(); ++i)
      m = std::min(m, distance(x, vor.atom(i)) - vor.weights[i]);
    sum += m;
    sum_sq += m * m;
  }
  MonteCarloEstimate est;
  est.samples = samples;
  const double mean_min = sum / static_cast<double>(samples);
  est.mean = base + mean_min;
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(samples) - mean_min * mean_min);
  est.standard_error = std::sqrt(var / static_cast<double>(samples));
  return est;
}

} // namespace wopt
