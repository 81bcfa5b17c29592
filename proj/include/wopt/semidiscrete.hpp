#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wopt/generator.hpp"
#include "wopt/geometry.hpp"
#include "wopt/rng.hpp"

namespace wopt {

// Additively weighted Voronoi diagram around a set of atoms, together with
// the target cell masses the weights are adapted to. weights[0] is gauge
// fixed to 0 (adding a constant to all weights leaves every cell unchanged).
struct WeightedVoronoi {
  std::vector<double> atoms; // flat row-major
  std::size_t dim = 1;
  std::vector<double> weights;
  std::vector<double> target_masses;

  std::size_t size() const { return weights.size(); }
  PointRef atom(std::size_t i) const { return {atoms.data() + i * dim, dim}; }
};

WeightedVoronoi make_weighted_voronoi(std::vector<double> atoms, std::size_t dim,
                                      std::vector<double> weights,
                                      std::vector<double> target_masses = {});

// Cell membership of a point: the argmin set of ||x - X_i|| - w_i within tol.
// A singleton is an interior point; two or more indices name the boundary
// stratum shared by exactly those cells.
struct CellAssignment {
  std::vector<int> cells; // sorted ascending
  bool boundary() const { return cells.size() > 1; }
  int primary() const { return cells.front(); } // lowest-index rule
};

CellAssignment cell_of_point(PointRef x, const WeightedVoronoi& vor, double tol = kGeomTol);

// Transport map induced by the diagram; boundary points go to the lowest
// index of their stratum (a measure-zero choice for nonatomic inputs).
int transport_map_apply(PointRef x, const WeightedVoronoi& vor);

// Draws one point into `out`; must be i.i.d. across calls on the same Rng.
using Sampler = std::function<void(Rng&, std::span<double>)>;

Sampler uniform_interval_sampler(double a, double b);
Sampler uniform_box_sampler(std::size_t dim);
// Pushforward of the uniform latent variable; rejects generators with
// plateaus (their pushforward has atoms) - smooth them with perturb_plateaus.
Sampler pushforward_sampler(const PiecewiseLinearGenerator& g);

struct DualAscentOptions {
  std::size_t iterations = 4000;
  std::size_t batch = 256;
  double step_a = 1.0; // step size a/(b + sqrt(t))
  double step_b = 10.0;
  double tolerance = 0.01;        // max |nu(cell) - alpha| on the evaluation batch
  std::size_t eval_samples = 200000;
  std::uint64_t seed = 1;
};

// Stochastic ascent on the concave dual
//   Phi(w) = sum_i alpha_i w_i + E_nu[min_i(||x - X_i|| - w_i)],
// whose gradient component i is alpha_i - nu(Vor^w(i)). Returns the adapted
// diagram; throws convergence_error with the final residual when the
// held-out estimate of ||nu(cells) - alpha||_inf exceeds the tolerance.
WeightedVoronoi adapted_weights(const Sampler& nu, std::vector<double> atoms, std::size_t dim,
                                std::vector<double> alpha, const DualAscentOptions& opt);

// Residual ||nu_hat(cells) - alpha||_inf on a fresh batch.
double mass_residual(const Sampler& nu, const WeightedVoronoi& vor, std::size_t samples,
                     std::uint64_t seed);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Monte-Carlo E_nu ||x - T^w(x)||.
MonteCarloEstimate transport_cost_estimate(const Sampler& nu, const WeightedVoronoi& vor,
                                           std::size_t samples, std::uint64_t seed);

// Monte-Carlo estimate of the dual objective Phi(w) with alpha taken from the
// diagram's target masses.
MonteCarloEstimate dual_objective_estimate(const Sampler& nu, const WeightedVoronoi& vor,
                                           std::size_t samples, std::uint64_t seed);

} // namespace wopt
