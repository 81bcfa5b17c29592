#pragma once

#include <cstddef>
#include <vector>

#include "wopt/generator.hpp"
#include "wopt/sample_cloud.hpp"
#include "wopt/semidiscrete.hpp"
#include "wopt/walk.hpp"

namespace wopt {

// The walking generator in R^d: follows a covering walk, pausing for the
// dwell time at each visit and transiting between consecutive walk points in
// a straight line at speed exactly K.
struct MultivariateOptimum {
  SampleCloud cloud; // merged
  WalkSolution walk;
  double k = 0.0;
  double k_lower = 0.0;            // feasibility bound of this walk
  std::vector<double> dwell;       // pause length per sample index, per visit
  std::vector<double> arrivals;    // latent arrival time per walk position
  PiecewiseLinearGenerator generator;
  double w1_value = 0.0;           // walk cost / (4K)
  std::vector<double> atom_masses; // per sample index: visits * dwell
};

// dwell(i) = (1/|visits(i)|) * (1/n - sum over visits of
//            (||prev - X_i|| + ||next - X_i||) / (2K)), endpoints repeated.
// Throws constraint_error when k is below the walk's feasibility bound.
std::vector<double> dwell_times(const SampleCloud& cloud, const WalkSolution& walk, double k);

MultivariateOptimum solve_multivariate(const SampleCloud& cloud, const WalkSolution& walk,
                                       double k);

// walk.cost / (4K).
double w1_closed_form_walk(const WalkSolution& walk, double k);

// Latent time the generator spends in each sample's standard Voronoi cell:
// plateau times plus half of each adjacent transit. Each entry must equal
// 1/n; deviations beyond 1e-6 throw construction_error. Also verifies on a
// 64-point grid per transit that sampled transit points lie in the claimed
// endpoint's cell.
std::vector<double> voronoi_occupancy(const MultivariateOptimum& opt);

struct CenterVisitReport {
  bool ok = true;
  int cell = -1;        // first violating cell, when !ok
  double u_lo = 0.0;    // violating latent interval
  double u_hi = 0.0;
  double min_distance = 0.0; // closest approach to the cell's atom on it
};

// Checks that whenever the generator's image enters a weighted cell, it
// attains the cell's atom (within 1e-6) inside that latent interval.
// Latent space is scanned on a grid of `grid_size` points refined at interval
// boundaries, with the generator's own knots added to the sample set.
CenterVisitReport visits_cell_centers(const PiecewiseLinearGenerator& g,
                                      const SampleCloud& cloud,
                                      const std::vector<double>& weights,
                                      std::size_t grid_size = 10000);

} // namespace wopt
