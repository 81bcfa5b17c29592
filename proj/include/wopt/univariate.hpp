#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wopt/generator.hpp"
#include "wopt/sample_cloud.hpp"

namespace wopt {

// Exact minimizer of W1(G#U, mu_n) over K-Lipschitz maps for univariate data.
// Built on the merged (distinct-point) cloud; the generator walks the sorted
// samples left to right, pausing on a plateau at each one and transiting at
// speed exactly K between neighbours.
struct UnivariateOptimum {
  std::vector<double> sorted_samples; // distinct values, ascending
  double k_lower = 0.0;               // n * max consecutive gap, n = distinct count
  PiecewiseLinearGenerator generator;
  double w1_value = 0.0;              // sum of squared gaps / (4K)
  std::vector<double> atom_masses;    // pushforward atom mass per sorted sample
};

// n * max consecutive gap of the merged sorted samples; 0 when a single
// distinct point remains. Throws dimension_error unless d == 1.
double k_lower_bound_1d(const SampleCloud& cloud);

// Throws constraint_error (naming the bound) when k < k_lower_bound_1d.
UnivariateOptimum solve_univariate_1d(const SampleCloud& cloud, double k);

// Closed-form optimal value without building the generator.
double w1_closed_form_1d(const SampleCloud& cloud, double k);

struct FixedKFit {
  double value = 0.0;          // (1/M) sum |g_j - q_j| at the optimum
  std::vector<double> fitted;  // the minimizing grid function g
};

// Minimizes (1/M) sum_j |g_j - q_j| over grid functions with
// |g_{j+1} - g_j| <= k/M, for a nondecreasing target quantile grid q.
// Exact on the grid (convex piecewise-linear value functions maintained in
// slope representation). Used for the fixed-K regime where the walking
// construction is undefined.
FixedKFit fixed_k_optimum_1d(std::span<const double> quantiles, double k);

} // namespace wopt
