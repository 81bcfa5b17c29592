#pragma once

#include <cstddef>

#include "wopt/generator.hpp"
#include "wopt/measure.hpp"
#include "wopt/sample_cloud.hpp"

namespace wopt {

// Exact W1 between two discrete measures under Euclidean ground cost, solved
// as a transportation problem; optimality is certified by a full reduced-cost
// sweep (must be >= -1e-9, scaled) before the value is returned.
// Throws domain_error when total masses differ by more than 1e-9.
double w1_discrete_exact(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Exact 1-D W1 via merged-quantile integration of |Fa^{-1} - Fb^{-1}|.
// Independent of the flow solver; the two are cross-checked in tests.
double w1_1d_quantile(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct GeneratorW1 {
  double value = 0.0;
  double bias_bound = 0.0; // K/(2M): max displacement of the latent midpoint grid
};

// W1(discretized pushforward of g at grid M, mu_n). Requires M >= n.
GeneratorW1 w1_generator_vs_empirical(const PiecewiseLinearGenerator& g,
                                      const SampleCloud& cloud, std::size_t grid_size);

} // namespace wopt
