#pragma once

#include <cstddef>
#include <vector>

#include "wopt/generator.hpp"
#include "wopt/geometry.hpp"
#include "wopt/sample_cloud.hpp"

namespace wopt {

// A finitely supported probability measure. Atoms are pairwise distinct
// (exact coordinate equality is merged with summed mass) and masses sum to 1.
struct DiscreteMeasure {
  std::vector<double> atoms; // flat row-major
  std::size_t dim = 1;
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
  PointRef atom(std::size_t i) const { return {atoms.data() + i * dim, dim}; }
  double total_mass() const;
};

// Merges exactly-equal atoms, summing masses. Output atoms are sorted
// lexicographically.
DiscreteMeasure make_discrete_measure(std::vector<double> flat_atoms, std::size_t dim,
                                      std::vector<double> masses);

// mu_n: mass multiplicity/n on each distinct sample point.
DiscreteMeasure empirical_measure(const SampleCloud& cloud);

// Atoms G((j-1/2)/M), j=1..M, each of mass 1/M, duplicates merged. The
// midpoint grid keeps grid points off plateau boundaries.
DiscreteMeasure pushforward_discretize(const PiecewiseLinearGenerator& g, std::size_t grid_size);

} // namespace wopt
