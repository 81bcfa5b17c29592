#include "wopt/measure.hpp"

#include <algorithm>
#include <numeric>

#include "wopt/errors.hpp"

namespace wopt {

double DiscreteMeasure::total_mass() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

DiscreteMeasure make_discrete_measure(std::vector<double> flat_atoms, std::size_t dim,
                                      std::vector<double> masses) {
  if (dim == 0) throw domain_error("measure: dimension must be >= 1");
  if (flat_atoms.size() != masses.size() * dim)
    throw domain_error("measure: atoms/masses size mismatch");
  for (double m : masses)
    if (!(m >= 0.0)) throw domain_error("measure: masses must be nonnegative");

  const std::size_t n = masses.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(
        flat_atoms.begin() + a * dim, flat_atoms.begin() + (a + 1) * dim,
        flat_atoms.begin() + b * dim, flat_atoms.begin() + (b + 1) * dim);
  });

  DiscreteMeasure out;
  out.dim = dim;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    double mass = 0.0;
    while (e < n && std::equal(flat_atoms.begin() + idx[s] * dim,
                               flat_atoms.begin() + (idx[s] + 1) * dim,
                               flat_atoms.begin() + idx[e] * dim)) {
      mass += masses[idx[e]];
      ++e;
    }
    out.atoms.insert(out.atoms.end(), flat_atoms.begin() + idx[s] * dim,
                     flat_atoms.begin() + (idx[s] + 1) * dim);
    out.masses.push_back(mass);
    s = e;
  }
  return out;
}

DiscreteMeasure empirical_measure(const SampleCloud& cloud) {
  const double w = 1.0 / static_cast<double>(cloud.size());
  std::vector<double> masses(cloud.size(), w);
  return make_discrete_measure(cloud.flat(), cloud.dim(), std::move(masses));
}

DiscreteMeasure pushforward_discretize(const PiecewiseLinearGenerator& g,
                                       std::size_t grid_size) {
  if (grid_size < 1) throw domain_error("pushforward_discretize: grid size must be >= 1");
  const std::size_t d = g.dim();
  std::vector<double> atoms(grid_size * d);
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
    g.evaluate(u, {atoms.data() + j * d, d});
  }
  std::vector<double> masses(grid_size, 1.0 / static_cast<double>(grid_size));
  return make_discrete_measure(std::move(atoms), d, std::move(masses));
}

} // namespace wopt
