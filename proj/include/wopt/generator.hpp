#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wopt/geometry.hpp"

namespace wopt {

// Latent coordinates compare equal below this absolute tolerance.
inline constexpr double kLatentTol = 1e-12;
// Geometric membership tests (Voronoi cells, segment checks) use this one.
inline constexpr double kGeomTol = 1e-9;

// A K-Lipschitz piecewise-linear map [0,1] -> R^d, stored as strictly
// increasing latent knots with attached points. Plateaus are two consecutive
// knots with equal values, so evaluation is a single interpolation rule.
class PiecewiseLinearGenerator {
public:
  // knots must be strictly increasing with knots.front()==0, knots.back()==1;
  // values is flat row-major, one row of length dim per knot.
  PiecewiseLinearGenerator(std::vector<double> knots, std::vector<double> values,
                           std::size_t dim, double lipschitz_bound);

  std::size_t dim() const { return dim_; }
  double lipschitz_bound() const { return k_; }
  std::size_t knot_count() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  PointRef value_at(std::size_t j) const { return {values_.data() + j * dim_, dim_}; }

  // Linear interpolation; exact (bit-for-bit) at the stored knots.
  // Throws domain_error for u outside [0,1].
  void evaluate(double u, std::span<double> out) const;
  std::vector<double> evaluate(double u) const;
  double evaluate_scalar(double u) const; // convenience for dim()==1

  // Lebesgue measure of {u : lo <= G(u) <= hi}, computed segment by segment.
  // Only meaningful for dim()==1.
  double latent_measure_in_interval(double lo, double hi) const;

  std::string to_json() const;
  static PiecewiseLinearGenerator from_json(const std::string& text);

private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::size_t dim_;
  double k_;
};

struct LipschitzCheck {
  bool ok = false;
  double max_ratio = 0.0; // worst observed ||G(u)-G(v)|| / (K |u-v|)
};

// Checks the K-Lipschitz property on all consecutive pairs of a uniform grid
// of M points and on consecutive knot pairs (all knot pairs when there are
// few of them). grid_size must be >= 2.
LipschitzCheck validate_lipschitz(const PiecewiseLinearGenerator& g, double k,
                                  std::size_t grid_size);

// u -> G(1-u); same pushforward distribution.
PiecewiseLinearGenerator reflect_generator(const PiecewiseLinearGenerator& g);

// Replaces every plateau by a small tent of amplitude min(K, 1/m) * width/2 in
// the first coordinate, making the pushforward nonatomic while staying
// K-Lipschitz. Used to feed plateau generators into semi-discrete transport.
PiecewiseLinearGenerator perturb_plateaus(const PiecewiseLinearGenerator& g, double m);

bool has_plateaus(const PiecewiseLinearGenerator& g);

} // namespace wopt
