#include "wopt/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "wopt/errors.hpp"

namespace wopt {

namespace {

std::vector<double> merged_sorted_1d(const SampleCloud& cloud) {
  if (cloud.dim() != 1) throw dimension_error(cloud.dim(), 1);
  std::vector<double> xs = cloud.flat();
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

double max_gap(const std::vector<double>& xs) {
  double g = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) g = std::max(g, xs[i + 1] - xs[i]);
  return g;
}

} // namespace

double k_lower_bound_1d(const SampleCloud& cloud) {
  const auto xs = merged_sorted_1d(cloud);
  if (xs.size() < 2) return 0.0;
  return static_cast<double>(xs.size()) * max_gap(xs);
}

double w1_closed_form_1d(const SampleCloud& cloud, double k) {
  const auto xs = merged_sorted_1d(cloud);
  const double k_lower = xs.size() < 2 ? 0.0 : static_cast<double>(xs.size()) * max_gap(xs);
  if (xs.size() >= 2 && k < k_lower) throw constraint_error(k, k_lower);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double g = xs[i + 1] - xs[i];
    s += g * g;
  }
  return s / (4.0 * k);
}

UnivariateOptimum solve_univariate_1d(const SampleCloud& cloud, double k) {
  const auto xs = merged_sorted_1d(cloud);
  const std::size_t n = xs.size();
  const double nn = static_cast<double>(n);
  const double k_lower = n < 2 ? 0.0 : nn * max_gap(xs);
  if (n >= 2 && k < k_lower) throw constraint_error(k, k_lower);
  if (!(k > 0.0)) throw domain_error("solve_univariate_1d: K must be positive");

  // Knots: plateau at x_(i) ends where the transit toward x_(i+1) begins; the
  // transit straddles i/n with half-width gap/(2K). Zero-width plateaus (K at
  // the bound) collapse to a single knot.
  std::vector<double> knots{0.0};
  std::vector<double> values{xs.front()};
  double w1 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double gap = xs[i + 1] - xs[i];
    const double center = static_cast<double>(i + 1) / nn;
    const double half = gap / (2.0 * k);
    const double t0 = center - half, t1 = center + half;
    if (t0 > knots.back() + kLatentTol) {
      knots.push_back(t0);
      values.push_back(xs[i]);
    }
    knots.push_back(t1);
    values.push_back(xs[i + 1]);
    w1 += gap * gap;
  }
  w1 /= 4.0 * k;
  if (knots.back() < 1.0 - kLatentTol) {
    knots.push_back(1.0);
    values.push_back(xs.back());
  } else {
    knots.back() = 1.0;
  }

  UnivariateOptimum out{
      xs, k_lower, PiecewiseLinearGenerator(std::move(knots), std::move(values), 1, k), w1, {}};

  out.atom_masses.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? xs[i] - xs[i - 1] : 0.0;
    const double right = i + 1 < n ? xs[i + 1] - xs[i] : 0.0;
    double mass = 1.0 / nn - (left + right) / (2.0 * k);
    if (mass < 0.0) {
      if (mass < -kLatentTol)
        throw construction_error("solve_univariate_1d: negative atom mass");
      mass = 0.0;
    }
    out.atom_masses[i] = mass;
  }
  return out;
}

// --- fixed-K L1 fit -------------------------------------------------------
//
// Value functions F_j(x) = min cost of the first j entries with g_j = x are
// convex piecewise linear with integer slopes, so they are maintained as two
// breakpoint heaps plus lazy shifts (the window min over [x-h, x+h] shifts
// the left branch left and the right branch right by h). The argmin interval
// of each F_j is recorded for the backward recovery of a minimizer.

FixedKFit fixed_k_optimum_1d(std::span<const double> quantiles, double k) {
  const std::size_t m = quantiles.size();
  if (m < 2) throw domain_error("fixed_k_optimum_1d: need at least two grid values");
  if (!(k >= 0.0)) throw domain_error("fixed_k_optimum_1d: K must be nonnegative");
  for (std::size_t j = 0; j + 1 < m; ++j)
    if (quantiles[j] > quantiles[j + 1])
      throw domain_error("fixed_k_optimum_1d: quantile grid must be nondecreasing");

  const double h = k / static_cast<double>(m);
  std::priority_queue<double> left;                                             // max-heap
  std::priority_queue<double, std::vector<double>, std::greater<double>> right; // min-heap
  double off_left = 0.0, off_right = 0.0;
  double total = 0.0;
  std::vector<double> lo(m), hi(m);

  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0) {
      off_left -= h;
      off_right += h;
    }
    const double q = quantiles[j];
    left.push(q - off_left);
    right.push(q - off_right);
    const double lt = left.top() + off_left;
    const double rt = right.top() + off_right;
    if (lt > rt) {
      total += lt - rt;
      left.pop();
      right.pop();
      left.push(rt - off_left);
      right.push(lt - off_right);
    }
    lo[j] = left.top() + off_left;
    hi[j] = right.top() + off_right;
  }

  FixedKFit out;
  out.value = total / static_cast<double>(m);
  out.fitted.resize(m);
  double g = std::clamp(quantiles[m - 1], lo[m - 1], hi[m - 1]);
  out.fitted[m - 1] = g;
  for (std::size_t j = m - 1; j-- > 0;) {
    g = std::clamp(std::clamp(g, lo[j], hi[j]), g - h, g + h);
    out.fitted[j] = g;
  }
  return out;
}

} // namespace wopt
