#include "wopt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "wopt/errors.hpp"

namespace wopt {

PiecewiseLinearGenerator::PiecewiseLinearGenerator(std::vector<double> knots,
                                                   std::vector<double> values,
                                                   std::size_t dim, double lipschitz_bound)
    : knots_(std::move(knots)), values_(std::move(values)), dim_(dim), k_(lipschitz_bound) {
  if (dim_ == 0) throw domain_error("generator: dimension must be >= 1");
  if (knots_.size() < 2) throw domain_error("generator: need at least two knots");
  if (values_.size() != knots_.size() * dim_)
    throw domain_error("generator: values/knots size mismatch");
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    throw domain_error("generator: latent knots must start at 0 and end at 1");
  for (std::size_t j = 1; j < knots_.size(); ++j)
    if (!(knots_[j] > knots_[j - 1]))
      throw domain_error("generator: latent knots must be strictly increasing");
  if (!(k_ > 0.0)) throw domain_error("generator: Lipschitz bound must be positive");
}

void PiecewiseLinearGenerator::evaluate(double u, std::span<double> out) const {
  if (!(u >= 0.0 && u <= 1.0)) throw domain_error("evaluate: latent input outside [0,1]");
  // upper_bound finds the first knot strictly greater than u, so u == knots[j]
  // lands on segment start j and reproduces the stored row exactly.
  std::size_t seg;
  if (u >= 1.0) {
    std::copy_n(values_.data() + (knots_.size() - 1) * dim_, dim_, out.begin());
    return;
  }
  seg = static_cast<std::size_t>(
            std::upper_bound(knots_.begin(), knots_.end(), u) - knots_.begin()) -
        1;
  const double u0 = knots_[seg];
  if (u == u0) {
    std::copy_n(values_.data() + seg * dim_, dim_, out.begin());
    return;
  }
  const double t = (u - u0) / (knots_[seg + 1] - u0);
  const double* a = values_.data() + seg * dim_;
  const double* b = a + dim_;
  for (std::size_t c = 0; c < dim_; ++c) out[c] = a[c] + t * (b[c] - a[c]);
}

std::vector<double> PiecewiseLinearGenerator::evaluate(double u) const {
  std::vector<double> out(dim_);
  evaluate(u, out);
  return out;
}

double PiecewiseLinearGenerator::evaluate_scalar(double u) const {
  double out;
  evaluate(u, {&out, 1});
  return out;
}

double PiecewiseLinearGenerator::latent_measure_in_interval(double lo, double hi) const {
  if (dim_ != 1) throw dimension_error(dim_, 1);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
    const double u0 = knots_[j], u1 = knots_[j + 1];
    const double v0 = values_[j], v1 = values_[j + 1];
    if (v0 == v1) {
      if (v0 >= lo && v0 <= hi) total += u1 - u0;
      continue;
    }
    const double vmin = std::min(v0, v1), vmax = std::max(v0, v1);
    const double a = std::max(lo, vmin), b = std::min(hi, vmax);
    if (b > a) total += (b - a) / (vmax - vmin) * (u1 - u0);
  }
  return total;
}

std::string PiecewiseLinearGenerator::to_json() const {
  nlohmann::json j;
  j["k"] = k_;
  nlohmann::json bp = nlohmann::json::array();
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    nlohmann::json e;
    e["u"] = knots_[i];
    e["p"] = std::vector<double>(values_.begin() + i * dim_, values_.begin() + (i + 1) * dim_);
    bp.push_back(std::move(e));
  }
  j["breakpoints"] = std::move(bp);
  return j.dump();
}

PiecewiseLinearGenerator PiecewiseLinearGenerator::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const double k = j.at("k").get<double>();
  const auto& bp = j.at("breakpoints");
  if (!bp.is_array() || bp.empty()) throw domain_error("generator json: missing breakpoints");
  const std::size_t dim = bp.front().at("p").size();
  std::vector<double> knots, values;
  knots.reserve(bp.size());
  values.reserve(bp.size() * dim);
  for (const auto& e : bp) {
    knots.push_back(e.at("u").get<double>());
    const auto p = e.at("p").get<std::vector<double>>();
    if (p.size() != dim) throw domain_error("generator json: ragged breakpoint");
    values.insert(values.end(), p.begin(), p.end());
  }
  return PiecewiseLinearGenerator(std::move(knots), std::move(values), dim, k);
}

LipschitzCheck validate_lipschitz(const PiecewiseLinearGenerator& g, double k,
                                  std::size_t grid_size) {
  if (grid_size < 2) throw domain_error("validate_lipschitz: grid size must be >= 2");
  LipschitzCheck r;
  auto ratio = [&](double u, double v, PointRef pu, PointRef pv) {
    const double du = std::fabs(u - v);
    if (du == 0.0) return 0.0;
    return distance(pu, pv) / (k * du);
  };

  std::vector<double> prev(g.dim()), cur(g.dim());
  g.evaluate(0.0, prev);
  double uprev = 0.0;
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(grid_size - 1);
    g.evaluate(u, cur);
    r.max_ratio = std::max(r.max_ratio, ratio(uprev, u, prev, cur));
    std::swap(prev, cur);
    uprev = u;
  }

  const std::size_t m = g.knot_count();
  for (std::size_t j = 0; j + 1 < m; ++j)
    r.max_ratio = std::max(
        r.max_ratio, ratio(g.knots()[j], g.knots()[j + 1], g.value_at(j), g.value_at(j + 1)));
  if (m <= 512) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        r.max_ratio =
            std::max(r.max_ratio, ratio(g.knots()[a], g.knots()[b], g.value_at(a), g.value_at(b)));
  }

  r.ok = r.max_ratio <= 1.0 + 1e-9;
  return r;
}

PiecewiseLinearGenerator reflect_generator(const PiecewiseLinearGenerator& g) {
  const std::size_t m = g.knot_count();
  const std::size_t d = g.dim();
  std::vector<double> knots(m), values(m * d);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = m - 1 - j;
    double u = 1.0 - g.knots()[src];
    if (std::fabs(u) < kLatentTol) u = 0.0;
    if (std::fabs(u - 1.0) < kLatentTol) u = 1.0;
    knots[j] = u;
    std::copy_n(g.values().data() + src * d, d, values.data() + j * d);
  }
  return PiecewiseLinearGenerator(std::move(knots), std::move(values), d, g.lipschitz_bound());
}

bool has_plateaus(const PiecewiseLinearGenerator& g) {
  const std::size_t d = g.dim();
  for (std::size_t j = 0; j + 1 < g.knot_count(); ++j)
    if (std::equal(g.values().begin() + j * d, g.values().begin() + (j + 1) * d,
                   g.values().begin() + (j + 1) * d))
      return true;
  return false;
}

PiecewiseLinearGenerator perturb_plateaus(const PiecewiseLinearGenerator& g, double m) {
  if (!(m > 0.0)) throw domain_error("perturb_plateaus: amplitude parameter must be positive");
  const std::size_t d = g.dim();
  const double k_m = std::min(g.lipschitz_bound(), 1.0 / m);
  std::vector<double> knots, values;
  auto push = [&](double u, PointRef p, std::size_t coord_bump, double bump) {
    knots.push_back(u);
    for (std::size_t c = 0; c < d; ++c) values.push_back(p[c] + (c == coord_bump ? bump : 0.0));
  };
  for (std::size_t j = 0; j < g.knot_count(); ++j) {
    const bool plateau_ahead =
        j + 1 < g.knot_count() &&
        std::equal(g.values().begin() + j * d, g.values().begin() + (j + 1) * d,
                   g.values().begin() + (j + 1) * d);
    push(g.knots()[j], g.value_at(j), 0, 0.0);
    if (plateau_ahead) {
      // Tent apex at the plateau midpoint, slope k_m in the first coordinate.
      const double a = g.knots()[j], b = g.knots()[j + 1];
      push(0.5 * (a + b), g.value_at(j), 0, k_m * 0.5 * (b - a));
    }
  }
  return PiecewiseLinearGenerator(std::move(knots), std::move(values), d, g.lipschitz_bound());
}

} // namespace wopt
