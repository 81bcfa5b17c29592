#include "wopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "wopt/errors.hpp"
#include "wopt/measure.hpp"
#include "wopt/multivariate.hpp"
#include "wopt/oracle.hpp"
#include "wopt/rng.hpp"
#include "wopt/univariate.hpp"
#include "wopt/walk.hpp"

namespace wopt {

// --- targets ----------------------------------------------------------------

TargetDistribution TargetDistribution::uniform_interval(double a, double b) {
  if (!(b > a)) throw domain_error("target: uniform interval needs a < b");
  TargetDistribution t;
  t.kind = Kind::UniformInterval;
  t.a = a;
  t.b = b;
  return t;
}

TargetDistribution TargetDistribution::standard_gaussian() {
  TargetDistribution t;
  t.kind = Kind::StandardGaussian;
  return t;
}

TargetDistribution TargetDistribution::uniform_box(std::size_t dim) {
  if (dim == 0) throw domain_error("target: box dimension must be >= 1");
  TargetDistribution t;
  t.kind = Kind::UniformBox;
  t.dim = dim;
  return t;
}

std::size_t TargetDistribution::dimension() const {
  return kind == Kind::UniformBox ? dim : 1;
}

SampleCloud TargetDistribution::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw domain_error("target: need n >= 1");
  Rng rng(seed);
  const std::size_t d = dimension();
  std::vector<double> flat;
  flat.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case Kind::UniformInterval:
        flat.push_back(rng.uniform(a, b));
        break;
      case Kind::StandardGaussian:
        flat.push_back(rng.gauss());
        break;
      case Kind::UniformBox:
        for (std::size_t c = 0; c < d; ++c) flat.push_back(rng.uniform());
        break;
    }
  }
  return SampleCloud(std::move(flat), d);
}

namespace {

// Acklam's rational approximation to the standard normal quantile
// (relative error below 1.2e-9 over (0,1)).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("quantile: p must lie in (0,1)");
  static const double ac[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double bc[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double dc[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
           ((((dc[0] * q + dc[1]) * q + dc[2]) * q + dc[3]) * q + 1.0);
  }
  if (p > phigh) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
           ((((dc[0] * q + dc[1]) * q + dc[2]) * q + dc[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((ac[0] * r + ac[1]) * r + ac[2]) * r + ac[3]) * r + ac[4]) * r + ac[5]) * q /
         (((((bc[0] * r + bc[1]) * r + bc[2]) * r + bc[3]) * r + bc[4]) * r + 1.0);
}

} // namespace

double TargetDistribution::quantile(double p) const {
  switch (kind) {
    case Kind::UniformInterval:
      if (!(p >= 0.0 && p <= 1.0)) throw domain_error("quantile: p must lie in [0,1]");
      return a + (b - a) * p;
    case Kind::StandardGaussian:
      return normal_quantile(p);
    case Kind::UniformBox:
      throw dimension_error(dim, 1);
  }
  throw domain_error("quantile: unknown target kind");
}

// --- config ----------------------------------------------------------------

std::size_t ExperimentConfig::resolved_oracle_grid() const {
  if (oracle_grid > 0) return oracle_grid;
  return dims == 1 ? 50000 : 2048;
}

std::size_t ExperimentConfig::resolved_reference_samples() const {
  if (reference_samples > 0) return reference_samples;
  return dims == 1 ? 100000 : 20000;
}

void ExperimentConfig::validate() const {
  if (dims != target.dimension())
    throw domain_error("config: dims does not match the target distribution");
  if (n_grid.empty()) throw domain_error("config: empty n grid");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (n_grid[i] >= n_grid[i + 1]) throw domain_error("config: n grid must be ascending");
  if (repetitions < 1) throw domain_error("config: repetitions must be >= 1");
  if (k_rule.type == KRule::Type::MultipleOfLower && !(k_rule.factor >= 1.0))
    throw domain_error("config: K multiple must be >= 1");
  if (k_rule.type == KRule::Type::Absolute && k_rule.values.empty())
    throw domain_error("config: absolute K rule needs values");
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  switch (target.kind) {
    case TargetDistribution::Kind::UniformInterval:
      j["target"] = {{"kind", "uniform-interval"}, {"a", target.a}, {"b", target.b}};
      break;
    case TargetDistribution::Kind::StandardGaussian:
      j["target"] = {{"kind", "standard-gaussian"}};
      break;
    case TargetDistribution::Kind::UniformBox:
      j["target"] = {{"kind", "uniform-box"}, {"dim", target.dim}};
      break;
  }
  j["dims"] = dims;
  j["n_grid"] = n_grid;
  if (k_rule.type == KRule::Type::MultipleOfLower)
    j["k_rule"] = {{"type", "multiple-of-k-lower"}, {"factor", k_rule.factor}};
  else
    j["k_rule"] = {{"type", "absolute"}, {"values", k_rule.values}};
  j["repetitions"] = repetitions;
  j["oracle_grid"] = oracle_grid;
  j["reference_samples"] = reference_samples;
  j["master_seed"] = master_seed;
  j["csv_out"] = csv_out;
  j["svg_out"] = svg_out;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  const auto& t = j.at("target");
  const std::string kind = t.at("kind").get<std::string>();
  if (kind == "uniform-interval")
    c.target = TargetDistribution::uniform_interval(t.value("a", 0.0), t.value("b", 1.0));
  else if (kind == "standard-gaussian")
    c.target = TargetDistribution::standard_gaussian();
  else if (kind == "uniform-box")
    c.target = TargetDistribution::uniform_box(t.at("dim").get<std::size_t>());
  else
    throw domain_error("config: unknown target kind '" + kind + "'");
  c.dims = j.value("dims", c.target.dimension());
  c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  const auto& kr = j.at("k_rule");
  const std::string type = kr.at("type").get<std::string>();
  if (type == "multiple-of-k-lower") {
    c.k_rule.type = KRule::Type::MultipleOfLower;
    c.k_rule.factor = kr.at("factor").get<double>();
  } else if (type == "absolute") {
    c.k_rule.type = KRule::Type::Absolute;
    c.k_rule.values = kr.at("values").get<std::vector<double>>();
  } else {
    throw domain_error("config: unknown K rule '" + type + "'");
  }
  c.repetitions = j.value("repetitions", std::size_t{1});
  c.oracle_grid = j.value("oracle_grid", std::size_t{0});
  c.reference_samples = j.value("reference_samples", std::size_t{0});
  c.master_seed = j.value("master_seed", std::uint64_t{1});
  c.csv_out = j.value("csv_out", std::string{});
  c.svg_out = j.value("svg_out", std::string{});
  c.validate();
  return c;
}

// --- experiment drivers ------------------------------------------------------

namespace {

std::size_t thread_budget(std::size_t cells) {
  std::size_t t = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WOPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) t = static_cast<std::size_t>(v);
  }
  return std::min(t, std::max<std::size_t>(1, cells));
}

template <typename Cell, typename Fn>
void run_cells(const std::vector<Cell>& cells, Fn&& fn, std::size_t threads) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Reference empirical measure of the target, shared across the cells of one
// run (same seed for every cell keeps rows comparable).
DiscreteMeasure reference_measure(const ExperimentConfig& cfg) {
  const SampleCloud ref =
      cfg.target.sample(cfg.resolved_reference_samples(), seed_combine(cfg.master_seed, 0x4ef5ULL));
  return empirical_measure(ref);
}

double w1_vs_reference(const DiscreteMeasure& push, const DiscreteMeasure& ref) {
  if (push.dim == 1) return w1_1d_quantile(push, ref);
  return w1_discrete_exact(push, ref);
}

struct RateCell {
  std::size_t n;
  std::size_t rep;
};

} // namespace

std::vector<ExperimentRow> run_rates(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.k_rule.type != KRule::Type::MultipleOfLower)
    throw domain_error("run_rates: expected a multiple-of-k-lower rule");

  std::vector<RateCell> cells;
  for (std::size_t n : cfg.n_grid)
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) cells.push_back({n, rep});

  const DiscreteMeasure ref = reference_measure(cfg);
  const std::size_t grid = cfg.resolved_oracle_grid();
  std::vector<ExperimentRow> rows(cells.size());

  run_cells(cells, [&](std::size_t idx) {
    const auto [n, rep] = cells[idx];
    const auto start = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.n = n;
    row.seed = seed_combine(cfg.master_seed, n, cfg.k_rule.factor, rep);
    const SampleCloud cloud = cfg.target.sample(n, row.seed);

    if (cfg.dims == 1) {
      row.k_lower = k_lower_bound_1d(cloud);
      row.k = cfg.k_rule.factor * row.k_lower;
      const UnivariateOptimum opt = solve_univariate_1d(cloud, row.k);
      row.w1_emp = opt.w1_value;
      row.w1_target = w1_vs_reference(pushforward_discretize(opt.generator, grid), ref);
    } else {
      const SampleCloud mc = cloud.merged();
      const WalkSolution walk = mc.size() <= kExactWalkLimit
                                    ? exact_covering_walk(mc)
                                    : heuristic_covering_walk(mc, seed_combine(row.seed, 0x3a1cULL));
      row.k_lower = k_lower_bound_walk(mc, walk);
      row.k = cfg.k_rule.factor * row.k_lower;
      const MultivariateOptimum opt = solve_multivariate(mc, walk, row.k);
      row.w1_emp = opt.w1_value;
      row.w1_target = w1_vs_reference(pushforward_discretize(opt.generator, grid), ref);
    }
    row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
                 .count();
    rows[idx] = row;
  }, thread_budget(cells.size()));

  return rows;
}

namespace {

struct HeatCell {
  std::size_t n;
  double k;
  std::size_t rep;
};

// F_n^{-1} on the midpoint grid: q_j = X_(ceil(p n)) at p = (j + 1/2)/M.
std::vector<double> empirical_quantile_grid(const SampleCloud& cloud, std::size_t m) {
  std::vector<double> xs = cloud.flat();
  std::sort(xs.begin(), xs.end());
  std::vector<double> q(m);
  const double n = static_cast<double>(xs.size());
  for (std::size_t j = 0; j < m; ++j) {
    const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    const std::size_t idx =
        std::min(xs.size() - 1, static_cast<std::size_t>(std::ceil(p * n)) - 1);
    q[j] = xs[idx];
  }
  return q;
}

} // namespace

std::vector<ExperimentRow> run_heatmap(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.dims != 1) throw domain_error("run_heatmap: only d = 1 is supported");
  if (cfg.k_rule.type != KRule::Type::Absolute)
    throw domain_error("run_heatmap: expected an absolute K grid");

  std::vector<HeatCell> cells;
  for (std::size_t n : cfg.n_grid)
    for (double k : cfg.k_rule.values)
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) cells.push_back({n, k, rep});

  const DiscreteMeasure ref = reference_measure(cfg);
  const std::size_t grid = cfg.resolved_oracle_grid();
  std::vector<ExperimentRow> rows(cells.size());

  run_cells(cells, [&](std::size_t idx) {
    const auto [n, k, rep] = cells[idx];
    const auto start = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.n = n;
    row.k = k;
    // The cloud seed deliberately ignores K: all K-cells of one (n, rep)
    // share their data, which keeps the closed-form column monotone in K.
    row.seed = seed_combine(cfg.master_seed, n, rep);
    const SampleCloud cloud = cfg.target.sample(n, row.seed);
    row.k_lower = k_lower_bound_1d(cloud);

    DiscreteMeasure push;
    if (k >= row.k_lower) {
      const UnivariateOptimum opt = solve_univariate_1d(cloud, k);
      row.w1_emp = opt.w1_value;
      push = pushforward_discretize(opt.generator, grid);
    } else {
      // Below the feasibility bound the walking construction is undefined;
      // fall back to the best K-Lipschitz fit of the empirical quantiles.
      const std::vector<double> q = empirical_quantile_grid(cloud, grid);
      FixedKFit fit = fixed_k_optimum_1d(q, k);
      row.w1_emp = fit.value;
      push = make_discrete_measure(std::move(fit.fitted), 1,
                                   std::vector<double>(grid, 1.0 / static_cast<double>(grid)));
    }
    row.w1_target = w1_vs_reference(push, ref);
    row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
                 .count();
    rows[idx] = row;
  }, thread_budget(cells.size()));

  return rows;
}

// --- slope fit ---------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double ols_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

SlopeEstimate estimate_slope(std::span<const ExperimentRow> rows, const RowField& x,
                             const RowField& y) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : rows) groups[x(r)].push_back(y(r));
  if (groups.size() < 4)
    throw domain_error("estimate_slope: need at least 4 distinct x values");

  std::vector<double> lx, ly;
  for (const auto& [xv, ys] : groups) {
    if (!(xv > 0.0)) throw domain_error("estimate_slope: x values must be positive");
    const double med = median_of(ys);
    if (!(med > 0.0)) throw domain_error("estimate_slope: y medians must be positive");
    lx.push_back(std::log(xv));
    ly.push_back(std::log(med));
  }

  SlopeEstimate est;
  est.groups = groups.size();
  est.slope = ols_slope(lx, ly);

  const std::size_t kResamples = 1000;
  std::vector<double> slopes;
  slopes.reserve(kResamples);
  Rng rng(0xb007u);
  for (std::size_t b = 0; b < kResamples; ++b) {
    std::vector<double> bly;
    bly.reserve(ly.size());
    bool ok = true;
    for (const auto& [xv, ys] : groups) {
      std::vector<double> pick(ys.size());
      for (auto& p : pick) p = ys[rng.below(ys.size())];
      const double med = median_of(std::move(pick));
      if (!(med > 0.0)) {
        ok = false;
        break;
      }
      bly.push_back(std::log(med));
    }
    if (ok) slopes.push_back(ols_slope(lx, bly));
  }
  std::sort(slopes.begin(), slopes.end());
  est.ci_lo = slopes[static_cast<std::size_t>(0.025 * static_cast<double>(slopes.size()))];
  est.ci_hi = slopes[std::min(slopes.size() - 1,
                              static_cast<std::size_t>(0.975 * static_cast<double>(slopes.size())))];
  return est;
}

// --- output ------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace

std::string rows_to_csv(std::span<const ExperimentRow> rows) {
  std::string out = "n,K,k_lower,w1_emp,w1_target,seed,ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += fmt_double(r.k);
    out += ',';
    out += fmt_double(r.k_lower);
    out += ',';
    out += fmt_double(r.w1_emp);
    out += ',';
    out += fmt_double(r.w1_target);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.ms);
    out += '\n';
  }
  return out;
}

void write_csv(std::span<const ExperimentRow> rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw domain_error("write_csv: cannot open '" + path + "'");
  f << rows_to_csv(rows);
}

void write_svg(std::span<const ExperimentRow> rows, const ExperimentConfig& config,
               const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw domain_error("write_svg: cannot open '" + path + "'");

  // Group medians of w1_target by (K label, n).
  const bool by_k = config.k_rule.type == KRule::Type::Absolute;
  std::map<double, std::map<double, std::vector<double>>> series;
  for (const auto& r : rows)
    series[by_k ? r.k : 0.0][static_cast<double>(r.n)].push_back(r.w1_target);

  const double width = 640, height = 440, ml = 70, mr = 20, mt = 20, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::map<double, std::vector<std::pair<double, double>>> lines;
  for (auto& [kv, per_n] : series)
    for (auto& [n, ys] : per_n) {
      const double m = median_of(ys);
      if (!(m > 0.0)) continue;
      lines[kv].emplace_back(std::log10(n), std::log10(m));
      xmin = std::min(xmin, std::log10(n));
      xmax = std::max(xmax, std::log10(n));
      ymin = std::min(ymin, std::log10(m));
      ymax = std::max(ymax, std::log10(m));
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double ly) { return height - mb - (ly - ymin) / (ymax - ymin) * (height - mt - mb); };

  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
    << height - mb << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
    << "\" stroke=\"black\"/>\n";
  f << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
    << "\" text-anchor=\"middle\" font-size=\"14\">log10 n</text>\n";
  f << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
    << (mt + height - mb) / 2 << ")\">log10 W1 vs target</text>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::size_t ci = 0;
  for (auto& [kv, pts] : lines) {
    std::sort(pts.begin(), pts.end());
    f << "<polyline fill=\"none\" stroke=\"" << colors[ci % 8] << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [lx, ly] : pts) f << px(lx) << ',' << py(ly) << ' ';
    f << "\"/>\n";
    f << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 16 + 16 * static_cast<double>(ci)
      << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 8] << "\">"
      << (by_k ? "K=" + fmt_double(kv)
               : "K=" + fmt_double(config.k_rule.factor) + "*K_lower")
      << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
}

} // namespace wopt
