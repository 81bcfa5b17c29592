#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wopt/sample_cloud.hpp"

namespace wopt {

// Seeded, reproducible target distributions for the convergence experiments.
struct TargetDistribution {
  enum class Kind { UniformInterval, StandardGaussian, UniformBox };
  Kind kind = Kind::UniformInterval;
  double a = 0.0, b = 1.0; // uniform-interval bounds
  std::size_t dim = 1;     // uniform-box dimension

  static TargetDistribution uniform_interval(double a, double b);
  static TargetDistribution standard_gaussian();
  static TargetDistribution uniform_box(std::size_t dim);

  std::size_t dimension() const;
  bool bounded_support() const { return kind != Kind::StandardGaussian; }

  // Identical (target, n, seed) always produce identical clouds.
  SampleCloud sample(std::size_t n, std::uint64_t seed) const;

  // F^{-1}(p); 1-D kinds only.
  double quantile(double p) const;
};

struct KRule {
  enum class Type { MultipleOfLower, Absolute };
  Type type = Type::MultipleOfLower;
  double factor = 2.0;        // K = factor * K_lower
  std::vector<double> values; // absolute K grid
};

struct ExperimentConfig {
  TargetDistribution target;
  std::size_t dims = 1;
  std::vector<std::size_t> n_grid; // ascending
  KRule k_rule;
  std::size_t repetitions = 1;
  std::size_t oracle_grid = 0;       // pushforward grid M; 0 = default for dims
  std::size_t reference_samples = 0; // reference sample for W1 vs mu; 0 = default
  std::uint64_t master_seed = 1;
  std::string csv_out;
  std::string svg_out; // empty = no plot

  std::size_t resolved_oracle_grid() const;
  std::size_t resolved_reference_samples() const;
  void validate() const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

struct ExperimentRow {
  std::size_t n = 0;
  double k = 0.0;
  double k_lower = 0.0;
  double w1_emp = 0.0;    // W1 of the optimum against mu_n (closed form / grid fit)
  double w1_target = 0.0; // W1 of the optimum against a reference sample of mu
  std::uint64_t seed = 0;
  std::int64_t ms = 0;
};

// One row per (n, repetition); K follows the rule. d = 1 goes through the
// univariate construction, d > 1 through the covering walk (exact when the
// merged cloud is small, heuristic otherwise). Cells run in parallel,
// capped by the WOPT_THREADS environment variable; per-cell seeds make the
// output independent of the schedule.
std::vector<ExperimentRow> run_rates(const ExperimentConfig& config);

// d = 1 grid over (n, K): K >= K_lower uses the exact construction, smaller K
// the fixed-K quantile-grid fit. k_rule must be absolute.
std::vector<ExperimentRow> run_heatmap(const ExperimentConfig& config);

struct SlopeEstimate {
  double slope = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0; // 95% bootstrap interval
  std::size_t groups = 0;
};

using RowField = std::function<double(const ExperimentRow&)>;

// OLS slope of log(median y) against log x over per-x medians; the CI comes
// from 1000 seeded bootstrap resamples of the repetitions within each x.
SlopeEstimate estimate_slope(std::span<const ExperimentRow> rows, const RowField& x,
                             const RowField& y);

std::string rows_to_csv(std::span<const ExperimentRow> rows);
void write_csv(std::span<const ExperimentRow> rows, const std::string& path);
// Log-log line plot, one polyline per distinct K (absolute rules) or a single
// polyline for multiple-of-bound rules.
void write_svg(std::span<const ExperimentRow> rows, const ExperimentConfig& config,
               const std::string& path);

} // namespace wopt
