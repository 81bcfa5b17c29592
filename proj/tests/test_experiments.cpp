#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wopt/errors.hpp"
#include "wopt/experiments.hpp"
#include "wopt/measure.hpp"
#include "wopt/oracle.hpp"

using namespace wopt;

namespace {

#ifndef WOPT_TEST_DATA_DIR
#define WOPT_TEST_DATA_DIR "tests/data"
#endif

std::string data_path(const std::string& name) {
  return std::string(WOPT_TEST_DATA_DIR) + "/" + name;
}

bool regen_golden() { return std::getenv("WOPT_REGEN_GOLDEN") != nullptr; }

std::string read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(f), "missing golden file ", path,
                  " (set WOPT_REGEN_GOLDEN=1 to create)");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(static_cast<bool>(f));
  f << text;
}

// The ms column records wall time and is the one nondeterministic field.
std::string mask_ms(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out += line.substr(0, pos + 1);
    out += "MS\n";
  }
  return out;
}

ExperimentConfig mini_rates_config() {
  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform_interval(0.0, 1.0);
  cfg.dims = 1;
  cfg.n_grid = {8, 16, 32, 64};
  cfg.k_rule.type = KRule::Type::MultipleOfLower;
  cfg.k_rule.factor = 2.0;
  cfg.repetitions = 2;
  cfg.oracle_grid = 2000;
  cfg.reference_samples = 4000;
  cfg.master_seed = 42;
  return cfg;
}

} // namespace

TEST_CASE("seeded sampling is reproducible") {
  const auto t = TargetDistribution::uniform_interval(0.0, 1.0);
  const auto a = t.sample(5, 123);
  const auto b = t.sample(5, 123);
  CHECK(a.flat() == b.flat());
  CHECK(t.sample(5, 124).flat() != a.flat());

  const auto g = TargetDistribution::standard_gaussian().sample(1, 9);
  CHECK(std::isfinite(g.flat()[0]));

  const auto box = TargetDistribution::uniform_box(2).sample(4, 17);
  CHECK(box.dim() == 2);
  CHECK(box.size() == 4);
  for (double v : box.flat()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("golden sample triple") {
  const auto c = TargetDistribution::uniform_interval(0.0, 1.0).sample(3, 7);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g\n%.17g\n%.17g\n", c.flat()[0], c.flat()[1],
                c.flat()[2]);
  const std::string path = data_path("golden_uniform_n3_seed7.txt");
  if (regen_golden()) write_all(path, buf);
  CHECK(read_all(path) == buf);
}

TEST_CASE("target quantiles") {
  const auto u = TargetDistribution::uniform_interval(2.0, 4.0);
  CHECK(u.quantile(0.25) == doctest::Approx(2.5));
  const auto g = TargetDistribution::standard_gaussian();
  CHECK(g.quantile(0.5) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(g.quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(g.quantile(0.16) < 0.0);
  CHECK_THROWS_AS(TargetDistribution::uniform_box(2).quantile(0.5), dimension_error);
}

TEST_CASE("slope estimation on synthetic data") {
  std::vector<ExperimentRow> rows;
  for (std::size_t n : {16u, 32u, 64u, 128u, 256u}) {
    ExperimentRow r;
    r.n = n;
    r.w1_target = 1.0 / std::sqrt(static_cast<double>(n));
    r.w1_emp = 3.0; // constant
    rows.push_back(r);
  }
  const auto x = [](const ExperimentRow& r) { return static_cast<double>(r.n); };
  const auto slope =
      estimate_slope(rows, x, [](const ExperimentRow& r) { return r.w1_target; });
  CHECK(slope.slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(slope.ci_lo <= slope.slope);
  CHECK(slope.ci_hi >= slope.slope);

  const auto flat = estimate_slope(rows, x, [](const ExperimentRow& r) { return r.w1_emp; });
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));

  rows.resize(3);
  CHECK_THROWS_AS(
      static_cast<void>(estimate_slope(rows, x, [](const ExperimentRow& r) { return r.w1_emp; })),
      domain_error);
}

TEST_CASE("csv formatting") {
  CHECK(rows_to_csv({}) == "n,K,k_lower,w1_emp,w1_target,seed,ms\n");

  ExperimentRow r;
  r.n = 5;
  r.k = 2.5;
  r.k_lower = 1.25;
  r.w1_emp = 0.125;
  r.w1_target = 0.25;
  r.seed = 99;
  r.ms = 3;
  const std::string csv = rows_to_csv(std::vector<ExperimentRow>{r});
  CHECK(csv == "n,K,k_lower,w1_emp,w1_target,seed,ms\n5,2.5,1.25,0.125,0.25,99,3\n");
}

TEST_CASE("config json round trip and validation") {
  auto cfg = mini_rates_config();
  cfg.csv_out = "out.csv";
  const auto back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.n_grid == cfg.n_grid);
  CHECK(back.k_rule.factor == cfg.k_rule.factor);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.csv_out == cfg.csv_out);
  CHECK(back.target.kind == cfg.target.kind);

  auto bad = cfg;
  bad.n_grid = {32, 16};
  CHECK_THROWS_AS(bad.validate(), domain_error);
  bad = cfg;
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), domain_error);
  bad = cfg;
  bad.dims = 2;
  CHECK_THROWS_AS(bad.validate(), domain_error);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"target\":{\"kind\":\"cauchy\"}}"),
                  domain_error);
}

TEST_CASE("rates mini-run: golden file and schedule independence") {
  const auto cfg = mini_rates_config();
  const auto rows = run_rates(cfg);
  CHECK(rows.size() == cfg.n_grid.size() * cfg.repetitions);
  const std::string masked = mask_ms(rows_to_csv(rows));

  const std::string path = data_path("golden_mini_rates.csv");
  if (regen_golden()) write_all(path, masked);
  CHECK(read_all(path) == masked);

  // Same rows regardless of the thread schedule.
  setenv("WOPT_THREADS", "3", 1);
  const auto rows3 = run_rates(cfg);
  unsetenv("WOPT_THREADS");
  CHECK(mask_ms(rows_to_csv(rows3)) == masked);
}

TEST_CASE("rates rows satisfy the triangle bound against mu_n") {
  const auto cfg = mini_rates_config();
  const auto rows = run_rates(cfg);
  const auto ref = empirical_measure(
      cfg.target.sample(cfg.resolved_reference_samples(), seed_combine(cfg.master_seed, 0x4ef5ULL)));
  for (const auto& r : rows) {
    const auto cloud = cfg.target.sample(r.n, r.seed);
    const double base = w1_1d_quantile(empirical_measure(cloud), ref);
    const double slack = r.k / (2.0 * static_cast<double>(cfg.resolved_oracle_grid())) + 1e-9;
    CHECK(std::fabs(r.w1_target - base) <= r.w1_emp + slack);
    CHECK(r.w1_emp >= 0.0);
    CHECK(r.k >= r.k_lower);
  }
}

TEST_CASE("heatmap: shared data across K and monotone closed form") {
  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform_interval(0.0, 1.0);
  cfg.dims = 1;
  cfg.n_grid = {64, 128};
  cfg.k_rule.type = KRule::Type::Absolute;
  cfg.k_rule.values = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  cfg.repetitions = 2;
  cfg.oracle_grid = 2000;
  cfg.reference_samples = 4000;
  cfg.master_seed = 7;
  const auto rows = run_heatmap(cfg);
  CHECK(rows.size() == 2 * 6 * 2);

  // Rows of one (n, rep) cell share the cloud, so k_lower matches and the
  // optimal value cannot increase with K.
  for (std::size_t n_idx = 0; n_idx < 2; ++n_idx)
    for (std::size_t rep = 0; rep < 2; ++rep) {
      double prev = 1e300, prev_klower = -1.0;
      for (std::size_t k_idx = 0; k_idx < 6; ++k_idx) {
        const auto& r = rows[n_idx * 6 * 2 + k_idx * 2 + rep];
        if (prev_klower >= 0.0) CHECK(r.k_lower == prev_klower);
        prev_klower = r.k_lower;
        CHECK(r.w1_emp <= prev * 1.02 + 2e-3);
        prev = r.w1_emp;
      }
    }
}

TEST_CASE("svg output is written") {
  const auto cfg = mini_rates_config();
  const auto rows = run_rates(cfg);
  const std::string path = "mini_rates_test.svg";
  write_svg(rows, cfg, path);
  const std::string svg = read_all(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  std::remove(path.c_str());
}
