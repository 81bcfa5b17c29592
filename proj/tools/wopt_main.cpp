// wopt: exact Lipschitz generators for empirical 1-Wasserstein fitting.
//
// Subcommands:
//   gstar1d  - optimal 1-D generator, closed-form W1, atom masses
//   path     - covering walk minimizing the sum of squared step lengths
//   gstarmd  - walking generator in R^d built from a covering walk
//   w1       - brute-force W1 between a generator's pushforward and the data
//   sdot     - adapted weights for semi-discrete transport via dual ascent
//   rates    - convergence-rate experiment (CSV + optional SVG)
//   heatmap  - (n, K) grid experiment for fixed-K behaviour (CSV + optional SVG)

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wopt/errors.hpp"
#include "wopt/experiments.hpp"
#include "wopt/measure.hpp"
#include "wopt/multivariate.hpp"
#include "wopt/oracle.hpp"
#include "wopt/semidiscrete.hpp"
#include "wopt/univariate.hpp"
#include "wopt/walk.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw wopt::domain_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw wopt::domain_error("cannot write '" + path + "'");
  f << text;
}

// Comma-separated rows, one point per line. With --header the first line is
// skipped.
wopt::SampleCloud read_points_csv(const std::string& path, bool header) {
  std::ifstream f(path);
  if (!f) throw wopt::domain_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (first && header) {
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw wopt::domain_error("no data rows in '" + path + "'");
  return wopt::SampleCloud::from_rows(rows);
}

nlohmann::json walk_to_json(const wopt::WalkSolution& w) {
  return {{"order", w.order}, {"k", w.revisit_count}, {"cost", w.cost}, {"exact", w.exact}};
}

wopt::WalkSolution walk_from_json(const nlohmann::json& j) {
  wopt::WalkSolution w;
  w.order = j.at("order").get<std::vector<int>>();
  w.revisit_count = j.at("k").get<int>();
  w.cost = j.at("cost").get<double>();
  w.exact = j.value("exact", false);
  return w;
}

double resolve_k(const std::string& spec, double k_lower) {
  if (spec == "auto") return k_lower;
  std::size_t pos = 0;
  const double v = std::stod(spec, &pos);
  if (pos != spec.size()) throw wopt::domain_error("bad K value '" + spec + "'");
  return v;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal Lipschitz generators for empirical W1 fitting"};
  app.require_subcommand(1);

  std::string data_path, out_path, gen_path, config_path, k_spec = "auto";
  bool header = false, use_heuristic = false, use_exact = false;
  std::uint64_t seed = 1;
  std::size_t grid = 100000;

  auto* c_g1 = app.add_subcommand("gstar1d", "optimal 1-D generator");
  c_g1->add_option("--data", data_path, "sample CSV (single column)")->required();
  c_g1->add_flag("--header", header, "skip a CSV header line");
  c_g1->add_option("--k", k_spec, "Lipschitz bound, or 'auto' for the feasibility bound");
  c_g1->add_option("--out", out_path, "output JSON path (default: stdout)");

  auto* c_path = app.add_subcommand("path", "covering walk over the sample");
  c_path->add_option("--data", data_path, "sample CSV")->required();
  c_path->add_flag("--header", header, "skip a CSV header line");
  c_path->add_flag("--exact", use_exact, "force the exact solver");
  c_path->add_flag("--heuristic", use_heuristic, "force the heuristic solver");
  c_path->add_option("--seed", seed, "heuristic seed");
  c_path->add_option("--out", out_path, "output JSON path (default: stdout)");

  auto* c_gmd = app.add_subcommand("gstarmd", "walking generator in R^d");
  c_gmd->add_option("--data", data_path, "sample CSV")->required();
  c_gmd->add_flag("--header", header, "skip a CSV header line");
  c_gmd->add_option("--k", k_spec, "Lipschitz bound, or 'auto' for the walk's bound");
  c_gmd->add_option("--seed", seed, "heuristic seed (large instances)");
  c_gmd->add_option("--out", out_path, "output JSON path (default: stdout)");

  auto* c_w1 = app.add_subcommand("w1", "W1 between a generator's pushforward and the data");
  c_w1->add_option("--gen", gen_path, "generator JSON")->required();
  c_w1->add_option("--data", data_path, "sample CSV")->required();
  c_w1->add_flag("--header", header, "skip a CSV header line");
  c_w1->add_option("--grid", grid, "latent discretization size");

  std::string atoms_path, target_spec = "uniform-box", alpha_spec = "uniform";
  std::size_t iters = 4000;
  double smooth_m = 1e6;
  auto* c_sdot = app.add_subcommand("sdot", "adapted semi-discrete transport weights");
  c_sdot->add_option("--atoms", atoms_path, "atom CSV")->required();
  c_sdot->add_flag("--header", header, "skip a CSV header line");
  c_sdot->add_option("--target", target_spec,
                     "uniform-box | uniform-interval:A,B | pushforward:gen.json");
  c_sdot->add_option("--alpha", alpha_spec, "uniform | file:masses.csv");
  c_sdot->add_option("--iters", iters, "ascent iterations");
  c_sdot->add_option("--seed", seed, "sampling seed");
  c_sdot->add_option("--smooth", smooth_m,
                     "plateau smoothing parameter m for pushforward targets");
  c_sdot->add_option("--out", out_path, "output JSON path (default: stdout)");

  auto* c_rates = app.add_subcommand("rates", "convergence-rate experiment");
  c_rates->add_option("--config", config_path, "experiment config JSON")->required();

  auto* c_heat = app.add_subcommand("heatmap", "(n, K) grid experiment");
  c_heat->add_option("--config", config_path, "experiment config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto emit = [&](const nlohmann::json& j) {
      const std::string text = j.dump(2) + "\n";
      if (out_path.empty())
        std::cout << text;
      else
        write_file(out_path, text);
    };

    if (c_g1->parsed()) {
      const auto cloud = read_points_csv(data_path, header);
      const double k_lower = wopt::k_lower_bound_1d(cloud);
      const double k = resolve_k(k_spec, k_lower);
      const auto opt = wopt::solve_univariate_1d(cloud, k);
      nlohmann::json j = nlohmann::json::parse(opt.generator.to_json());
      j["w1"] = opt.w1_value;
      j["k_lower"] = opt.k_lower;
      j["atom_masses"] = opt.atom_masses;
      emit(j);
    } else if (c_path->parsed()) {
      const auto cloud = read_points_csv(data_path, header);
      const std::size_t n = cloud.merged().size();
      wopt::WalkSolution walk;
      if (use_exact && use_heuristic)
        throw wopt::domain_error("choose at most one of --exact / --heuristic");
      if (use_exact || (!use_heuristic && n <= wopt::kExactWalkLimit))
        walk = wopt::exact_covering_walk(cloud);
      else
        walk = wopt::heuristic_covering_walk(cloud, seed);
      emit(walk_to_json(walk));
    } else if (c_gmd->parsed()) {
      const auto cloud = read_points_csv(data_path, header);
      const auto mc = cloud.merged();
      const wopt::WalkSolution walk = mc.size() <= wopt::kExactWalkLimit
                                          ? wopt::exact_covering_walk(mc)
                                          : wopt::heuristic_covering_walk(mc, seed);
      const double k_lower = wopt::k_lower_bound_walk(mc, walk);
      const double k = resolve_k(k_spec, k_lower);
      const auto opt = wopt::solve_multivariate(mc, walk, k);
      nlohmann::json j = nlohmann::json::parse(opt.generator.to_json());
      j["w1"] = opt.w1_value;
      j["k_lower"] = opt.k_lower;
      j["walk"] = walk_to_json(walk);
      emit(j);
    } else if (c_w1->parsed()) {
      const auto cloud = read_points_csv(data_path, header);
      const auto gen = wopt::PiecewiseLinearGenerator::from_json(read_file(gen_path));
      const auto res = wopt::w1_generator_vs_empirical(gen, cloud, grid);
      emit({{"w1", res.value}, {"bias_bound", res.bias_bound}, {"grid", grid}});
    } else if (c_sdot->parsed()) {
      const auto atoms = read_points_csv(atoms_path, header);
      const std::size_t n = atoms.merged().size();
      if (atoms.has_duplicates())
        throw wopt::domain_error("sdot: duplicate atoms in '" + atoms_path + "'");

      wopt::Sampler nu;
      if (target_spec == "uniform-box") {
        nu = wopt::uniform_box_sampler(atoms.dim());
      } else if (target_spec.rfind("uniform-interval:", 0) == 0) {
        const auto rest = target_spec.substr(17);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
          throw wopt::domain_error("expected uniform-interval:A,B");
        nu = wopt::uniform_interval_sampler(std::stod(rest.substr(0, comma)),
                                            std::stod(rest.substr(comma + 1)));
      } else if (target_spec.rfind("pushforward:", 0) == 0) {
        auto gen = wopt::PiecewiseLinearGenerator::from_json(read_file(target_spec.substr(12)));
        if (wopt::has_plateaus(gen)) gen = wopt::perturb_plateaus(gen, smooth_m);
        nu = wopt::pushforward_sampler(gen);
      } else {
        throw wopt::domain_error("unknown --target '" + target_spec + "'");
      }

      std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
      if (alpha_spec.rfind("file:", 0) == 0) {
        const auto mc = read_points_csv(alpha_spec.substr(5), false);
        if (mc.dim() != 1 || mc.size() != n)
          throw wopt::domain_error("--alpha file must have one mass per atom");
        alpha = mc.flat();
      } else if (alpha_spec != "uniform") {
        throw wopt::domain_error("unknown --alpha '" + alpha_spec + "'");
      }

      wopt::DualAscentOptions opt;
      opt.iterations = iters;
      opt.seed = seed;
      const auto vor =
          wopt::adapted_weights(nu, atoms.flat(), atoms.dim(), std::move(alpha), opt);
      const double residual =
          wopt::mass_residual(nu, vor, opt.eval_samples, wopt::seed_combine(seed, 0x0a7ULL));
      emit({{"weights", vor.weights},
            {"alpha", vor.target_masses},
            {"residual", residual},
            {"iterations", iters},
            {"seed", seed}});
    } else if (c_rates->parsed() || c_heat->parsed()) {
      const auto cfg = wopt::ExperimentConfig::from_json(read_file(config_path));
      const auto rows = c_rates->parsed() ? wopt::run_rates(cfg) : wopt::run_heatmap(cfg);
      if (cfg.csv_out.empty())
        std::cout << wopt::rows_to_csv(rows);
      else
        wopt::write_csv(rows, cfg.csv_out);
      if (!cfg.svg_out.empty()) wopt::write_svg(rows, cfg, cfg.svg_out);
      std::cerr << "rows: " << rows.size()
                << " (reference sample: " << cfg.resolved_reference_samples()
                << ", W1-vs-target estimation error decays like its inverse square root)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
