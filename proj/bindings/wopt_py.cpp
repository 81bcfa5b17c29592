#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wopt/errors.hpp"
#include "wopt/experiments.hpp"
#include "wopt/measure.hpp"
#include "wopt/multivariate.hpp"
#include "wopt/oracle.hpp"
#include "wopt/semidiscrete.hpp"
#include "wopt/univariate.hpp"
#include "wopt/walk.hpp"

namespace py = pybind11;
using namespace wopt;

namespace {

SampleCloud cloud_from_rows(const std::vector<std::vector<double>>& rows) {
  return SampleCloud::from_rows(rows);
}

} // namespace

PYBIND11_MODULE(woptpy, m) {
  m.doc() = "optimal Lipschitz generators for empirical 1-Wasserstein fitting";

  py::class_<SampleCloud>(m, "SampleCloud")
      .def(py::init(&cloud_from_rows), py::arg("points"))
      .def_property_readonly("n", &SampleCloud::size)
      .def_property_readonly("dim", &SampleCloud::dim)
      .def_property_readonly("duplicate_groups", &SampleCloud::duplicate_groups)
      .def("merged", &SampleCloud::merged)
      .def("point", [](const SampleCloud& c, std::size_t i) {
        const auto p = c.point(i);
        return std::vector<double>(p.begin(), p.end());
      });

  py::class_<PiecewiseLinearGenerator>(m, "Generator")
      .def(py::init<std::vector<double>, std::vector<double>, std::size_t, double>(),
           py::arg("knots"), py::arg("values"), py::arg("dim"), py::arg("lipschitz_bound"))
      .def_property_readonly("dim", &PiecewiseLinearGenerator::dim)
      .def_property_readonly("lipschitz_bound", &PiecewiseLinearGenerator::lipschitz_bound)
      .def_property_readonly("knots", &PiecewiseLinearGenerator::knots)
      .def_property_readonly("values", &PiecewiseLinearGenerator::values)
      .def("__call__",
           [](const PiecewiseLinearGenerator& g, double u) { return g.evaluate(u); })
      .def("to_json", &PiecewiseLinearGenerator::to_json)
      .def_static("from_json", &PiecewiseLinearGenerator::from_json);

  m.def("validate_lipschitz",
        [](const PiecewiseLinearGenerator& g, double k, std::size_t grid) {
          const auto r = validate_lipschitz(g, k, grid);
          return py::make_tuple(r.ok, r.max_ratio);
        },
        py::arg("generator"), py::arg("k"), py::arg("grid_size") = 1024);
  m.def("reflect_generator", &reflect_generator);
  m.def("perturb_plateaus", &perturb_plateaus, py::arg("generator"), py::arg("m"));

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def_readonly("atoms", &DiscreteMeasure::atoms)
      .def_readonly("dim", &DiscreteMeasure::dim)
      .def_readonly("masses", &DiscreteMeasure::masses);
  m.def("empirical_measure", &empirical_measure);
  m.def("pushforward_discretize", &pushforward_discretize, py::arg("generator"),
        py::arg("grid_size"));

  // univariate optimum
  py::class_<UnivariateOptimum>(m, "UnivariateOptimum")
      .def_readonly("sorted_samples", &UnivariateOptimum::sorted_samples)
      .def_readonly("k_lower", &UnivariateOptimum::k_lower)
      .def_readonly("generator", &UnivariateOptimum::generator)
      .def_readonly("w1_value", &UnivariateOptimum::w1_value)
      .def_readonly("atom_masses", &UnivariateOptimum::atom_masses);
  m.def("k_lower_bound_1d", &k_lower_bound_1d);
  m.def("solve_univariate_1d", &solve_univariate_1d, py::arg("cloud"), py::arg("k"));
  m.def("w1_closed_form_1d", &w1_closed_form_1d, py::arg("cloud"), py::arg("k"));
  m.def("fixed_k_optimum_1d",
        [](const std::vector<double>& q, double k) {
          const auto fit = fixed_k_optimum_1d(q, k);
          return py::make_tuple(fit.value, fit.fitted);
        },
        py::arg("quantiles"), py::arg("k"));

  // covering walks
  py::class_<WalkSolution>(m, "WalkSolution")
      .def_readonly("order", &WalkSolution::order)
      .def_readonly("k", &WalkSolution::revisit_count)
      .def_readonly("cost", &WalkSolution::cost)
      .def_readonly("exact", &WalkSolution::exact);
  m.def("exact_covering_walk", &exact_covering_walk, py::arg("cloud"),
        py::arg("limit") = kExactWalkLimit);
  m.def("brute_force_walk", &brute_force_walk, py::arg("cloud"), py::arg("k_max"));
  m.def("heuristic_covering_walk", &heuristic_covering_walk, py::arg("cloud"), py::arg("seed"));
  m.def("k_lower_bound_walk", &k_lower_bound_walk, py::arg("cloud"), py::arg("walk"));

  // multivariate optimum
  py::class_<MultivariateOptimum>(m, "MultivariateOptimum")
      .def_readonly("walk", &MultivariateOptimum::walk)
      .def_readonly("k", &MultivariateOptimum::k)
      .def_readonly("k_lower", &MultivariateOptimum::k_lower)
      .def_readonly("dwell", &MultivariateOptimum::dwell)
      .def_readonly("arrivals", &MultivariateOptimum::arrivals)
      .def_readonly("generator", &MultivariateOptimum::generator)
      .def_readonly("w1_value", &MultivariateOptimum::w1_value)
      .def_readonly("atom_masses", &MultivariateOptimum::atom_masses);
  m.def("dwell_times", &dwell_times, py::arg("cloud"), py::arg("walk"), py::arg("k"));
  m.def("solve_multivariate", &solve_multivariate, py::arg("cloud"), py::arg("walk"),
        py::arg("k"));
  m.def("w1_closed_form_walk", &w1_closed_form_walk, py::arg("walk"), py::arg("k"));
  m.def("voronoi_occupancy", &voronoi_occupancy);
  m.def("visits_cell_centers",
        [](const PiecewiseLinearGenerator& g, const SampleCloud& cloud,
           const std::vector<double>& weights, std::size_t grid) {
          const auto r = visits_cell_centers(g, cloud, weights, grid);
          return py::make_tuple(r.ok, r.cell, r.u_lo, r.u_hi);
        },
        py::arg("generator"), py::arg("cloud"), py::arg("weights") = std::vector<double>{},
        py::arg("grid_size") = 10000);

  // semi-discrete transport
  py::class_<WeightedVoronoi>(m, "WeightedVoronoi")
      .def_readonly("atoms", &WeightedVoronoi::atoms)
      .def_readonly("dim", &WeightedVoronoi::dim)
      .def_readonly("weights", &WeightedVoronoi::weights)
      .def_readonly("target_masses", &WeightedVoronoi::target_masses);
  m.def("make_weighted_voronoi", &make_weighted_voronoi, py::arg("atoms"), py::arg("dim"),
        py::arg("weights"), py::arg("target_masses") = std::vector<double>{});
  m.def("cell_of_point",
        [](const std::vector<double>& x, const WeightedVoronoi& vor, double tol) {
          return cell_of_point(x, vor, tol).cells;
        },
        py::arg("x"), py::arg("voronoi"), py::arg("tol") = kGeomTol);
  m.def("transport_map_apply",
        [](const std::vector<double>& x, const WeightedVoronoi& vor) {
          return transport_map_apply(x, vor);
        },
        py::arg("x"), py::arg("voronoi"));
  m.def("adapted_weights_uniform_box",
        [](std::vector<double> atoms, std::size_t dim, std::vector<double> alpha,
           std::size_t iterations, std::uint64_t seed) {
          DualAscentOptions opt;
          opt.iterations = iterations;
          opt.seed = seed;
          return adapted_weights(uniform_box_sampler(dim), std::move(atoms), dim,
                                 std::move(alpha), opt);
        },
        py::arg("atoms"), py::arg("dim"), py::arg("alpha"), py::arg("iterations") = 4000,
        py::arg("seed") = 1);
  m.def("adapted_weights_uniform_interval",
        [](double a, double b, std::vector<double> atoms, std::vector<double> alpha,
           std::size_t iterations, std::uint64_t seed) {
          DualAscentOptions opt;
          opt.iterations = iterations;
          opt.seed = seed;
          return adapted_weights(uniform_interval_sampler(a, b), std::move(atoms), 1,
                                 std::move(alpha), opt);
        },
        py::arg("a"), py::arg("b"), py::arg("atoms"), py::arg("alpha"),
        py::arg("iterations") = 4000, py::arg("seed") = 1);

  // oracle
  m.def("w1_discrete_exact", &w1_discrete_exact);
  m.def("w1_1d_quantile", &w1_1d_quantile);
  m.def("w1_generator_vs_empirical",
        [](const PiecewiseLinearGenerator& g, const SampleCloud& cloud, std::size_t grid) {
          const auto r = w1_generator_vs_empirical(g, cloud, grid);
          return py::make_tuple(r.value, r.bias_bound);
        },
        py::arg("generator"), py::arg("cloud"), py::arg("grid_size"));

  // experiments
  m.def("sample_target",
        [](const std::string& kind, std::size_t n, std::uint64_t seed, double a, double b,
           std::size_t dim) {
          TargetDistribution t;
          if (kind == "uniform-interval")
            t = TargetDistribution::uniform_interval(a, b);
          else if (kind == "standard-gaussian")
            t = TargetDistribution::standard_gaussian();
          else if (kind == "uniform-box")
            t = TargetDistribution::uniform_box(dim);
          else
            throw domain_error("unknown target kind '" + kind + "'");
          return t.sample(n, seed);
        },
        py::arg("kind"), py::arg("n"), py::arg("seed"), py::arg("a") = 0.0, py::arg("b") = 1.0,
        py::arg("dim") = 1);

  py::register_exception<constraint_error>(m, "ConstraintError");
  py::register_exception<convergence_error>(m, "ConvergenceError");
  py::register_exception<size_error>(m, "SizeError");
}
