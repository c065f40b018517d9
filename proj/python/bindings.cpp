#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "nmm/cli.hpp"
#include "nmm/core.hpp"
#include "nmm/experiments.hpp"
#include "nmm/problems.hpp"
#include "nmm/solvers.hpp"
#include "nmm/subproblem.hpp"

namespace py = pybind11;
using namespace nmm;

namespace {

JointPoint point_for(const Problem& p, const Vec& z) {
  p.check_point(z);
  return JointPoint(p.dim_x(), p.dim_y(), z);
}

py::dict result_to_dict(const SolverResult& r) {
  py::list k, lambda, step, grad, gap, hat, samples, sub;
  for (const IterateTrace& row : r.trace) {
    k.append(row.k);
    lambda.append(row.lambda);
    step.append(row.step_norm);
    grad.append(row.grad_norm);
    gap.append(row.gap ? py::cast(*row.gap) : py::none());
    hat.append(row.hat_dist);
    samples.append(row.samples);
    sub.append(row.subproblem_iters);
  }
  py::dict trace;
  trace["iter"] = k;
  trace["lambda"] = lambda;
  trace["step_norm"] = step;
  trace["grad_norm"] = grad;
  trace["gap"] = gap;
  trace["hat_dist"] = hat;
  trace["samples"] = samples;
  trace["subproblem_iters"] = sub;

  py::dict out;
  out["averaged"] = r.averaged.coords();
  out["last"] = r.last.coords();
  out["status"] = to_string(r.status);
  out["message"] = r.message;
  out["theory_hypotheses_hold"] = r.theory_hypotheses_hold;
  out["trace"] = trace;
  return out;
}

SolverConfig newton_config(const Problem& p, double rho, int iterations, double kappa_m, std::uint64_t seed,
                           const std::optional<Vec>& reference) {
  SolverConfig cfg;
  cfg.rho = rho;
  cfg.iterations = iterations;
  cfg.kappa_m = kappa_m;
  cfg.seed = seed;
  if (reference) cfg.reference = point_for(p, *reference);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Second-order extragradient solvers for convex-concave saddle problems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def_property_readonly("dim_x", &Problem::dim_x)
      .def_property_readonly("dim_y", &Problem::dim_y)
      .def_property_readonly("name", &Problem::name)
      .def("value", [](const Problem& p, const Vec& z) { p.check_point(z); return p.value(z); })
      .def("gradient", [](const Problem& p, const Vec& z) { p.check_point(z); return p.gradient(z); })
      .def("hessian", [](const Problem& p, const Vec& z) { p.check_point(z); return p.hessian(z); })
      .def("operator", [](const Problem& p, const Vec& z) { return operator_value(p, z); },
           "Saddle operator (grad_x f, -grad_y f).");

  py::class_<FiniteSumProblem, Problem, std::shared_ptr<FiniteSumProblem>>(m, "FiniteSumProblem")
      .def_property_readonly("num_components", &FiniteSumProblem::num_components);

  py::class_<CubicBilinear, Problem, std::shared_ptr<CubicBilinear>>(m, "CubicBilinear")
      .def_property_readonly("rho", &CubicBilinear::rho)
      .def_property_readonly("b", &CubicBilinear::b)
      .def("saddle", [](const CubicBilinear& p) { return cubic_bilinear_saddle(p).coords(); });

  py::class_<QuadraticSaddle, Problem, std::shared_ptr<QuadraticSaddle>>(m, "QuadraticSaddle")
      .def(py::init<Mat, Mat, Mat, Vec, Vec>(), py::arg("p"), py::arg("q"), py::arg("r"), py::arg("c"),
           py::arg("d"))
      .def("saddle", [](const QuadraticSaddle& p) { return p.saddle().coords(); });

  py::class_<GlmQuadraticSum, FiniteSumProblem, std::shared_ptr<GlmQuadraticSum>>(m, "GlmQuadraticSum")
      .def("saddle", [](const GlmQuadraticSum& p) { return p.saddle().coords(); });

  m.def("cubic_bilinear", [](Eigen::Index n, double rho, std::uint64_t seed) {
    return std::make_shared<CubicBilinear>(make_cubic_bilinear(n, rho, seed));
  }, py::arg("n"), py::arg("rho"), py::arg("seed") = 0);
  m.def("random_quadratic", [](Eigen::Index mx, Eigen::Index ny, std::uint64_t seed) {
    return std::make_shared<QuadraticSaddle>(make_random_cc_quadratic(mx, ny, seed));
  }, py::arg("m"), py::arg("n"), py::arg("seed") = 0);
  m.def("glm_quadratic_sum", [](std::size_t count, Eigen::Index mx, Eigen::Index ny, std::uint64_t seed) {
    return std::make_shared<GlmQuadraticSum>(make_glm_quadratic_sum(count, mx, ny, seed));
  }, py::arg("count"), py::arg("m"), py::arg("n"), py::arg("seed") = 0);

  m.def("newton_minmax",
        [](const Problem& p, const Vec& z0, double rho, int iterations, std::optional<Vec> reference) {
          return result_to_dict(newton_minmax(p, point_for(p, z0), newton_config(p, rho, iterations, 0.1, 0, reference)));
        },
        py::arg("problem"), py::arg("z0"), py::arg("rho"), py::arg("iterations") = 100,
        py::arg("reference") = py::none());
  m.def("inexact_newton_minmax",
        [](const Problem& p, const Vec& z0, double rho, int iterations, double kappa_m,
           std::optional<Vec> reference) {
          return result_to_dict(
              inexact_newton_minmax(p, point_for(p, z0), newton_config(p, rho, iterations, kappa_m, 0, reference)));
        },
        py::arg("problem"), py::arg("z0"), py::arg("rho"), py::arg("iterations") = 100, py::arg("kappa_m") = 0.1,
        py::arg("reference") = py::none());
  m.def("subsampled_newton_minmax",
        [](const FiniteSumProblem& p, const Vec& z0, double rho, int iterations, const std::string& sampling,
           double kappa_m, std::uint64_t seed, std::optional<Vec> reference) {
          SubsampleConfig sc;
          sc.rule = parse_sample_rule(sampling);
          return result_to_dict(subsampled_newton_minmax(
              p, point_for(p, z0), newton_config(p, rho, iterations, kappa_m, seed, reference), sc));
        },
        py::arg("problem"), py::arg("z0"), py::arg("rho"), py::arg("iterations") = 100,
        py::arg("sampling") = "empirical", py::arg("kappa_m") = 0.1, py::arg("seed") = 0,
        py::arg("reference") = py::none());
  m.def("eg_solve",
        [](const Problem& p, const Vec& z0, double ell, int iterations) {
          return result_to_dict(eg_solve(p, point_for(p, z0), ell, iterations));
        },
        py::arg("problem"), py::arg("z0"), py::arg("ell"), py::arg("iterations") = 100);

  m.def("restricted_gap",
        [](const Problem& p, const Vec& candidate, const Vec& center, double beta) {
          GapConfig cfg;
          cfg.beta = beta;
          return restricted_gap(p, point_for(p, candidate), point_for(p, center), cfg).value;
        },
        py::arg("problem"), py::arg("candidate"), py::arg("center"), py::arg("beta"));
  m.def("select_lambda",
        [](double step_norm, double rho, bool inexact) {
          return select_lambda(step_norm, rho, inexact ? LambdaWindow::inexact() : LambdaWindow::exact());
        },
        py::arg("step_norm"), py::arg("rho"), py::arg("inexact") = false);
  m.def("soc_project", &soc_project, py::arg("w"), py::arg("m"), py::arg("n"),
        "Projection onto {(dx, u, dy, v) : ||dx|| <= u, ||dy|| <= v}.");

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli_main(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in process; returns (exit code, stdout, stderr).");
}
