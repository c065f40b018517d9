// Acceptance suite. Prints one PASS/FAIL line per criterion; with
// --criterion k only that criterion runs and the exit code reflects it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"

#include "nmm/cli.hpp"
#include "nmm/experiments.hpp"
#include "nmm/problems.hpp"
#include "nmm/sampling.hpp"
#include "nmm/solvers.hpp"
#include "nmm/subproblem.hpp"

using namespace nmm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double exact_bound(double rho, double d, int t) {
  return 960.0 * std::sqrt(3.0) * rho * d * d * d / std::pow(t, 1.5);
}
double inexact_bound(double rho, double d, int t) {
  return 1215.0 * std::sqrt(5.0) * rho * d * d * d / std::pow(t, 1.5);
}

// The n = 50 cubic-bilinear runs shared by criteria 1 to 4 and 7.
struct CubicRuns {
  CubicExperiment ex;
  double rho = 0.0;
  double dist0 = 0.0;
  double seconds_newton = 0.0;
  const SolverResult& run(const std::string& algo) const {
    for (const NamedRun& r : ex.runs)
      if (r.algo == algo) return r.result;
    throw std::logic_error("missing run " + algo);
  }
};

const CubicRuns& cubic_runs() {
  static std::unique_ptr<CubicRuns> cached;
  if (!cached) {
    cached = std::make_unique<CubicRuns>();
    Timer t;
    CubicExperiment newton = run_cubic_experiment(50, {"newton"}, 100, 0);
    cached->seconds_newton = t.seconds();
    cached->ex = run_cubic_experiment(50, {"inexact", "eg"}, 100, 0);
    cached->ex.runs.insert(cached->ex.runs.begin(), std::move(newton.runs.front()));
    cached->rho = 1.0 / (20.0 * 50.0);
    cached->dist0 = (cached->ex.z0.coords() - cached->ex.saddle.coords()).norm();
  }
  return *cached;
}

Verdict gap_bound_rows(const SolverResult& r, double rho, double d, bool inexact) {
  Verdict v;
  int rows = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const IterateTrace& row : r.trace) {
    if (!row.gap) {
      v.pass = false;
      v.detail = "row " + std::to_string(row.k) + " has no gap";
      return v;
    }
    const double bound = inexact ? inexact_bound(rho, d, row.k) : exact_bound(rho, d, row.k);
    worst = std::max(worst, *row.gap / bound);
    if (!(*row.gap <= bound + 1e-8)) v.pass = false;
    ++rows;
  }
  // After an exact stop the averaged iterate no longer moves, so the last gap
  // is the gap at every later T.
  if (r.status == SolverStatus::stopped_at_saddle && !r.trace.empty()) {
    const double last = *r.trace.back().gap;
    for (int t = rows + 1; t <= 100; ++t) {
      const double bound = inexact ? inexact_bound(rho, d, t) : exact_bound(rho, d, t);
      worst = std::max(worst, last / bound);
      if (!(last <= bound + 1e-8)) v.pass = false;
    }
  } else if (rows != 100) {
    v.pass = false;
  }
  v.detail = std::to_string(rows) + " rows (stopped: " + r.message + "), T=1..100 max gap/bound = " + fmt(worst);
  return v;
}

Verdict criterion1() {
  const CubicRuns& c = cubic_runs();
  Verdict v = gap_bound_rows(c.run("newton"), c.rho, c.dist0, false);
  v.detail += ", " + fmt(c.seconds_newton) + " s";
  if (c.seconds_newton >= 60.0) v.pass = false;
  return v;
}

Verdict criterion2() {
  const CubicRuns& c = cubic_runs();
  return gap_bound_rows(c.run("inexact"), c.rho, c.dist0, true);
}

// Per-run invariants recomputed from the stored iterates.
struct InvariantRun {
  std::string name;
  SolverResult result;
  JointPoint z0, z_star;
  double rho;
  bool inexact;
};

std::vector<std::string> invariant_failures(const InvariantRun& run) {
  std::vector<std::string> bad;
  const SolverResult& r = run.result;
  const double d = (run.z0.coords() - run.z_star.coords()).norm();
  const double hi = run.inexact ? 1.0 / 14.0 : 1.0 / 13.0;
  double energy = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const double step = (r.points[k].coords() - r.anchors[k].coords()).norm();
    const double t = r.lambdas[k] * run.rho * r.trace[k].step_norm;
    // The stored points are zhat + dz, so the recomputed step differs from ||dz|| by rounding.
    if (std::abs(step - r.trace[k].step_norm) > 1e-10 * (1.0 + step)) bad.push_back("step mismatch");
    if (t < 1.0 / 15.0 || t > hi) bad.push_back("lambda window at k=" + std::to_string(k + 1));
    energy += r.trace[k].step_norm * r.trace[k].step_norm;
    mass += r.lambdas[k];
    if (!run.inexact) {
      if ((r.anchors[k + 1].coords() - run.z0.coords()).norm() > 2.0 * d)
        bad.push_back("anchor drift at k=" + std::to_string(k + 1));
      if (mass < std::pow(static_cast<double>(k + 1), 1.5) / (30.0 * std::sqrt(3.0) * run.rho * d))
        bad.push_back("lambda mass at k=" + std::to_string(k + 1));
    }
  }
  if (energy > (run.inexact ? 20.0 : 12.0) * d * d) bad.push_back("step energy " + fmt(energy));
  if (r.status == SolverStatus::aborted) bad.push_back("aborted: " + r.message);
  for (std::string& b : bad) b = run.name + ": " + b;
  return bad;
}

Verdict criterion3() {
  const CubicRuns& c = cubic_runs();
  std::vector<InvariantRun> runs;
  runs.push_back({"cubic n=50 exact", c.run("newton"), c.ex.z0, c.ex.saddle, c.rho, false});
  runs.push_back({"cubic n=50 inexact", c.run("inexact"), c.ex.z0, c.ex.saddle, c.rho, true});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticSaddle q = make_random_cc_quadratic(6, 4, seed);
    SolverConfig cfg;
    cfg.rho = 0.5;
    cfg.iterations = 50;
    const JointPoint z0(6, 4);
    runs.push_back({"random quadratic seed " + std::to_string(seed), newton_minmax(q, z0, cfg), z0, q.saddle(),
                    0.5, false});
    runs.push_back({"random quadratic inexact seed " + std::to_string(seed), inexact_newton_minmax(q, z0, cfg),
                    z0, q.saddle(), 0.5, true});
  }
  for (Eigen::Index n : {10, 20}) {
    const double rho = 1.0 / (20.0 * n);
    const CubicBilinear cb = make_cubic_bilinear(n, rho, 7);
    SolverConfig cfg;
    cfg.rho = rho;
    cfg.iterations = 100;
    const JointPoint z0(n, n);
    runs.push_back({"cubic n=" + std::to_string(n) + " seed 7", newton_minmax(cb, z0, cfg), z0,
                    cubic_bilinear_saddle(cb), rho, false});
  }
  {
    const GlmQuadraticSum g = make_glm_quadratic_sum(200, 3, 3, 8);
    SolverConfig cfg;
    cfg.rho = 0.1;
    cfg.iterations = 50;
    cfg.seed = 1;
    SubsampleConfig sc;
    sc.rule = SampleRule::empirical;
    const JointPoint z0(3, 3, Vec::Constant(6, 2.0));
    runs.push_back({"glm subsampled", subsampled_newton_minmax(g, z0, cfg, sc), z0, g.saddle(), 0.1, true});
  }
  Verdict v;
  std::size_t rows = 0;
  std::vector<std::string> bad;
  for (const InvariantRun& r : runs) {
    rows += r.result.points.size();
    for (std::string& b : invariant_failures(r)) bad.push_back(std::move(b));
  }
  v.pass = bad.empty();
  v.detail = std::to_string(runs.size()) + " runs, " + std::to_string(rows) + " iterations";
  if (!bad.empty()) v.detail += "; first failure: " + bad.front() + " (" + std::to_string(bad.size()) + " total)";
  return v;
}

Verdict criterion4() {
  Verdict v;
  std::size_t certified = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    v.pass = false;
    if (first.empty()) first = what;
  };

  // Standalone solves in condition2 mode.
  oracle::Random rnd(404);
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index m = 1 + t % 6, n = 1 + (t / 6) % 5;
    const Mat bx = rnd.normal_mat(m, m, 0.5), by = rnd.normal_mat(n, n, 0.5);
    Mat h = Mat::Zero(m + n, m + n);
    h.topLeftCorner(m, m) = bx * bx.transpose();
    h.bottomRightCorner(n, n) = -by * by.transpose();
    const Mat q = rnd.normal_mat(m, n, 0.5);
    h.topRightCorner(m, n) = q;
    h.bottomLeftCorner(n, m) = q.transpose();
    const double rho = rnd.uniform(0.01, 1.0);
    const double kappa = t % 2 == 0 ? 0.1 : rho / 8.0;
    const Vec g = rnd.normal_vec(m + n, rnd.uniform(0.01, 3.0));
    const CubicSubproblem sp(g, h, rho, m, n);
    const SubproblemSolution sol = solve_cubic_subproblem(sp, SsnTarget::condition2(kappa, g.norm()));
    if (sol.status != SubproblemStatus::condition2) {
      fail("standalone solve " + std::to_string(t) + " returned " + to_string(sol.status));
      continue;
    }
    const double lhs = model_gradient(sp, sol.dz).norm();
    const double rhs = kappa * std::min(sol.dz.squaredNorm(), g.norm());
    const double ref = oracle::cubic_model_gradient(g, h, rho, m, sol.dz).norm();
    if (!(lhs <= rhs)) fail("standalone solve " + std::to_string(t) + ": " + fmt(lhs) + " > " + fmt(rhs));
    if (std::abs(ref - lhs) > 1e-12 * (g.norm() + h.norm() * sol.dz.norm() + 1.0))
      fail("model gradient disagrees with the oracle");
    ++certified;
  }

  // In-run solves: reported values certify verbatim, and agree with a
  // recomputation from the stored iterates.
  auto check_run = [&](const std::string& name, const Problem& p, const SolverResult& r, double kappa) {
    for (std::size_t k = 0; k < r.points.size(); ++k) {
      const IterationDiagnostics& d = r.diagnostics[k];
      if (d.subproblem != SubproblemStatus::condition2) {
        fail(name + " k=" + std::to_string(k + 1) + " status " + to_string(d.subproblem));
        continue;
      }
      const double step = r.trace[k].step_norm;
      if (!(d.model_grad_norm <= kappa * std::min(step * step, d.anchor_grad_norm)))
        fail(name + " k=" + std::to_string(k + 1) + " violates Condition 2");
      const Vec zhat = r.anchors[k].coords();
      const Vec g = p.gradient(zhat);
      if (std::abs(g.norm() - d.anchor_grad_norm) > 1e-12 * (1.0 + g.norm())) fail(name + " anchor gradient");
      ++certified;
    }
  };
  const CubicRuns& c = cubic_runs();
  check_run("cubic n=50 inexact", *c.ex.problem, c.run("inexact"), 0.1);
  // Exact Hessian source: recompute the model gradient at the stored step.
  {
    const SolverResult& r = c.run("inexact");
    for (std::size_t k = 0; k < r.points.size(); ++k) {
      const Vec zhat = r.anchors[k].coords();
      const Vec dz = r.points[k].coords() - zhat;
      const double recomputed =
          oracle::cubic_model_gradient(c.ex.problem->gradient(zhat), c.ex.problem->hessian(zhat), c.rho, 50, dz)
              .norm();
      const double scale = c.ex.problem->gradient(zhat).norm() + dz.norm();
      if (std::abs(recomputed - r.diagnostics[k].model_grad_norm) > 1e-9 * (1.0 + scale))
        fail("cubic inexact k=" + std::to_string(k + 1) + " model gradient recomputes to " + fmt(recomputed));
    }
  }
  const GlmQuadraticSum g = make_glm_quadratic_sum(200, 3, 3, 9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SolverConfig cfg;
    cfg.rho = 0.1;
    cfg.iterations = 40;
    cfg.seed = seed;
    SubsampleConfig sc;
    sc.rule = SampleRule::empirical;
    const SolverResult r = subsampled_newton_minmax(g, JointPoint(3, 3, Vec::Constant(6, 3.0)), cfg, sc);
    check_run("glm subsampled seed " + std::to_string(seed), g, r, 0.1);
  }
  v.detail = std::to_string(certified) + " certified solves";
  if (!first.empty()) v.detail += "; " + first;
  return v;
}

Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    j.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return j;
}

Verdict criterion5() {
  Verdict v;
  oracle::Random rnd(505);
  // Projection onto the product of two second-order cones.
  double worst_proj = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index m = 1 + t % 7, n = 1 + t % 4;
    const Vec w = rnd.normal_vec(m + n + 2, rnd.uniform(0.1, 10.0));
    Vec expected(m + n + 2);
    expected << oracle::cone_nearest_point(w.head(m + 1)), oracle::cone_nearest_point(w.tail(n + 1));
    worst_proj = std::max(worst_proj, (soc_project(w, m, n) - expected).norm());
  }
  const bool proj_ok = worst_proj <= 1e-8;

  // Residual Jacobian against central differences away from the cone boundaries.
  double worst_jac = 0.0;
  int tested = 0;
  while (tested < 200) {
    const Eigen::Index m = 1 + tested % 4, n = 1 + tested % 3;
    const Mat bx = rnd.normal_mat(m, m, 0.5), by = rnd.normal_mat(n, n, 0.5);
    Mat h = Mat::Zero(m + n, m + n);
    h.topLeftCorner(m, m) = bx * bx.transpose();
    h.bottomRightCorner(n, n) = -by * by.transpose();
    const Mat q = rnd.normal_mat(m, n, 0.5);
    h.topRightCorner(m, n) = q;
    h.bottomLeftCorner(n, m) = q.transpose();
    const CubicSubproblem sp(rnd.normal_vec(m + n), h, rnd.uniform(0.05, 1.0), m, n);
    const Vec p = rnd.normal_vec(m + n + 2);
    const Vec w = p - lifted_operator(sp, p);
    const double a = w.head(m).norm(), b = w(m), c = w.segment(m + 1, n).norm(), d = w(m + n + 1);
    if (std::abs(std::abs(b) - a) < 1e-3 || std::abs(std::abs(d) - c) < 1e-3) continue;
    ++tested;
    const Mat fd = central_jacobian([&](const Vec& x) { return residual_E(sp, x); }, p, 1e-6);
    worst_jac = std::max(worst_jac, (fd - residual_jacobian(sp, p)).cwiseAbs().maxCoeff());
  }
  const bool jac_ok = worst_jac <= 1e-5;

  // Cubed-distance bound of the mirror-prox average.
  int gmp_bad = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index m = 1 + t % 5, n = 1 + (t / 5) % 4;
    const Mat bx = rnd.normal_mat(m, m, 0.5), by = rnd.normal_mat(n, n, 0.5);
    Mat h = Mat::Zero(m + n, m + n);
    h.topLeftCorner(m, m) = bx * bx.transpose();
    h.bottomRightCorner(n, n) = -by * by.transpose();
    const Mat q = rnd.normal_mat(m, n, 0.5);
    h.topRightCorner(m, n) = q;
    h.bottomLeftCorner(n, m) = q.transpose();
    const CubicSubproblem sp(rnd.normal_vec(m + n), h, rnd.uniform(0.05, 1.0), m, n);
    const SubproblemSolution s = solve_cubic_subproblem(sp, SsnTarget::exact());
    const Vec star = oracle::polish_model_saddle(sp.g, sp.h, sp.rho, m, s.dz);
    for (int j : {1, 10, 100}) {
      const GmpResult res = gmp_solve(sp, Vec::Zero(m + n), j, 1e-300);
      const Vec diff = res.average - star;
      const double lhs = std::pow(diff.head(m).norm(), 3) + std::pow(diff.tail(n).norm(), 3);
      const double rhs = res.ell * star.squaredNorm() / (2.0 * sp.rho * j);
      worst_ratio = std::max(worst_ratio, lhs / rhs);
      if (!(lhs <= rhs)) ++gmp_bad;
    }
  }
  v.pass = proj_ok && jac_ok && gmp_bad == 0;
  v.detail = "projection max err " + fmt(worst_proj) + ", Jacobian max err " + fmt(worst_jac) + " (" +
             std::to_string(tested) + " points), GMP max lhs/rhs " + fmt(worst_ratio) + " (" +
             std::to_string(gmp_bad) + " violations)";
  return v;
}

Verdict criterion6() {
  Verdict v;
  Timer timer;
  const GlmQuadraticSum g = make_glm_quadratic_sum(200, 3, 3, 606);
  oracle::Random rnd(607);
  const Vec z = rnd.normal_vec(6);
  const Mat exact = g.hessian(z);
  const double tau = 0.1, delta = 0.1;
  const std::size_t size_u = uniform_sample_size(max_component_bound(g), tau, delta, 3, 3);
  const std::size_t size_n = nonuniform_sample_size(average_glm_bound(g), tau, delta, 3, 3);
  const NonuniformProbs probs = nonuniform_probs(g, z);
  const std::vector<SamplingPlan> plans{SamplingPlan::uniform(200, size_u, true),
                                        SamplingPlan::nonuniform(probs.probs, size_n)};
  const char* names[] = {"uniform", "nonuniform"};
  // A fixed symmetric test matrix turns the Monte-Carlo check into one scalar.
  Mat wt = rnd.normal_mat(6, 6);
  wt = 0.5 * (wt + wt.transpose()).eval();
  const double target = (wt.cwiseProduct(exact)).sum();
  std::ostringstream detail;
  for (int s = 0; s < 2; ++s) {
    Rng rng(600 + s);
    int success = 0;
    double mean = 0.0, m2 = 0.0;
    const int draws = 200;
    for (int d = 0; d < draws; ++d) {
      const Mat hs = subsampled_hessian(g, z, plans[s], rng);
      if (oracle::spectral_norm(hs - exact) <= tau) ++success;
      const double val = (wt.cwiseProduct(hs)).sum();
      const double delta_v = val - mean;
      mean += delta_v / (d + 1);
      m2 += delta_v * (val - mean);
    }
    const double se = std::sqrt(m2 / (draws - 1) / draws);
    const double freq = success / static_cast<double>(draws);
    const bool mc_ok = std::abs(mean - target) <= 3.0 * se;
    if (freq < 0.85 || !mc_ok) v.pass = false;
    detail << names[s] << ": |S|=" << plans[s].sample_size << " success " << fmt(freq) << ", MC |mean-exact|/SE "
           << fmt(std::abs(mean - target) / se) << "; ";
  }
  detail << fmt(timer.seconds()) << " s";
  v.detail = detail.str();
  return v;
}

Verdict criterion7() {
  const CubicRuns& c = cubic_runs();
  auto slope = [](const SolverResult& r) {
    std::vector<double> t, gap;
    for (const IterateTrace& row : r.trace)
      if (row.gap && *row.gap > 0.0) {
        t.push_back(row.k);
        gap.push_back(*row.gap);
      }
    return t.size() >= 10 ? oracle::loglog_slope(t, gap) : std::numeric_limits<double>::quiet_NaN();
  };
  const double newton = slope(c.run("newton"));
  const double eg = slope(c.run("eg"));
  Verdict v;
  v.pass = newton <= -1.2 && eg >= -1.1;
  v.detail = "Newton slope " + fmt(newton) + " (<= -1.2), EG slope " + fmt(eg) + " (>= -1.1)";
  return v;
}

Verdict criterion8() {
  Verdict v;
  Timer timer;
  ProblemSpec spec;
  spec.kind = "auc";
  spec.subset = 500;
  bool surrogate = false;
  const LibsvmDataset ds = load_auc_dataset(spec, &surrogate);
  AucOptions opts;
  opts.iterations = 200;
  opts.sampling = SampleRule::empirical;
  opts.kappa_m = 0.1;
  const AucExperiment ex = run_auc_experiment(ds, {"subsampled", "seg", "sogda"}, opts);
  const double seconds = timer.seconds();
  const SolverResult* alg3 = nullptr;
  double best = std::numeric_limits<double>::infinity();
  int reached_at = -1;
  std::ostringstream detail;
  detail << (surrogate ? "a9a-shaped surrogate data" : "dataset") << ", N=" << ds.size() << "; ";
  for (const NamedRun& r : ex.runs)
    if (r.algo == "subsampled") {
      alg3 = &r.result;
      for (const IterateTrace& row : r.result.trace) {
        best = std::min(best, row.grad_norm);
        if (reached_at < 0 && row.grad_norm <= 1e-6) reached_at = row.k;
      }
    }
  if (alg3 == nullptr || alg3->trace.empty()) {
    v.pass = false;
    v.detail = detail.str() + "no subsampled trace";
    return v;
  }
  const double alg3_final = alg3->trace.back().grad_norm;
  detail << "subsampled min grad " << fmt(best) << (reached_at > 0 ? " reached 1e-6 at k=" + std::to_string(reached_at)
                                                                    : std::string(" never <= 1e-6"));
  v.pass = reached_at > 0;
  for (const NamedRun& r : ex.runs) {
    if (r.algo == "subsampled") continue;
    const double final_grad = r.result.trace.back().grad_norm;
    detail << "; " << r.algo << " (c=" << r.step_c << ") final grad " << fmt(final_grad);
    if (!(final_grad >= 10.0 * alg3_final)) v.pass = false;
  }
  detail << "; " << fmt(seconds) << " s";
  if (seconds >= 120.0) v.pass = false;
  v.detail = detail.str();
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion9() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "nmm_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> configs{
      {"run", "--problem", "cubic", "--algo", "newton", "--n", "20", "--iters", "30"},
      {"run", "--problem", "cubic", "--algo", "inexact", "--n", "20", "--iters", "30", "--format", "json"},
      {"run", "--problem", "glm", "--algo", "subsampled", "--sampling", "empirical", "--iters", "30", "--seed", "5"},
      {"run", "--problem", "glm", "--algo", "subsampled", "--sampling", "nonuniform", "--iters", "10", "--seed", "6"},
      {"run", "--problem", "glm", "--algo", "sogda", "--iters", "200", "--seed", "7"},
      {"run", "--problem", "auc", "--subset", "100", "--algo", "subsampled", "--sampling", "empirical", "--iters",
       "20", "--seed", "8"},
      {"run", "--problem", "auc", "--subset", "100", "--algo", "seg", "--iters", "50", "--seed", "9", "--reps", "3"},
  };
  int compared = 0;
  std::ostringstream sink;
  // Both repetitions write to the same path, since JSON headers echo it.
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const fs::path dir = root / ("run" + std::to_string(i));
    std::vector<std::string> args = configs[i];
    const bool json = std::find(args.begin(), args.end(), "json") != args.end();
    args.push_back("--out");
    args.push_back((dir / (json ? "trace.json" : "trace.csv")).string());
    std::vector<std::vector<std::pair<std::string, std::string>>> contents(2);
    for (auto& files : contents) {
      fs::remove_all(dir);
      fs::create_directories(dir);
      if (cli_main(args, sink, sink) != 0) {
        v.pass = false;
        v.detail = "config " + std::to_string(i) + " failed to run";
        fs::remove_all(root);
        return v;
      }
      for (const auto& e : fs::directory_iterator(dir)) files.emplace_back(e.path().filename().string(), slurp(e.path()));
      std::sort(files.begin(), files.end());
    }
    compared += static_cast<int>(contents[0].size());
    if (contents[0] != contents[1]) {
      v.pass = false;
      v.detail += "config " + std::to_string(i) + " differs; ";
    }
  }
  for (const char* d : {"cubic_a", "cubic_b"})
    if (cli_main({"repro-cubic", "--n", "10", "--iters", "40", "--out", (root / d).string()}, sink, sink) != 0)
      v.pass = false;
  for (const auto& e : fs::directory_iterator(root / "cubic_a")) {
    ++compared;
    if (slurp(e.path()) != slurp(root / "cubic_b" / e.path().filename())) {
      v.pass = false;
      v.detail += "differs: " + e.path().filename().string() + "; ";
    }
  }
  v.detail += std::to_string(compared) + " file pairs compared byte for byte";
  fs::remove_all(root);
  return v;
}

struct Criterion {
  const char* title;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"exact gap bound, cubic n=50, T=1..100", criterion1},
      {"inexact gap bound, kappa_m=0.1, beta=8D", criterion2},
      {"iterate invariants", criterion3},
      {"Condition 2 certificate", criterion4},
      {"subproblem oracles", criterion5},
      {"sampling concentration", criterion6},
      {"rate separation", criterion7},
      {"AUC end-to-end", criterion8},
      {"determinism", criterion9},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Verdict v;
    try {
      v = criteria[i].check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].title << " | "
              << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
