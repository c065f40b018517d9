#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmm/core.hpp"
#include "nmm/sampling.hpp"
#include "nmm/subproblem.hpp"

namespace nmm {

struct LambdaWindow {
  double lo = 1.0 / 15.0;
  double hi = 1.0 / 13.0;

  static LambdaWindow exact() { return {1.0 / 15.0, 1.0 / 13.0}; }
  static LambdaWindow inexact() { return {1.0 / 15.0, 1.0 / 14.0}; }
  bool contains(double lambda, double rho, double step_norm) const {
    const double t = lambda * rho * step_norm;
    return lo <= t && t <= hi;
  }
};

/// lambda with lambda * rho * step_norm at the window midpoint; nullopt when
/// step_norm is zero (the anchor is a saddle point).
std::optional<double> select_lambda(double step_norm, double rho, const LambdaWindow& window);

/// One row per outer iteration k = 1..T.
struct IterateTrace {
  int k = 0;
  double lambda = 0.0;
  double step_norm = 0.0;  // ||z_k - zhat_{k-1}||
  double grad_norm = 0.0;  // ||F(z_k)||
  std::optional<double> gap;  // Gap of the running average, when a reference is known
  double hat_dist = 0.0;      // ||zhat_k - z_0||
  std::size_t samples = 0;    // component Hessians or gradients sampled this iteration
  int subproblem_iters = 0;   // GMP + SSN steps
  std::optional<double> wall_time;  // seconds since the start of the run
  std::size_t component_evals = 0;  // cumulative component-gradient equivalents
};

/// Per-iteration bookkeeping that does not go into trace files.
struct IterationDiagnostics {
  SubproblemStatus subproblem = SubproblemStatus::exact;
  double model_grad_norm = 0.0;
  double anchor_grad_norm = 0.0;  // ||grad f(zhat_k)||
  double tau = 0.0;
  bool condition2 = true;
  std::optional<bool> condition1;  // only when the exact Hessian was compared
  bool gap_converged = true;
};

enum class SolverStatus { budget, stopped_at_saddle, aborted };
std::string to_string(SolverStatus s);

struct SolverResult {
  JointPoint averaged;
  JointPoint last;
  std::vector<IterateTrace> trace;
  std::vector<IterationDiagnostics> diagnostics;
  std::vector<JointPoint> points;   // z_1..z_T
  std::vector<JointPoint> anchors;  // zhat_0..zhat_T
  std::vector<double> lambdas;      // lambda_1..lambda_T
  SolverStatus status = SolverStatus::budget;
  std::string message;
  bool theory_hypotheses_hold = true;

  SolverResult(Eigen::Index m, Eigen::Index n) : averaged(m, n), last(m, n) {}
};

struct SolverConfig {
  double rho = 1.0;
  int iterations = 100;
  std::optional<double> stop_tol;  // default 1e-12 (1 + ||F(z_0)||)
  std::optional<LambdaWindow> window;  // default per algorithm
  // Inexact and subsampled variants.
  double kappa_m = 0.1;
  std::optional<double> tau0;     // default rho / 8
  std::optional<double> kappa_h;  // default: B_max for finite sums, else ||H(zhat_0)||
  double delta = 0.01;
  bool check_condition1 = false;  // compare against the exact Hessian each iteration
  std::uint64_t seed = 0;
  SsnOptions subproblem;
  // Gap tracking against a known saddle point.
  std::optional<JointPoint> reference;
  std::optional<double> beta_factor;  // default 7 (exact) or 8 (inexact)
  GapConfig gap;
  int gap_stride = 1;  // evaluate the gap every gap_stride rows and at the last row
  bool wall_time = false;
};

struct HessianContext {
  int k = 0;
  double anchor_grad_norm = 0.0;  // ||grad f(zhat_k)||
  double lead_grad_norm = 0.0;    // ||grad f(z_k)||
  double tau = 0.0;
  double delta_k = 0.0;
};

struct HessianSample {
  Mat h;
  std::size_t samples = 0;
  std::size_t component_evals = 0;
};

using HessianSource = std::function<HessianSample(const Vec& zhat, const HessianContext& ctx)>;

/// Exact Newton-MinMax: exact Hessian and tight-tolerance subproblem solves.
SolverResult newton_minmax(const Problem& problem, const JointPoint& z0, const SolverConfig& cfg);

/// Inexact-Newton-MinMax with Condition 2 subproblem accuracy. An empty
/// hessian_source means the exact Hessian.
SolverResult inexact_newton_minmax(const Problem& problem, const JointPoint& z0,
                                   const SolverConfig& cfg,
                                   const HessianSource& hessian_source = {});

enum class SampleRule { uniform, nonuniform, empirical, full };
std::string to_string(SampleRule r);
SampleRule parse_sample_rule(const std::string& s);

struct SubsampleConfig {
  SampleRule rule = SampleRule::uniform;
  /// Use the exact Hessian when the prescribed size reaches N.
  bool exact_when_oversampled = true;
  /// Multiplier in the empirical rule c log(dim) / min{||grad f(zhat_k)||^2, ||grad f(z_k)||^2}.
  double empirical_coef = 5.0;
};

/// Subsampled-Newton-MinMax on a finite sum.
SolverResult subsampled_newton_minmax(const FiniteSumProblem& fs, const JointPoint& z0,
                                      const SolverConfig& cfg, const SubsampleConfig& scfg);

struct StepRule {
  double c = 0.1;
  bool decay = false;  // c / sqrt(k + 1) when set
  double at(int k) const;
};

struct FirstOrderConfig {
  int iterations = 100;
  StepRule step;
  std::size_t batch = 0;  // 0 or >= N means full gradients
  std::uint64_t seed = 0;
  std::optional<JointPoint> reference;
  double beta = 1.0;  // gap radius when a reference is set
  GapConfig gap;
  int gap_stride = 1;
  bool wall_time = false;
};

/// Extragradient with lambda = 1/(2 ell); the quadratic model step is
/// dz = -(1/(2 ell)) F(zhat_k).
SolverResult eg_solve(const Problem& problem, const JointPoint& z0, double ell, int iterations,
                      const FirstOrderConfig& cfg = {});

/// z_{k+1} = z_k - 2 lambda_k F(z_k) + lambda_{k-1} F(z_{k-1}).
SolverResult ogda_solve(const Problem& problem, const JointPoint& z0, const FirstOrderConfig& cfg);

/// Extragradient and optimistic gradient with minibatch operator estimates.
SolverResult seg_solve(const FiniteSumProblem& fs, const JointPoint& z0, const FirstOrderConfig& cfg);
SolverResult sogda_solve(const FiniteSumProblem& fs, const JointPoint& z0,
                         const FirstOrderConfig& cfg);

}  // namespace nmm
