#include "nmm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace nmm {

std::optional<double> select_lambda(double step_norm, double rho, const LambdaWindow& window) {
  require(rho > 0.0, "select_lambda: rho must be positive");
  require(window.lo > 0.0 && window.lo <= window.hi, "select_lambda: invalid window");
  if (!(step_norm > 0.0)) return std::nullopt;
  return 0.5 * (window.lo + window.hi) / (rho * step_norm);
}

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::budget: return "budget";
    case SolverStatus::stopped_at_saddle: return "stopped_at_saddle";
    case SolverStatus::aborted: return "aborted";
  }
  return "unknown";
}

std::string to_string(SampleRule r) {
  switch (r) {
    case SampleRule::uniform: return "uniform";
    case SampleRule::nonuniform: return "nonuniform";
    case SampleRule::empirical: return "empirical";
    case SampleRule::full: return "full";
  }
  return "unknown";
}

SampleRule parse_sample_rule(const std::string& s) {
  if (s == "uniform") return SampleRule::uniform;
  if (s == "nonuniform") return SampleRule::nonuniform;
  if (s == "empirical") return SampleRule::empirical;
  if (s == "full") return SampleRule::full;
  throw ContractError("unknown sampling rule '" + s + "' (expected uniform, nonuniform, empirical or full)");
}

double StepRule::at(int k) const {
  return decay ? c / std::sqrt(static_cast<double>(k) + 1.0) : c;
}

namespace {

using Clock = std::chrono::steady_clock;

std::size_t evals_per_gradient(const Problem& p) {
  const auto* fs = dynamic_cast<const FiniteSumProblem*>(&p);
  return fs != nullptr ? fs->num_components() : 1;
}

// Writes trace rows and keeps the gap of the running average up to date.
class Recorder {
 public:
  Recorder(const Problem& problem, const JointPoint& z0, const std::optional<JointPoint>& reference,
           double beta, const GapConfig& gap, int stride, bool wall_time, SolverResult& out)
      : problem_(problem),
        z0_(z0),
        reference_(reference),
        gap_(gap),
        stride_(std::max(1, stride)),
        wall_time_(wall_time),
        out_(out),
        start_(Clock::now()) {
    gap_.beta = beta;
    if (reference_) problem_.check_point(*reference_);
  }

  void row(IterateTrace r, const RunningAverage& avg, bool last) {
    r.hat_dist = (out_.anchors.back().coords() - z0_.coords()).norm();
    if (wall_time_) r.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
    out_.trace.push_back(r);
    if (reference_ && (last || r.k % stride_ == 0)) fill_gap(avg);
  }

  // Ensures the final row carries a gap value.
  void finish(const RunningAverage& avg) {
    if (reference_ && !out_.trace.empty() && !out_.trace.back().gap) fill_gap(avg);
  }

 private:
  void fill_gap(const RunningAverage& avg) {
    if (gap_.beta <= 0.0) {
      out_.trace.back().gap = 0.0;
      return;
    }
    const GapResult g = restricted_gap(problem_, avg.value(), *reference_, gap_);
    out_.trace.back().gap = g.value;
    if (!out_.diagnostics.empty() && out_.diagnostics.size() == out_.trace.size())
      out_.diagnostics.back().gap_converged = g.converged;
  }

  const Problem& problem_;
  const JointPoint& z0_;
  const std::optional<JointPoint>& reference_;
  GapConfig gap_;
  int stride_;
  bool wall_time_;
  SolverResult& out_;
  Clock::time_point start_;
};

struct NewtonMode {
  bool inexact = false;
  const HessianSource* source = nullptr;
  double kappa_h = 0.0;
  double tau0 = 0.0;
};

SolverResult run_newton(const Problem& p, const JointPoint& z0, const SolverConfig& cfg,
                        const NewtonMode& mode) {
  p.check_point(z0);
  require(cfg.rho > 0.0, "newton_minmax: rho must be positive");
  require(cfg.iterations >= 1, "newton_minmax: iterations must be >= 1");
  const Eigen::Index m = z0.m();
  const Eigen::Index n = z0.n();
  const LambdaWindow window =
      cfg.window.value_or(mode.inexact ? LambdaWindow::inexact() : LambdaWindow::exact());
  require(window.lo > 0.0 && window.lo <= window.hi, "newton_minmax: invalid lambda window");

  SolverResult out(m, n);
  out.anchors.push_back(z0);
  out.averaged = z0;
  out.last = z0;
  if (mode.inexact) out.theory_hypotheses_hold = inexact_hypotheses_hold(cfg.kappa_m, mode.tau0, cfg.rho);

  const Vec f0 = operator_value(p, z0);
  const double stop_tol = cfg.stop_tol.value_or(1e-12 * (1.0 + f0.norm()));
  if (f0.norm() <= stop_tol) {
    out.status = SolverStatus::stopped_at_saddle;
    out.message = "initial point is a saddle point";
    return out;
  }

  double beta = 0.0;
  if (cfg.reference)
    beta = cfg.beta_factor.value_or(mode.inexact ? 8.0 : 7.0) *
           (z0.coords() - cfg.reference->coords()).norm();
  Recorder rec(p, z0, cfg.reference, beta, cfg.gap, cfg.gap_stride, cfg.wall_time, out);

  const std::size_t per_grad = evals_per_gradient(p);
  const double delta_k = mode.inexact ? per_iteration_delta(cfg.delta, cfg.iterations) : 0.0;
  RunningAverage avg(m, n);
  Vec zhat = z0.coords();
  double lead_grad_norm = f0.norm();
  std::size_t evals = per_grad;

  for (int k = 0; k < cfg.iterations; ++k) {
    const Vec g = p.gradient(zhat);
    evals += per_grad;
    const double anchor_norm = g.norm();
    if (anchor_norm <= stop_tol) {
      out.status = SolverStatus::stopped_at_saddle;
      out.message = "anchor point is a saddle point";
      break;
    }

    IterationDiagnostics diag;
    diag.anchor_grad_norm = anchor_norm;
    std::size_t samples = 0;
    Mat h;
    if (mode.inexact) {
      diag.tau = tau_rule(mode.tau0, cfg.kappa_m, mode.kappa_h, cfg.rho, anchor_norm).tau;
    }
    if (mode.source != nullptr && *mode.source) {
      HessianContext ctx{k, anchor_norm, lead_grad_norm, diag.tau, delta_k};
      HessianSample hs = (*mode.source)(zhat, ctx);
      require(hs.h.rows() == p.dim() && hs.h.cols() == p.dim(),
              "newton_minmax: Hessian source returned the wrong shape");
      h = std::move(hs.h);
      samples = hs.samples;
      evals += hs.component_evals;
      if (cfg.check_condition1) diag.condition1 = spectral_norm(Mat(h - p.hessian(zhat))) <= diag.tau;
    } else {
      h = p.hessian(zhat);
      samples = per_grad;
      evals += per_grad;
      if (mode.inexact && cfg.check_condition1) diag.condition1 = true;
    }
    // Sampled Hessians are symmetric up to summation order; symmetrize exactly.
    h = 0.5 * (h + h.transpose()).eval();

    const CubicSubproblem sp(g, std::move(h), cfg.rho, m, n);
    const SsnTarget target =
        mode.inexact ? SsnTarget::condition2(cfg.kappa_m, anchor_norm) : SsnTarget::exact();
    const SubproblemSolution sol = solve_cubic_subproblem(sp, target, cfg.subproblem);
    diag.subproblem = sol.status;
    diag.model_grad_norm = sol.model_grad_norm;
    const double step_norm = sol.dz.norm();
    diag.condition2 = sol.model_grad_norm <=
                      cfg.kappa_m * std::min(step_norm * step_norm, anchor_norm);
    if (sol.status == SubproblemStatus::budget_exhausted) {
      out.status = SolverStatus::aborted;
      out.message = "subproblem solver exhausted its budget at iteration " + std::to_string(k) +
                    " (model gradient norm " + std::to_string(sol.model_grad_norm) + ")";
      break;
    }
    const std::optional<double> lambda = select_lambda(step_norm, cfg.rho, window);
    if (!lambda) {
      out.status = SolverStatus::stopped_at_saddle;
      out.message = "subproblem returned a zero step";
      break;
    }

    Vec z_next = zhat + sol.dz;
    const Vec f_next = operator_value(p, z_next);
    evals += per_grad;
    Vec zhat_next = zhat - *lambda * f_next;
    avg.add(z_next, *lambda);

    out.points.emplace_back(m, n, z_next);
    out.anchors.emplace_back(m, n, zhat_next);
    out.lambdas.push_back(*lambda);
    out.diagnostics.push_back(diag);

    IterateTrace row;
    row.k = k + 1;
    row.lambda = *lambda;
    row.step_norm = step_norm;
    row.grad_norm = f_next.norm();
    row.samples = samples;
    row.subproblem_iters = sol.gmp_iters + sol.ssn_iters;
    row.component_evals = evals;
    const bool saddle = row.grad_norm <= stop_tol;
    rec.row(row, avg, saddle || k + 1 == cfg.iterations);

    lead_grad_norm = row.grad_norm;
    zhat = std::move(zhat_next);
    if (saddle) {
      out.status = SolverStatus::stopped_at_saddle;
      out.message = "iterate is a saddle point";
      break;
    }
  }

  rec.finish(avg);
  if (!out.points.empty()) {
    out.averaged = avg.value();
    out.last = out.points.back();
  }
  if (out.message.empty()) out.message = "iteration budget reached";
  return out;
}

// ceil(v) clamped to [1, 2^62]; thresholds blow up as the gradient vanishes.
std::size_t ceil_size(double v) {
  constexpr double cap = 4.611686018427387904e18;
  if (!(v < cap)) return static_cast<std::size_t>(cap);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

double default_kappa_h(const Problem& p, const JointPoint& z0, const SolverConfig& cfg) {
  if (cfg.kappa_h) return *cfg.kappa_h;
  if (const auto* fs = dynamic_cast<const FiniteSumProblem*>(&p)) {
    const double b = max_component_bound(*fs);
    if (b > 0.0) return b;
  }
  return std::max(spectral_norm(p.hessian(z0.coords())), 1e-12);
}

}  // namespace

SolverResult newton_minmax(const Problem& problem, const JointPoint& z0, const SolverConfig& cfg) {
  return run_newton(problem, z0, cfg, NewtonMode{});
}

SolverResult inexact_newton_minmax(const Problem& problem, const JointPoint& z0,
                                   const SolverConfig& cfg, const HessianSource& hessian_source) {
  NewtonMode mode;
  mode.inexact = true;
  mode.source = &hessian_source;
  mode.tau0 = cfg.tau0.value_or(cfg.rho / 8.0);
  mode.kappa_h = default_kappa_h(problem, z0, cfg);
  return run_newton(problem, z0, cfg, mode);
}

SolverResult subsampled_newton_minmax(const FiniteSumProblem& fs, const JointPoint& z0,
                                      const SolverConfig& cfg, const SubsampleConfig& scfg) {
  const std::size_t count = fs.num_components();
  require(count >= 1, "subsampled_newton_minmax: problem has no components");
  if (scfg.rule == SampleRule::nonuniform)
    require(fs.glm() != nullptr,
            "subsampled_newton_minmax: nonuniform sampling needs a generalized-linear problem");
  const double b_max = max_component_bound(fs);
  const double b_avg = average_glm_bound(fs);
  const Eigen::Index m = fs.dim_x();
  const Eigen::Index n = fs.dim_y();
  auto rng = std::make_shared<Rng>(cfg.seed);

  const auto exact = [&fs, count](const Vec& z) {
    return HessianSample{fs.hessian(z), count, count};
  };

  HessianSource source = [&, rng, exact](const Vec& zhat, const HessianContext& ctx) -> HessianSample {
    std::size_t size = count;
    switch (scfg.rule) {
      case SampleRule::full: {
        const SamplingPlan plan = SamplingPlan::full_batch(count);
        return {subsampled_hessian(fs, zhat, plan, *rng), count, count};
      }
      case SampleRule::uniform:
        size = b_max > 0.0 ? ceil_size(theta_uniform(b_max, ctx.tau, ctx.delta_k, m, n)) : 1;
        break;
      case SampleRule::nonuniform:
        size = b_avg > 0.0 ? ceil_size(theta_nonuniform(b_avg, ctx.tau, ctx.delta_k, m, n)) : 1;
        break;
      case SampleRule::empirical: {
        const double denom = std::min(ctx.anchor_grad_norm * ctx.anchor_grad_norm,
                                      ctx.lead_grad_norm * ctx.lead_grad_norm);
        size = denom > 0.0 ? ceil_size(scfg.empirical_coef *
                                       std::log(static_cast<double>(m + n)) / denom)
                           : count;
        break;
      }
    }
    if (size >= count && scfg.exact_when_oversampled) return exact(zhat);
    if (scfg.rule == SampleRule::nonuniform) {
      const NonuniformProbs probs = nonuniform_probs(fs, zhat);
      const SamplingPlan plan = SamplingPlan::nonuniform(probs.probs, size);
      return {subsampled_hessian(fs, zhat, plan, *rng), size, size};
    }
    const SamplingPlan plan = SamplingPlan::uniform(count, size, true);
    return {subsampled_hessian(fs, zhat, plan, *rng), size, size};
  };
  return inexact_newton_minmax(fs, z0, cfg, source);
}

namespace {

// Operator estimate from a minibatch drawn with replacement; the full
// operator when the batch covers the whole sum.
Vec sampled_operator(const Problem& p, const FiniteSumProblem* fs, const Vec& z,
                     std::size_t batch, Rng& rng, std::size_t& evals, std::size_t& samples) {
  if (fs == nullptr || batch == 0 || batch >= fs->num_components()) {
    const std::size_t per = evals_per_gradient(p);
    evals += per;
    samples += per;
    return operator_value(p, z);
  }
  const std::size_t count = fs->num_components();
  Vec g = fs->deterministic_gradient(z);
  const double w = 1.0 / static_cast<double>(batch);
  for (std::size_t j = 0; j < batch; ++j) fs->add_component_gradient(rng.below(count), z, w, g);
  flip_y_block(g, p.dim_x());
  evals += batch;
  samples += batch;
  return g;
}

SolverResult extragradient(const Problem& p, const FiniteSumProblem* fs, const JointPoint& z0,
                           const FirstOrderConfig& cfg) {
  p.check_point(z0);
  require(cfg.iterations >= 1, "extragradient: iterations must be >= 1");
  require(cfg.step.c >= 0.0, "extragradient: step constant must be nonnegative");
  const Eigen::Index m = z0.m();
  const Eigen::Index n = z0.n();
  SolverResult out(m, n);
  out.anchors.push_back(z0);
  out.averaged = z0;
  out.last = z0;
  Recorder rec(p, z0, cfg.reference, cfg.beta, cfg.gap, cfg.gap_stride, cfg.wall_time, out);
  const bool full = fs == nullptr || cfg.batch == 0 || cfg.batch >= fs->num_components();
  Rng rng(cfg.seed);
  RunningAverage avg(m, n);
  Vec zhat = z0.coords();
  std::size_t evals = 0;

  for (int k = 0; k < cfg.iterations; ++k) {
    const double lambda = cfg.step.at(k);
    std::size_t samples = 0;
    const Vec f_hat = sampled_operator(p, fs, zhat, cfg.batch, rng, evals, samples);
    Vec z_next = zhat - lambda * f_hat;
    const Vec f_next = sampled_operator(p, fs, z_next, cfg.batch, rng, evals, samples);
    Vec zhat_next = zhat - lambda * f_next;
    avg.add(z_next, lambda > 0.0 ? lambda : 1.0);

    IterateTrace row;
    row.k = k + 1;
    row.lambda = lambda;
    row.step_norm = lambda * f_hat.norm();
    row.grad_norm = full ? f_next.norm() : operator_value(p, z_next).norm();
    row.samples = samples;
    row.component_evals = evals;
    out.points.emplace_back(m, n, z_next);
    out.anchors.emplace_back(m, n, zhat_next);
    out.lambdas.push_back(lambda);
    rec.row(row, avg, k + 1 == cfg.iterations);
    zhat = std::move(zhat_next);
  }
  rec.finish(avg);
  out.averaged = avg.value();
  out.last = out.points.back();
  out.message = "iteration budget reached";
  return out;
}

SolverResult optimistic(const Problem& p, const FiniteSumProblem* fs, const JointPoint& z0,
                        const FirstOrderConfig& cfg) {
  p.check_point(z0);
  require(cfg.iterations >= 1, "optimistic: iterations must be >= 1");
  require(cfg.step.c >= 0.0, "optimistic: step constant must be nonnegative");
  const Eigen::Index m = z0.m();
  const Eigen::Index n = z0.n();
  SolverResult out(m, n);
  out.anchors.push_back(z0);
  out.averaged = z0;
  out.last = z0;
  Recorder rec(p, z0, cfg.reference, cfg.beta, cfg.gap, cfg.gap_stride, cfg.wall_time, out);
  const bool full = fs == nullptr || cfg.batch == 0 || cfg.batch >= fs->num_components();
  Rng rng(cfg.seed);
  RunningAverage avg(m, n);
  Vec z = z0.coords();
  std::size_t evals = 0;
  std::size_t samples = 0;
  Vec f = sampled_operator(p, fs, z, cfg.batch, rng, evals, samples);
  Vec f_prev = f;
  double lambda_prev = cfg.step.at(0);

  for (int k = 0; k < cfg.iterations; ++k) {
    const double lambda = cfg.step.at(k);
    Vec z_next = z - 2.0 * lambda * f + lambda_prev * f_prev;
    samples = 0;
    Vec f_next = sampled_operator(p, fs, z_next, cfg.batch, rng, evals, samples);
    avg.add(z_next, lambda > 0.0 ? lambda : 1.0);

    IterateTrace row;
    row.k = k + 1;
    row.lambda = lambda;
    row.step_norm = (z_next - z).norm();
    row.grad_norm = full ? f_next.norm() : operator_value(p, z_next).norm();
    row.samples = samples;
    row.component_evals = evals;
    out.points.emplace_back(m, n, z_next);
    out.anchors.emplace_back(m, n, z_next);
    out.lambdas.push_back(lambda);
    rec.row(row, avg, k + 1 == cfg.iterations);

    f_prev = std::move(f);
    f = std::move(f_next);
    lambda_prev = lambda;
    z = std::move(z_next);
  }
  rec.finish(avg);
  out.averaged = avg.value();
  out.last = out.points.back();
  out.message = "iteration budget reached";
  return out;
}

}  // namespace

SolverResult eg_solve(const Problem& problem, const JointPoint& z0, double ell, int iterations,
                      const FirstOrderConfig& cfg) {
  require(ell > 0.0, "eg_solve: ell must be positive");
  FirstOrderConfig c = cfg;
  c.iterations = iterations;
  c.step = StepRule{1.0 / (2.0 * ell), false};
  c.batch = 0;
  return extragradient(problem, nullptr, z0, c);
}

SolverResult ogda_solve(const Problem& problem, const JointPoint& z0, const FirstOrderConfig& cfg) {
  return optimistic(problem, nullptr, z0, cfg);
}

SolverResult seg_solve(const FiniteSumProblem& fs, const JointPoint& z0, const FirstOrderConfig& cfg) {
  return extragradient(fs, &fs, z0, cfg);
}

SolverResult sogda_solve(const FiniteSumProblem& fs, const JointPoint& z0,
                         const FirstOrderConfig& cfg) {
  return optimistic(fs, &fs, z0, cfg);
}

}  // namespace nmm
