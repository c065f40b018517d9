#include "nmm/invariants.hpp"

#include <cmath>
#include <cstdio>
#include <span>

namespace nmm {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::string fmt_at(const char* pattern, int k, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, k, a, b);
  return buf;
}

}  // namespace

double gap_bound(const TheoryContext& ctx, int t) {
  const double c = ctx.inexact ? 1215.0 * std::sqrt(5.0) : 960.0 * std::sqrt(3.0);
  return c * ctx.rho * std::pow(ctx.dist0, 3) / std::pow(static_cast<double>(t), 1.5);
}

double lambda_mass_bound(const TheoryContext& ctx, int t) {
  return std::pow(static_cast<double>(t), 1.5) / (30.0 * std::sqrt(3.0) * ctx.rho * ctx.dist0);
}

std::vector<InvariantCheck> check_trace_invariants(const std::vector<IterateTrace>& trace,
                                                   const TheoryContext& ctx) {
  const LambdaWindow window = ctx.inexact ? LambdaWindow::inexact() : LambdaWindow::exact();
  const double d = ctx.dist0;
  InvariantCheck win{"lambda window", true, ""};
  InvariantCheck drift{"anchor drift <= 2 ||z0 - z*||", true, ""};
  InvariantCheck energy{ctx.inexact ? "step energy <= 20 ||z0 - z*||^2"
                                    : "step energy <= 12 ||z0 - z*||^2",
                        true, ""};
  InvariantCheck mass{"lambda mass lower bound", true, ""};
  InvariantCheck gap{"gap bound", true, ""};
  const double energy_cap = (ctx.inexact ? 20.0 : 12.0) * d * d;
  double step_energy = 0.0;
  double lambda_sum = 0.0;
  int gaps_checked = 0;

  for (const IterateTrace& r : trace) {
    const double t = r.lambda * ctx.rho * r.step_norm;
    if (win.ok && !(window.lo <= t && t <= window.hi)) {
      win.ok = false;
      win.detail = fmt_at("k=%d: lambda*rho*step = %.17g outside [lo, hi] (hi = %.6g)", r.k, t,
                          window.hi);
    }
    if (!ctx.inexact && drift.ok && r.hat_dist > 2.0 * d) {
      drift.ok = false;
      drift.detail = fmt_at("k=%d: ||zhat - z0|| = %.6g > %.6g", r.k, r.hat_dist, 2.0 * d);
    }
    step_energy += r.step_norm * r.step_norm;
    if (energy.ok && step_energy > energy_cap) {
      energy.ok = false;
      energy.detail = fmt_at("k=%d: sum = %.6g > %.6g", r.k, step_energy, energy_cap);
    }
    lambda_sum += r.lambda;
    if (!ctx.inexact && mass.ok && lambda_sum < lambda_mass_bound(ctx, r.k)) {
      mass.ok = false;
      mass.detail = fmt_at("k=%d: sum lambda = %.6g < %.6g", r.k, lambda_sum,
                           lambda_mass_bound(ctx, r.k));
    }
    if (r.gap) {
      ++gaps_checked;
      const double b = gap_bound(ctx, r.k) + ctx.gap_slack;
      if (gap.ok && *r.gap > b) {
        gap.ok = false;
        gap.detail = fmt_at("k=%d: gap = %.6g > %.6g", r.k, *r.gap, b);
      }
    }
  }
  if (win.ok) win.detail = std::to_string(trace.size()) + " rows";
  if (energy.ok) energy.detail = fmt("sum = %.6g <= %.6g", step_energy, energy_cap);
  if (gap.ok) gap.detail = std::to_string(gaps_checked) + " rows with a gap";

  std::vector<InvariantCheck> out{win};
  if (!ctx.inexact) out.push_back(drift);
  out.push_back(energy);
  if (!ctx.inexact) out.push_back(mass);
  out.push_back(gap);
  return out;
}

std::vector<InvariantCheck> check_result_invariants(const SolverResult& result,
                                                    const Problem& problem, const JointPoint& z0,
                                                    const JointPoint& z_star,
                                                    const TheoryContext& ctx,
                                                    const std::vector<JointPoint>& comparators) {
  std::vector<InvariantCheck> out = check_trace_invariants(result.trace, ctx);

  const double radius = (ctx.inexact ? 8.0 : 7.0) * ctx.dist0;
  InvariantCheck bounded{ctx.inexact ? "||z_k - z*|| <= 8 ||z0 - z*||"
                                     : "||z_k - z*|| <= 7 ||z0 - z*||",
                         true, ""};
  for (std::size_t i = 0; i < result.points.size() && bounded.ok; ++i) {
    const double dist = (result.points[i].coords() - z_star.coords()).norm();
    if (dist > radius) {
      bounded.ok = false;
      bounded.detail = fmt_at("k=%d: %.6g > %.6g", static_cast<int>(i + 1), dist, radius);
    }
  }
  out.push_back(bounded);

  if (!result.points.empty()) {
    std::vector<JointPoint> zs{z_star, z0};
    zs.insert(zs.end(), comparators.begin(), comparators.end());
    InvariantCheck regret{"weighted regret <= ||z0 - z||^2 / 2", true, ""};
    std::vector<Vec> fs;
    fs.reserve(result.points.size());
    for (const JointPoint& p : result.points) fs.push_back(operator_value(problem, p));
    for (const JointPoint& z : zs) {
      double total = 0.0;
      for (std::size_t i = 0; i < result.points.size(); ++i)
        total += result.lambdas[i] * (result.points[i].coords() - z.coords()).dot(fs[i]);
      const double cap = 0.5 * (z0.coords() - z.coords()).squaredNorm() + 1e-6;
      if (total > cap) {
        regret.ok = false;
        regret.detail = fmt("sum = %.6g > %.6g", total, cap);
        break;
      }
    }
    out.push_back(regret);

    const JointPoint avg = average_iterates(std::span<const JointPoint>(result.points),
                                            std::span<const double>(result.lambdas));
    out.push_back({"averaged equals lambda-weighted mean",
                   avg.coords() == result.averaged.coords(), ""});
  }
  return out;
}

bool all_ok(const std::vector<InvariantCheck>& checks) {
  for (const InvariantCheck& c : checks)
    if (!c.ok) return false;
  return true;
}

}  // namespace nmm
