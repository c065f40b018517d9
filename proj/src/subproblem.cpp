#include "nmm/subproblem.hpp"

#include <algorithm>
#include <cmath>

namespace nmm {

CubicSubproblem::CubicSubproblem(Vec g_, Mat h_, double rho_, Eigen::Index m_, Eigen::Index n_)
    : g(std::move(g_)), h(std::move(h_)), rho(rho_), m(m_), n(n_) {
  require(m >= 1 && n >= 1, "cubic subproblem: block dimensions must be >= 1");
  require(g.size() == m + n, "cubic subproblem: gradient length must be m + n");
  require(h.rows() == m + n && h.cols() == m + n, "cubic subproblem: H must be (m+n) x (m+n)");
  require(rho >= 0.0, "cubic subproblem: rho must be nonnegative");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  require((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "cubic subproblem: H must be symmetric");
}

double CubicSubproblem::value(const Vec& dz) const {
  const double rx = dz.head(m).norm();
  const double ry = dz.tail(n).norm();
  return dz.dot(g) + 0.5 * dz.dot(h * dz) + 2.0 * rho * (rx * rx * rx - ry * ry * ry);
}

SOCPoint SOCPoint::from_vector(const Vec& p, Eigen::Index m, Eigen::Index n) {
  require(p.size() == m + n + 2, "SOCPoint: vector length must be m + n + 2");
  SOCPoint out;
  out.dx = p.head(m);
  out.u = p(m);
  out.dy = p.segment(m + 1, n);
  out.v = p(m + n + 1);
  return out;
}

SOCPoint SOCPoint::lift(const Vec& dz, Eigen::Index m) {
  SOCPoint out;
  out.dx = dz.head(m);
  out.u = out.dx.norm();
  out.dy = dz.tail(dz.size() - m);
  out.v = out.dy.norm();
  return out;
}

Vec SOCPoint::to_vector() const {
  Vec p(dx.size() + dy.size() + 2);
  p << dx, u, dy, v;
  return p;
}

Vec SOCPoint::dz() const {
  Vec out(dx.size() + dy.size());
  out << dx, dy;
  return out;
}

std::string to_string(SubproblemStatus s) {
  switch (s) {
    case SubproblemStatus::exact:
      return "exact";
    case SubproblemStatus::condition2:
      return "condition2";
    case SubproblemStatus::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

Vec model_gradient(const CubicSubproblem& sp, const Vec& dz) {
  require(dz.size() == sp.dim(), "model_gradient: dimension mismatch");
  Vec out = sp.g + sp.h * dz;
  const auto dx = dz.head(sp.m);
  const auto dy = dz.tail(sp.n);
  out.head(sp.m) += (6.0 * sp.rho * dx.norm()) * dx;
  out.tail(sp.n) -= (6.0 * sp.rho * dy.norm()) * dy;
  return out;
}

Vec cubic_prox(const Vec& v, double ell, double rho) {
  require(ell > 0.0, "cubic_prox: ell must be positive");
  require(rho >= 0.0, "cubic_prox: rho must be nonnegative");
  const double nv = v.norm();
  if (nv == 0.0) return Vec::Zero(v.size());
  const double lambda = 2.0 * ell / (ell + std::sqrt(ell * ell + 24.0 * rho * ell * nv));
  return lambda * v;
}

double gmp_smoothness(const CubicSubproblem& sp) {
  return std::max(1.01 * spectral_norm(sp.h, 50), 1e-6);
}

GmpStep gmp_iterate(const CubicSubproblem& sp, const Vec& dz, double ell) {
  require(dz.size() == sp.dim(), "gmp_iterate: dimension mismatch");
  const Eigen::Index m = sp.m;
  const Eigen::Index n = sp.n;
  GmpStep out;
  out.half.resize(m + n);
  out.full.resize(m + n);

  const Vec grad = sp.g + sp.h * dz;
  out.half.head(m) = cubic_prox(dz.head(m) - grad.head(m) / ell, ell, sp.rho);
  out.half.tail(n) = cubic_prox(dz.tail(n) + grad.tail(n) / ell, ell, sp.rho);

  const Vec grad_half = sp.g + sp.h * out.half;
  out.full.head(m) = cubic_prox(dz.head(m) - grad_half.head(m) / ell, ell, sp.rho);
  out.full.tail(n) = cubic_prox(dz.tail(n) + grad_half.tail(n) / ell, ell, sp.rho);
  return out;
}

GmpResult gmp_solve(const CubicSubproblem& sp, const Vec& start, int max_iters,
                    double switch_radius, double ell) {
  require(max_iters >= 1, "gmp_solve: max_iters must be >= 1");
  require(switch_radius > 0.0, "gmp_solve: switch radius must be positive");
  require(start.size() == sp.dim(), "gmp_solve: dimension mismatch");
  GmpResult out;
  out.ell = ell > 0.0 ? ell : gmp_smoothness(sp);
  Vec sum = Vec::Zero(sp.dim());
  Vec dz = start;
  for (int j = 1; j <= max_iters; ++j) {
    GmpStep step = gmp_iterate(sp, dz, out.ell);
    sum += step.half;
    dz = std::move(step.full);
    out.iterations = j;
    out.average = sum / static_cast<double>(j);
    out.residual_norm = residual_E(sp, SOCPoint::lift(out.average, sp.m).to_vector()).norm();
    if (out.residual_norm <= switch_radius) {
      out.reached_switch = true;
      break;
    }
  }
  out.last = dz;
  return out;
}

Vec soc_project_cone(const Vec& w) {
  const Eigen::Index k = w.size() - 1;
  const auto wx = w.head(k);
  const double wu = w(k);
  const double r = wx.norm();
  if (wu >= r) return w;
  if (wu <= -r) return Vec::Zero(w.size());
  const double scale = 0.5 * (1.0 + wu / r);
  Vec out(w.size());
  out.head(k) = scale * wx;
  out(k) = scale * r;
  return out;
}

Mat soc_projection_jacobian_cone(const Vec& w) {
  const Eigen::Index k = w.size() - 1;
  const auto wx = w.head(k);
  const double wu = w(k);
  const double r = wx.norm();
  if (r == 0.0) {
    if (wu > 0.0) return Mat::Identity(k + 1, k + 1);
    if (wu < 0.0) return Mat::Zero(k + 1, k + 1);
    return 0.5 * Mat::Identity(k + 1, k + 1);
  }
  if (wu > r) return Mat::Identity(k + 1, k + 1);
  if (wu < -r) return Mat::Zero(k + 1, k + 1);
  Mat j(k + 1, k + 1);
  const Vec e = wx / r;
  j.topLeftCorner(k, k) = (1.0 + wu / r) * Mat::Identity(k, k) - (wu / r) * e * e.transpose();
  j.topRightCorner(k, 1) = e;
  j.bottomLeftCorner(1, k) = e.transpose();
  j(k, k) = 1.0;
  return 0.5 * j;
}

Vec soc_project(const Vec& w, Eigen::Index m, Eigen::Index n) {
  require(w.size() == m + n + 2, "soc_project: vector length must be m + n + 2");
  Vec out(m + n + 2);
  out.head(m + 1) = soc_project_cone(w.head(m + 1));
  out.tail(n + 1) = soc_project_cone(w.tail(n + 1));
  return out;
}

Mat soc_projection_jacobian(const Vec& w, Eigen::Index m, Eigen::Index n) {
  require(w.size() == m + n + 2, "soc_projection_jacobian: vector length must be m + n + 2");
  Mat j = Mat::Zero(m + n + 2, m + n + 2);
  j.topLeftCorner(m + 1, m + 1) = soc_projection_jacobian_cone(w.head(m + 1));
  j.bottomRightCorner(n + 1, n + 1) = soc_projection_jacobian_cone(w.tail(n + 1));
  return j;
}

Vec lifted_operator(const CubicSubproblem& sp, const Vec& p) {
  const Eigen::Index m = sp.m;
  const Eigen::Index n = sp.n;
  require(p.size() == m + n + 2, "lifted_operator: vector length must be m + n + 2");
  Vec dz(m + n);
  dz << p.head(m), p.segment(m + 1, n);
  const Vec grad = sp.g + sp.h * dz;
  const double u = p(m);
  const double v = p(m + n + 1);
  Vec out(m + n + 2);
  out << grad.head(m), 6.0 * sp.rho * u * u, -grad.tail(n), 6.0 * sp.rho * v * v;
  return out;
}

Mat lifted_operator_jacobian(const CubicSubproblem& sp, const Vec& p) {
  const Eigen::Index m = sp.m;
  const Eigen::Index n = sp.n;
  require(p.size() == m + n + 2, "lifted_operator_jacobian: vector length must be m + n + 2");
  Mat gp = Mat::Zero(m + n + 2, m + n + 2);
  gp.block(0, 0, m, m) = sp.h.topLeftCorner(m, m);
  gp.block(0, m + 1, m, n) = sp.h.topRightCorner(m, n);
  gp.block(m + 1, 0, n, m) = -sp.h.bottomLeftCorner(n, m);
  gp.block(m + 1, m + 1, n, n) = -sp.h.bottomRightCorner(n, n);
  gp(m, m) = 12.0 * sp.rho * p(m);
  gp(m + n + 1, m + n + 1) = 12.0 * sp.rho * p(m + n + 1);
  return gp;
}

Vec residual_E(const CubicSubproblem& sp, const Vec& p) {
  return p - soc_project(p - lifted_operator(sp, p), sp.m, sp.n);
}

Mat residual_jacobian(const CubicSubproblem& sp, const Vec& p) {
  const Vec w = p - lifted_operator(sp, p);
  const Mat jp = soc_projection_jacobian(w, sp.m, sp.n);
  Mat inner = -lifted_operator_jacobian(sp, p);
  inner.diagonal().array() += 1.0;
  Mat out = -jp * inner;
  out.diagonal().array() += 1.0;
  return out;
}

bool target_met(const CubicSubproblem& sp, const Vec& dz, const SsnTarget& target,
                const SsnOptions& opts) {
  const double gn = model_gradient(sp, dz).norm();
  if (target.mode == SsnTarget::Mode::exact) return gn <= opts.exact_tol * (1.0 + sp.g.norm());
  return gn <= target.kappa_m * std::min(dz.squaredNorm(), target.grad_norm_ref);
}

namespace {

SubproblemStatus success_status(const SsnTarget& target) {
  return target.mode == SsnTarget::Mode::exact ? SubproblemStatus::exact
                                               : SubproblemStatus::condition2;
}

Vec blocks_of(const Vec& p, Eigen::Index m, Eigen::Index n) {
  Vec dz(m + n);
  dz << p.head(m), p.segment(m + 1, n);
  return dz;
}

Vec newton_direction(const Mat& jac, const Vec& rhs, const SsnOptions& opts) {
  if (jac.rows() <= opts.direct_max_dim) {
    try {
      return direct_solve(jac, rhs);
    } catch (const SingularMatrixError&) {
      // fall through to the Krylov solver
    }
  }
  const KrylovResult kr =
      krylov_solve([&jac](const Vec& x) -> Vec { return jac * x; }, rhs, opts.krylov_tol, 50,
                   std::max<int>(200, static_cast<int>(4 * jac.rows())));
  return kr.solution;
}

}  // namespace

SubproblemSolution ssn_solve(const CubicSubproblem& sp, const Vec& start, const SsnTarget& target,
                             const SsnOptions& opts) {
  const Eigen::Index m = sp.m;
  const Eigen::Index n = sp.n;
  require(start.size() == m + n + 2, "ssn_solve: start must have length m + n + 2");
  require(opts.budget >= 0, "ssn_solve: budget must be nonnegative");
  if (target.mode == SsnTarget::Mode::condition2)
    require(target.kappa_m > 0.0 && target.kappa_m < 1.0, "ssn_solve: kappa_m must lie in (0, 1)");

  SubproblemSolution out;
  Vec p = start;
  double ell = 0.0;
  Vec best_p = p;
  double best_grad = INFINITY;

  for (int it = 0;; ++it) {
    const Vec dz = blocks_of(p, m, n);
    const double gn = model_gradient(sp, dz).norm();
    if (gn < best_grad) {
      best_grad = gn;
      best_p = p;
    }
    if (target_met(sp, dz, target, opts)) {
      best_p = p;
      out.status = success_status(target);
      break;
    }
    if (it >= opts.budget) {
      out.status = SubproblemStatus::budget_exhausted;
      break;
    }
    ++out.ssn_iters;

    const Vec e = residual_E(sp, p);
    const double ne = e.norm();
    bool accepted = false;
    if (ne > 0.0) {
      Mat jac = residual_jacobian(sp, p);
      jac.diagonal().array() += opts.eta_coef * ne;
      const Vec d = newton_direction(jac, -e, opts);
      if (d.allFinite()) {
        double t = 1.0;
        for (int ls = 0; ls <= opts.backtrack_steps && !accepted; ++ls, t *= 0.5) {
          Vec trial = p + t * d;
          if (residual_E(sp, trial).norm() <= (1.0 - opts.decrease) * ne) {
            p = std::move(trial);
            accepted = true;
          }
        }
      }
    }
    if (!accepted) {
      if (ell == 0.0) ell = gmp_smoothness(sp);
      p = SOCPoint::lift(gmp_iterate(sp, dz, ell).full, m).to_vector();
    }
  }

  out.lifted = best_p;
  out.dz = blocks_of(best_p, m, n);
  out.model_grad_norm = model_gradient(sp, out.dz).norm();
  out.residual_norm = residual_E(sp, best_p).norm();
  return out;
}

SubproblemSolution solve_cubic_subproblem(const CubicSubproblem& sp, const SsnTarget& target,
                                          const SsnOptions& opts) {
  const Eigen::Index m = sp.m;
  const double gnorm = sp.g.norm();
  SubproblemSolution out;
  if (gnorm == 0.0) {
    out.dz = Vec::Zero(sp.dim());
    out.lifted = Vec::Zero(sp.dim() + 2);
    out.status = success_status(target);
    return out;
  }
  const double gamma = std::max(1e-2, 1e-2 * gnorm);
  const GmpResult warm = gmp_solve(sp, Vec::Zero(sp.dim()), opts.gmp_max_iters, gamma);
  out = ssn_solve(sp, SOCPoint::lift(warm.average, m).to_vector(), target, opts);
  out.gmp_iters = warm.iterations;
  if (target.mode == SsnTarget::Mode::exact) {
    // F + DF dz + 6 rho (||dx|| dx, ||dy|| dy) is the model gradient with the
    // y block negated.
    Vec r = model_gradient(sp, out.dz);
    r.tail(sp.n) *= -1.0;
    out.step2_residual = r.norm();
  }
  return out;
}

}  // namespace nmm
