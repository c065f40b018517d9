#pragma once

#include <string>

#include "nmm/numerics.hpp"

namespace nmm {

/// The cubic regularized saddle model around an anchor point:
///   m(dz) = dz^T g + 1/2 dz^T H dz + 2 rho ||dx||^3 - 2 rho ||dy||^3,
/// minimized over dx and maximized over dy.
struct CubicSubproblem {
  CubicSubproblem(Vec g, Mat h, double rho, Eigen::Index m, Eigen::Index n);

  double value(const Vec& dz) const;
  Eigen::Index dim() const { return m + n; }

  Vec g;
  Mat h;
  double rho;
  Eigen::Index m;
  Eigen::Index n;
};

/// Point (dx, u, dy, v) of the lifted problem over two second-order cones,
/// stored flat in that order.
struct SOCPoint {
  Vec dx;
  double u = 0.0;
  Vec dy;
  double v = 0.0;

  static SOCPoint from_vector(const Vec& p, Eigen::Index m, Eigen::Index n);
  /// (dx, ||dx||, dy, ||dy||)
  static SOCPoint lift(const Vec& dz, Eigen::Index m);
  Vec to_vector() const;
  Vec dz() const;
  bool feasible() const { return dx.norm() <= u && dy.norm() <= v; }
};

enum class SubproblemStatus { exact, condition2, budget_exhausted };
std::string to_string(SubproblemStatus s);

struct SubproblemSolution {
  Vec dz;
  Vec lifted;  // final SSN iterate in (dx, u, dy, v) layout
  double model_grad_norm = 0.0;
  double residual_norm = 0.0;  // ||E|| at `lifted`
  // ||F + DF dz + 6 rho (||dx|| dx, ||dy|| dy)||; filled in exact mode.
  double step2_residual = 0.0;
  int gmp_iters = 0;
  int ssn_iters = 0;
  SubproblemStatus status = SubproblemStatus::budget_exhausted;
};

/// g + H dz + (6 rho ||dx|| dx, -6 rho ||dy|| dy)
Vec model_gradient(const CubicSubproblem& sp, const Vec& dz);

/// argmin_x { -ell v^T x + ell/2 ||x||^2 + 2 rho ||x||^3 } = lambda v with
/// lambda = 2 ell / (ell + sqrt(ell^2 + 24 rho ell ||v||)).
Vec cubic_prox(const Vec& v, double ell, double rho);

/// 1.01 times a 50-step power-iteration estimate of ||H||, floored at 1e-6.
double gmp_smoothness(const CubicSubproblem& sp);

struct GmpStep {
  Vec half;
  Vec full;
};

/// One generalized mirror-prox step from dz with smoothness constant ell.
GmpStep gmp_iterate(const CubicSubproblem& sp, const Vec& dz, double ell);

struct GmpResult {
  Vec average;  // mean of the half-step iterates
  Vec last;     // last full-step iterate
  int iterations = 0;
  double ell = 0.0;
  double residual_norm = 0.0;  // ||E(lift(average))||
  bool reached_switch = false;
};

/// Runs GMP from `start` until ||E(lift(average))|| <= switch_radius or
/// max_iters steps. ell <= 0 selects gmp_smoothness(sp).
GmpResult gmp_solve(const CubicSubproblem& sp, const Vec& start, int max_iters,
                    double switch_radius, double ell = 0.0);

/// Euclidean projection onto {(wx, wu): ||wx|| <= wu}.
Vec soc_project_cone(const Vec& w);
/// Element of the generalized Jacobian of soc_project_cone. Ties between
/// cases use the middle formula.
Mat soc_projection_jacobian_cone(const Vec& w);

/// Blockwise projection of a flat (dx, u, dy, v) vector onto the product cone.
Vec soc_project(const Vec& w, Eigen::Index m, Eigen::Index n);
Mat soc_projection_jacobian(const Vec& w, Eigen::Index m, Eigen::Index n);

/// The cone-reformulated map G(p) and its Jacobian G'(p).
Vec lifted_operator(const CubicSubproblem& sp, const Vec& p);
Mat lifted_operator_jacobian(const CubicSubproblem& sp, const Vec& p);

/// E(p) = p - P_Z(p - G(p))
Vec residual_E(const CubicSubproblem& sp, const Vec& p);
/// I - J_P(w) (I - G'(p)) with w = p - G(p)
Mat residual_jacobian(const CubicSubproblem& sp, const Vec& p);

struct SsnTarget {
  enum class Mode { exact, condition2 } mode = Mode::exact;
  double kappa_m = 0.1;
  double grad_norm_ref = 0.0;

  static SsnTarget exact() { return {}; }
  static SsnTarget condition2(double kappa_m, double grad_norm_ref) {
    return {Mode::condition2, kappa_m, grad_norm_ref};
  }
};

struct SsnOptions {
  double eta_coef = 1e-2;
  double decrease = 1e-4;
  // Halvings of the Newton step tried before the GMP safeguard step; 0 keeps
  // only the full step.
  int backtrack_steps = 9;
  double krylov_tol = 1e-2;
  Eigen::Index direct_max_dim = 200;
  int budget = 200;
  int gmp_max_iters = 500;
  double exact_tol = 1e-10;
};

/// True when dz meets the target; the Condition 2 check is evaluated verbatim.
bool target_met(const CubicSubproblem& sp, const Vec& dz, const SsnTarget& target,
                const SsnOptions& opts = {});

SubproblemSolution ssn_solve(const CubicSubproblem& sp, const Vec& start, const SsnTarget& target,
                             const SsnOptions& opts = {});

/// GMP warm start until ||E|| <= max(1e-2, 1e-2 ||g||) or opts.gmp_max_iters,
/// then SSN to the target.
SubproblemSolution solve_cubic_subproblem(const CubicSubproblem& sp, const SsnTarget& target,
                                          const SsnOptions& opts = {});

}  // namespace nmm
