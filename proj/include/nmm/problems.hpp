#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nmm/libsvm.hpp"
#include "nmm/problem.hpp"

namespace nmm {

// (rho/6)||x||^3 and its derivatives. Gradient and Hessian are zero at x = 0.
double cubic_value(const Vec& x, double rho);
Vec cubic_gradient(const Vec& x, double rho);
Mat cubic_hessian(const Vec& x, double rho);

/// f(x, y) = (rho/6)||x||^3 + y^T (A x - b), A upper bidiagonal with +1 on the
/// diagonal and -1 on the superdiagonal.
class CubicBilinear : public Problem {
 public:
  CubicBilinear(Vec b, double rho);

  Eigen::Index dim_x() const override { return b_.size(); }
  Eigen::Index dim_y() const override { return b_.size(); }
  double value(const Vec& z) const override;
  Vec gradient(const Vec& z) const override;
  Mat hessian(const Vec& z) const override;
  std::optional<double> max_over_y_ball(const Vec& x, const Vec& y_center,
                                        double beta) const override;
  std::string name() const override { return "cubic_bilinear"; }

  double rho() const { return rho_; }
  const Vec& b() const { return b_; }
  Mat a() const;
  Vec apply_a(const Vec& x) const;
  Vec apply_a_transpose(const Vec& y) const;

 private:
  Vec b_;
  double rho_;
};

CubicBilinear make_cubic_bilinear(Eigen::Index n, double rho, std::uint64_t seed);

/// x* = A^{-1} b, y* = -(rho/2)||x*|| A^{-T} x*, both by triangular substitution.
JointPoint cubic_bilinear_saddle(const CubicBilinear& inst);

/// f(x, y) = 1/2 x^T P x + x^T Q y - 1/2 y^T R y + c^T x - d^T y.
class QuadraticSaddle : public Problem {
 public:
  QuadraticSaddle(Mat p, Mat q, Mat r, Vec c, Vec d);

  Eigen::Index dim_x() const override { return p_.rows(); }
  Eigen::Index dim_y() const override { return r_.rows(); }
  double value(const Vec& z) const override;
  Vec gradient(const Vec& z) const override;
  Mat hessian(const Vec& z) const override;
  std::string name() const override { return "quadratic_saddle"; }

  /// Solves the linear stationarity system with direct_solve.
  JointPoint saddle() const;

 private:
  Mat p_, q_, r_;
  Vec c_, d_;
};

/// P = L L^T + 0.1 I, R = M M^T + 0.1 I, Q, c, d Gaussian; all seeded.
QuadraticSaddle make_random_cc_quadratic(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

/// Generalized-linear finite sum
///   f_i(x, y) = phi_i(a_i^T x, b_i^T y),
///   phi_i(s, t) = alpha_i s^2/2 + gamma_i s t - delta_i t^2/2 + c_i s - e_i t,
/// plus the deterministic part (mu/2)(||x||^2 - ||y||^2).
class GlmQuadraticSum : public FiniteSumProblem, public GlmStructure {
 public:
  struct Component {
    Vec a, b;
    double alpha = 1.0, gamma = 0.0, delta = 1.0, c = 0.0, e = 0.0;
  };

  GlmQuadraticSum(std::vector<Component> comps, double mu);

  Eigen::Index dim_x() const override { return m_; }
  Eigen::Index dim_y() const override { return n_; }
  std::string name() const override { return "glm_quadratic_sum"; }

  std::size_t num_components() const override { return comps_.size(); }
  double component_value(std::size_t i, const Vec& z) const override;
  void add_component_gradient(std::size_t i, const Vec& z, double weight, Vec& out) const override;
  void add_component_hessian(std::size_t i, const Vec& z, double weight, Mat& out) const override;
  double component_hessian_bound(std::size_t i) const override { return bounds_[i]; }

  double deterministic_value(const Vec& z) const override;
  Vec deterministic_gradient(const Vec& z) const override;
  Mat deterministic_hessian(const Vec& z) const override;

  const GlmStructure* glm() const override { return this; }
  const Vec& glm_a(std::size_t i) const override { return comps_[i].a; }
  const Vec& glm_b(std::size_t i) const override { return comps_[i].b; }
  Eigen::Matrix2d glm_curvature(std::size_t i, double s, double t) const override;
  double glm_bound(std::size_t i) const override;

  /// The Hessian is constant, so the saddle is -H^{-1} grad f(0).
  JointPoint saddle() const;

 private:
  Eigen::Index m_, n_;
  std::vector<Component> comps_;
  double mu_;
  std::vector<double> bounds_;
};

/// Components with Gaussian a_i, b_i whose scale varies across i (so that
/// B_avg < B_max), alpha_i, delta_i in [0.5, 1.5], gamma_i in [-1, 1].
GlmQuadraticSum make_glm_quadratic_sum(std::size_t count, Eigen::Index m, Eigen::Index n,
                                       std::uint64_t seed, double mu = 0.1);

/// AUC maximization in min-max form. x = (theta, u, v) in R^{d+2}, y scalar.
/// Component i carries the squared loss and the y-coupling of sample i; the
/// cubic regularizer and -p(1-p) y^2 form the deterministic part.
class AucProblem : public FiniteSumProblem {
 public:
  AucProblem(const LibsvmDataset& ds, double rho);

  Eigen::Index dim_x() const override { return features_ + 2; }
  Eigen::Index dim_y() const override { return 1; }
  std::string name() const override { return "auc"; }

  std::size_t num_components() const override { return rows_.size(); }
  double component_value(std::size_t i, const Vec& z) const override;
  void add_component_gradient(std::size_t i, const Vec& z, double weight, Vec& out) const override;
  void add_component_hessian(std::size_t i, const Vec& z, double weight, Mat& out) const override;
  double component_hessian_bound(std::size_t i) const override { return bounds_[i]; }

  double deterministic_value(const Vec& z) const override;
  Vec deterministic_gradient(const Vec& z) const override;
  Mat deterministic_hessian(const Vec& z) const override;

  /// Component Hessians are constant, so the sum part is assembled once.
  Mat hessian(const Vec& z) const override;

  std::optional<double> max_over_y_ball(const Vec& x, const Vec& y_center,
                                        double beta) const override;

  double rho() const { return rho_; }
  double p_hat() const { return p_hat_; }
  /// Every label is the same class, so p_hat is 0 or 1.
  bool degenerate() const { return degenerate_; }
  Eigen::Index features() const { return features_; }
  const Vec& row(std::size_t i) const { return rows_[i]; }
  bool positive(std::size_t i) const { return positive_[i]; }

 private:
  double coupling(std::size_t i) const;

  Eigen::Index features_;
  std::vector<Vec> rows_;
  std::vector<bool> positive_;
  double rho_;
  double p_hat_;
  bool degenerate_;
  std::vector<double> bounds_;
  Mat sum_hessian_;
};

AucProblem make_auc_problem(const LibsvmDataset& ds, double rho);

}  // namespace nmm
