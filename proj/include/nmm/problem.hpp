#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "nmm/joint_point.hpp"
#include "nmm/numerics.hpp"

namespace nmm {

/// A smooth convex-concave function f(x, y) on R^m x R^n.
///
/// Coordinates are passed as the stacked vector z = [x; y]. `gradient`
/// returns the plain gradient (grad_x f, grad_y f), not the saddle operator.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;
  Eigen::Index dim() const { return dim_x() + dim_y(); }

  virtual double value(const Vec& z) const = 0;
  virtual Vec gradient(const Vec& z) const = 0;
  virtual Mat hessian(const Vec& z) const = 0;

  // Closed-form inner solves for the restricted gap, when the problem has
  // them: max of f(x, .) over the ball B(y_center, beta), and min of f(., y)
  // over B(x_center, beta).
  virtual std::optional<double> max_over_y_ball(const Vec& /*x*/, const Vec& /*y_center*/,
                                                double /*beta*/) const {
    return std::nullopt;
  }
  virtual std::optional<double> min_over_x_ball(const Vec& /*y*/, const Vec& /*x_center*/,
                                                double /*beta*/) const {
    return std::nullopt;
  }

  virtual std::string name() const = 0;

  void check_point(const Vec& z) const {
    require(z.size() == dim(), name() + ": point dimension " + std::to_string(z.size()) +
                                   " does not match problem dimension " + std::to_string(dim()));
  }
  void check_point(const JointPoint& z) const {
    require(z.m() == dim_x() && z.n() == dim_y(), name() + ": block dimensions do not match");
  }
};

/// Access to the generalized-linear structure f_i(a_i^T x, b_i^T y).
class GlmStructure {
 public:
  virtual ~GlmStructure() = default;
  virtual const Vec& glm_a(std::size_t i) const = 0;
  virtual const Vec& glm_b(std::size_t i) const = 0;
  /// 2x2 second derivative of the scalar f_i at (s, t) = (a_i^T x, b_i^T y).
  virtual Eigen::Matrix2d glm_curvature(std::size_t i, double s, double t) const = 0;
  /// B_i >= sup ||f_i''|| (||a_i||^2 + ||b_i||^2).
  virtual double glm_bound(std::size_t i) const = 0;
};

/// f(z) = (1/N) sum_i f_i(z) + deterministic_part(z).
///
/// The deterministic part is never sampled; subsampled Hessians add its exact
/// Hessian to the importance-weighted component average.
class FiniteSumProblem : public Problem {
 public:
  virtual std::size_t num_components() const = 0;

  virtual double component_value(std::size_t i, const Vec& z) const = 0;
  /// out += weight * grad f_i(z)
  virtual void add_component_gradient(std::size_t i, const Vec& z, double weight, Vec& out) const = 0;
  /// out += weight * hess f_i(z)
  virtual void add_component_hessian(std::size_t i, const Vec& z, double weight, Mat& out) const = 0;
  /// Bound B_i on ||hess f_i|| over the region the solvers visit.
  virtual double component_hessian_bound(std::size_t i) const = 0;

  virtual double deterministic_value(const Vec& /*z*/) const { return 0.0; }
  virtual Vec deterministic_gradient(const Vec& /*z*/) const { return Vec::Zero(dim()); }
  virtual Mat deterministic_hessian(const Vec& /*z*/) const { return Mat::Zero(dim(), dim()); }

  virtual const GlmStructure* glm() const { return nullptr; }

  double sum_value(const Vec& z) const;
  Vec sum_gradient(const Vec& z) const;
  Mat sum_hessian(const Vec& z) const;

  double value(const Vec& z) const override { return sum_value(z) + deterministic_value(z); }
  Vec gradient(const Vec& z) const override { return sum_gradient(z) + deterministic_gradient(z); }
  Mat hessian(const Vec& z) const override { return sum_hessian(z) + deterministic_hessian(z); }
};

}  // namespace nmm
