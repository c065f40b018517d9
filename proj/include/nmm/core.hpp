#pragma once

#include <span>
#include <vector>

#include "nmm/joint_point.hpp"
#include "nmm/problem.hpp"

namespace nmm {

/// F(z) = (grad_x f(z), -grad_y f(z)).
Vec operator_value(const Problem& problem, const JointPoint& z);
Vec operator_value(const Problem& problem, const Vec& z);

/// DF(z) = diag(I_m, -I_n) * hess f(z).
Mat operator_jacobian(const Problem& problem, const JointPoint& z);
Mat operator_jacobian(const Problem& problem, const Vec& z);

/// Flip the sign of the y-block in place: turns grad f into F and back.
void flip_y_block(Vec& v, Eigen::Index m);

/// Weighted ergodic average (sum w_i z_i) / (sum w_i).
JointPoint average_iterates(std::span<const JointPoint> points, std::span<const double> weights);

/// Incremental form of average_iterates; accumulates in the same order so the
/// final result is bitwise identical.
class RunningAverage {
 public:
  RunningAverage(Eigen::Index m, Eigen::Index n) : m_(m), n_(n), sum_(Vec::Zero(m + n)) {}
  void add(const Vec& z, double weight);
  bool empty() const { return total_weight_ == 0.0; }
  double total_weight() const { return total_weight_; }
  JointPoint value() const;

 private:
  Eigen::Index m_, n_;
  Vec sum_;
  double total_weight_ = 0.0;
};

struct GapConfig {
  double beta = 1.0;
  int inner_iters = 2000;
  double inner_tol = 1e-9;
};

/// Restricted gap together with the quality of the inner solves. The value is
/// always the best found; `converged` is false when an inner solve ran out of
/// budget before its projected-gradient residual met `inner_tol`.
struct GapResult {
  double value = 0.0;
  double max_term = 0.0;
  double min_term = 0.0;
  double residual = 0.0;
  bool converged = true;
};

/// max_{y in B(y*, beta)} f(x_hat, y) - min_{x in B(x*, beta)} f(x, y_hat)
GapResult restricted_gap(const Problem& problem, const JointPoint& candidate,
                         const JointPoint& center, const GapConfig& cfg);

/// (sum w_i (z_i - z)^T F(z_i)) / (sum w_i)
double weighted_regret(const Problem& problem, std::span<const JointPoint> points,
                       std::span<const double> weights, const JointPoint& comparator);

/// Euclidean projection onto B(center, radius).
Vec project_ball(const Vec& w, const Vec& center, double radius);

}  // namespace nmm
