#include "nmm/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace nmm {

void flip_y_block(Vec& v, Eigen::Index m) { v.tail(v.size() - m) *= -1.0; }

Vec operator_value(const Problem& problem, const Vec& z) {
  problem.check_point(z);
  Vec g = problem.gradient(z);
  flip_y_block(g, problem.dim_x());
  return g;
}

Vec operator_value(const Problem& problem, const JointPoint& z) {
  problem.check_point(z);
  return operator_value(problem, z.coords());
}

Mat operator_jacobian(const Problem& problem, const Vec& z) {
  problem.check_point(z);
  Mat h = problem.hessian(z);
  const Eigen::Index m = problem.dim_x();
  h.bottomRows(h.rows() - m) *= -1.0;
  return h;
}

Mat operator_jacobian(const Problem& problem, const JointPoint& z) {
  problem.check_point(z);
  return operator_jacobian(problem, z.coords());
}

void RunningAverage::add(const Vec& z, double weight) {
  require(weight > 0.0, "average_iterates: weights must be positive");
  require(z.size() == m_ + n_, "average_iterates: point dimension mismatch");
  sum_ += weight * z;
  total_weight_ += weight;
}

JointPoint RunningAverage::value() const {
  require(total_weight_ > 0.0, "average_iterates: empty sequence");
  return JointPoint(m_, n_, sum_ / total_weight_);
}

JointPoint average_iterates(std::span<const JointPoint> points, std::span<const double> weights) {
  require(!points.empty(), "average_iterates: empty sequence");
  require(points.size() == weights.size(), "average_iterates: points and weights differ in length");
  RunningAverage avg(points.front().m(), points.front().n());
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].same_shape(points.front()), "average_iterates: inconsistent block dimensions");
    avg.add(points[i].coords(), weights[i]);
  }
  return avg.value();
}

double weighted_regret(const Problem& problem, std::span<const JointPoint> points,
                       std::span<const double> weights, const JointPoint& comparator) {
  require(!points.empty(), "weighted_regret: empty sequence");
  require(points.size() == weights.size(), "weighted_regret: points and weights differ in length");
  problem.check_point(comparator);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(weights[i] > 0.0, "weighted_regret: weights must be positive");
    problem.check_point(points[i]);
    const Vec f = operator_value(problem, points[i].coords());
    num += weights[i] * (points[i].coords() - comparator.coords()).dot(f);
    den += weights[i];
  }
  return num / den;
}

Vec project_ball(const Vec& w, const Vec& center, double radius) {
  const Vec d = w - center;
  const double dn = d.norm();
  return center + (radius / std::max(radius, dn)) * d;
}

namespace {

struct InnerSolve {
  double value = 0.0;
  double residual = 0.0;
  bool converged = false;
};

// Minimizes a smooth convex function over B(center, beta) by accelerated
// projected gradient with backtracking on the smoothness estimate and
// gradient-based restarts. Starts from the center.
InnerSolve ball_minimize(const std::function<double(const Vec&)>& fval,
                         const std::function<Vec(const Vec&)>& fgrad, double lipschitz_guess,
                         const Vec& center, double beta, const GapConfig& cfg) {
  double lip = std::max(lipschitz_guess, 1e-12);
  Vec x = center;
  double fx = fval(x);
  Vec y = x;
  double t = 1.0;
  InnerSolve out;
  out.value = fx;
  out.residual = INFINITY;

  for (int it = 0; it < cfg.inner_iters; ++it) {
    const Vec gy = fgrad(y);
    const double fy = fval(y);
    Vec x_next;
    double f_next = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = project_ball(y - gy / lip, center, beta);
      f_next = fval(x_next);
      const Vec step = x_next - y;
      const double model = fy + gy.dot(step) + 0.5 * lip * step.squaredNorm();
      if (f_next <= model + 1e-15 * std::max(1.0, std::abs(fy))) break;
      lip *= 2.0;
    }
    // Gradient-mapping residual at the new point.
    const Vec gx = fgrad(x_next);
    const double residual = lip * (x_next - project_ball(x_next - gx / lip, center, beta)).norm();

    if (f_next < out.value) out.value = f_next;
    out.residual = std::min(out.residual, residual);
    if (residual <= cfg.inner_tol) {
      out.value = std::min(out.value, f_next);
      out.converged = true;
      return out;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((y - x_next).dot(x_next - x) > 0.0) {
      // Momentum points uphill: restart.
      y = x_next;
      t = 1.0;
    } else {
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = x_next;
    fx = f_next;
  }
  return out;
}

// Smoothness guess for a block of the Hessian over a ball: largest spectral
// norm seen at the center and at the boundary point farthest from the origin.
double block_smoothness(const Problem& problem, const Vec& base, Eigen::Index offset,
                        Eigen::Index len, const Vec& center, double beta) {
  double best = 0.0;
  Vec probe = base;
  const double cn = center.norm();
  std::vector<Vec> points{center};
  if (cn > 0.0) points.push_back(center + (beta / cn) * center);
  for (const Vec& p : points) {
    probe.segment(offset, len) = p;
    const Mat h = problem.hessian(probe).block(offset, offset, len, len);
    best = std::max(best, 1.01 * spectral_norm(h, 50));
  }
  return best;
}

}  // namespace

GapResult restricted_gap(const Problem& problem, const JointPoint& candidate,
                         const JointPoint& center, const GapConfig& cfg) {
  problem.check_point(candidate);
  problem.check_point(center);
  require(cfg.beta > 0.0, "restricted_gap: beta must be positive");
  require(cfg.inner_iters >= 1, "restricted_gap: inner_iters must be >= 1");
  require(cfg.inner_tol > 0.0, "restricted_gap: inner_tol must be positive");

  const Eigen::Index m = problem.dim_x();
  const Eigen::Index n = problem.dim_y();
  const Vec x_hat = candidate.x();
  const Vec y_hat = candidate.y();
  const Vec x_star = center.x();
  const Vec y_star = center.y();

  GapResult out;

  // max over y of f(x_hat, y)
  if (auto closed = problem.max_over_y_ball(x_hat, y_star, cfg.beta)) {
    out.max_term = *closed;
  } else {
    Vec z(m + n);
    z.head(m) = x_hat;
    auto fval = [&](const Vec& y) {
      z.tail(n) = y;
      return -problem.value(z);
    };
    auto fgrad = [&](const Vec& y) -> Vec {
      z.tail(n) = y;
      return -problem.gradient(z).tail(n);
    };
    z.tail(n) = y_star;
    const double lip = block_smoothness(problem, z, m, n, y_star, cfg.beta);
    const InnerSolve s = ball_minimize(fval, fgrad, lip, y_star, cfg.beta, cfg);
    out.max_term = -s.value;
    out.residual = std::max(out.residual, s.residual);
    out.converged = out.converged && s.converged;
  }

  // min over x of f(x, y_hat)
  if (auto closed = problem.min_over_x_ball(y_hat, x_star, cfg.beta)) {
    out.min_term = *closed;
  } else {
    Vec z(m + n);
    z.tail(n) = y_hat;
    auto fval = [&](const Vec& x) {
      z.head(m) = x;
      return problem.value(z);
    };
    auto fgrad = [&](const Vec& x) -> Vec {
      z.head(m) = x;
      return problem.gradient(z).head(m);
    };
    z.head(m) = x_star;
    const double lip = block_smoothness(problem, z, 0, m, x_star, cfg.beta);
    const InnerSolve s = ball_minimize(fval, fgrad, lip, x_star, cfg.beta, cfg);
    out.min_term = s.value;
    out.residual = std::max(out.residual, s.residual);
    out.converged = out.converged && s.converged;
  }

  out.value = out.max_term - out.min_term;
  return out;
}

}  // namespace nmm
