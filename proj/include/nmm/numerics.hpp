#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace nmm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when an operation is called with arguments that break its contract
/// (dimension mismatch, non-positive weights, empty sequences, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, Eigen::Index pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  Eigen::Index pivot() const noexcept { return pivot_; }

 private:
  Eigen::Index pivot_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

using LinearMap = std::function<Vec(const Vec&)>;

/// Dense Gaussian elimination with partial pivoting. A pivot smaller than
/// 1e-14 * ||A||_inf raises SingularMatrixError carrying the column index.
Vec direct_solve(const Mat& a, const Vec& rhs);

struct KrylovResult {
  Vec solution;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
};

/// Restarted GMRES on the operator `apply`. Stops once
/// ||A x - rhs|| <= tol * ||rhs|| or after `max_iters` inner steps.
KrylovResult krylov_solve(const LinearMap& apply, const Vec& rhs, double tol,
                          int restart = 50, int max_iters = 1000);

/// Power iteration on A^T A. `apply_transpose` may be empty when A is
/// symmetric. The estimate never exceeds the true spectral norm.
double spectral_norm(const LinearMap& apply, Eigen::Index dim, int iters,
                     const LinearMap& apply_transpose = {});
double spectral_norm(const Mat& a, int iters = 100);

// Central-difference oracles.
Vec finite_diff_gradient(const std::function<double(const Vec&)>& fn, const Vec& at,
                         double h);
Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& at,
                         double h);

}  // namespace nmm
