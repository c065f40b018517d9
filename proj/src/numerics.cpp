#include "nmm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nmm {

Vec direct_solve(const Mat& a, const Vec& rhs) {
  require(a.rows() == a.cols(), "direct_solve: matrix must be square");
  require(a.rows() == rhs.size(), "direct_solve: rhs dimension mismatch");
  const Eigen::Index n = a.rows();
  Mat lu = a;
  Vec b = rhs;
  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();
  const double threshold = 1e-14 * (scale > 0.0 ? scale : 1.0);

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&piv);
    piv += k;
    if (std::abs(lu(piv, k)) <= threshold) {
      throw SingularMatrixError("direct_solve: matrix is singular to working precision at column " +
                                    std::to_string(k),
                                k);
    }
    if (piv != k) {
      lu.row(k).swap(lu.row(piv));
      std::swap(b(k), b(piv));
    }
    const double inv = 1.0 / lu(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) * inv;
      if (factor == 0.0) continue;
      lu.row(i).tail(n - k - 1) -= factor * lu.row(k).tail(n - k - 1);
      b(i) -= factor * b(k);
    }
  }
  Vec x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= lu(i, j) * x(j);
    x(i) = s / lu(i, i);
  }
  return x;
}

KrylovResult krylov_solve(const LinearMap& apply, const Vec& rhs, double tol, int restart,
                          int max_iters) {
  require(tol > 0.0, "krylov_solve: tol must be positive");
  require(restart >= 1 && max_iters >= 1, "krylov_solve: restart and max_iters must be >= 1");
  const Eigen::Index n = rhs.size();
  KrylovResult out;
  out.solution = Vec::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = tol * rhs_norm;
  const int m = static_cast<int>(std::min<Eigen::Index>(restart, n));

  Vec& x = out.solution;
  Vec r = rhs;
  double beta = rhs_norm;
  int total = 0;

  while (total < max_iters) {
    Mat basis(n, m + 1);
    Mat hess = Mat::Zero(m + 1, m);
    std::vector<double> cs(m), sn(m);
    Vec s = Vec::Zero(m + 1);
    s(0) = beta;
    basis.col(0) = r / beta;

    int j = 0;
    for (; j < m && total < max_iters; ++j, ++total) {
      Vec w = apply(basis.col(j));
      require(w.size() == n, "krylov_solve: operator returned wrong dimension");
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis.col(i).dot(w);
        w -= hess(i, j) * basis.col(i);
      }
      hess(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
        hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = t;
      }
      const double denom = std::hypot(hess(j, j), hess(j + 1, j));
      if (denom == 0.0) {
        out.breakdown = true;
        break;
      }
      cs[j] = hess(j, j) / denom;
      sn[j] = hess(j + 1, j) / denom;
      const double next = hess(j + 1, j);
      hess(j, j) = denom;
      hess(j + 1, j) = 0.0;
      s(j + 1) = -sn[j] * s(j);
      s(j) = cs[j] * s(j);

      const bool lucky = next <= 1e-14 * denom;
      if (!lucky) basis.col(j + 1) = w / next;
      if (std::abs(s(j + 1)) <= target || lucky) {
        ++j;
        ++total;
        break;
      }
    }

    if (j > 0) {
      Vec coef = hess.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(s.head(j));
      x += basis.leftCols(j) * coef;
    }
    r = rhs - apply(x);
    beta = r.norm();
    out.iterations = total;
    out.residual_norm = beta;
    if (beta <= target) {
      out.converged = true;
      return out;
    }
    if (out.breakdown) return out;
  }
  return out;
}

double spectral_norm(const LinearMap& apply, Eigen::Index dim, int iters,
                     const LinearMap& apply_transpose) {
  require(iters >= 1, "spectral_norm: iters must be >= 1");
  require(dim >= 1, "spectral_norm: dim must be >= 1");
  const LinearMap& at = apply_transpose ? apply_transpose : apply;
  // Deterministic, generic start vector.
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 3.7 * static_cast<double>(i));
  v.normalize();
  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vec av = apply(v);
    estimate = av.norm();
    Vec w = at(av);
    const double wn = w.norm();
    if (wn == 0.0) return estimate;
    v = w / wn;
  }
  return apply(v).norm();
}

double spectral_norm(const Mat& a, int iters) {
  return spectral_norm([&a](const Vec& v) -> Vec { return a * v; }, a.cols(), iters,
                       [&a](const Vec& v) -> Vec { return a.transpose() * v; });
}

Vec finite_diff_gradient(const std::function<double(const Vec&)>& fn, const Vec& at, double h) {
  require(h > 0.0, "finite_diff_gradient: h must be positive");
  Vec g(at.size());
  Vec p = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    p(i) = at(i) + h;
    const double fp = fn(p);
    p(i) = at(i) - h;
    const double fm = fn(p);
    p(i) = at(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& at, double h) {
  require(h > 0.0, "finite_diff_jacobian: h must be positive");
  const Vec f0 = fn(at);
  Mat jac(f0.size(), at.size());
  Vec p = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    p(i) = at(i) + h;
    const Vec fp = fn(p);
    p(i) = at(i) - h;
    const Vec fm = fn(p);
    p(i) = at(i);
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace nmm
