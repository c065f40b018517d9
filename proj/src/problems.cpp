#include "nmm/problems.hpp"

#include <algorithm>
#include <cmath>

#include "nmm/rng.hpp"

namespace nmm {

double cubic_value(const Vec& x, double rho) {
  const double r = x.norm();
  return rho / 6.0 * r * r * r;
}

Vec cubic_gradient(const Vec& x, double rho) { return (0.5 * rho * x.norm()) * x; }

Mat cubic_hessian(const Vec& x, double rho) {
  const double r = x.norm();
  Mat h = Mat::Zero(x.size(), x.size());
  if (r == 0.0) return h;
  h.diagonal().setConstant(r);
  h.noalias() += (x * x.transpose()) / r;
  return 0.5 * rho * h;
}

// ---------------------------------------------------------------------------
// Cubic bilinear

CubicBilinear::CubicBilinear(Vec b, double rho) : b_(std::move(b)), rho_(rho) {
  require(b_.size() >= 1, "cubic_bilinear: n must be >= 1");
  require(rho > 0.0, "cubic_bilinear: rho must be positive");
}

Vec CubicBilinear::apply_a(const Vec& x) const {
  const Eigen::Index n = b_.size();
  Vec out = x;
  out.head(n - 1) -= x.tail(n - 1);
  return out;
}

Vec CubicBilinear::apply_a_transpose(const Vec& y) const {
  const Eigen::Index n = b_.size();
  Vec out = y;
  out.tail(n - 1) -= y.head(n - 1);
  return out;
}

Mat CubicBilinear::a() const {
  const Eigen::Index n = b_.size();
  Mat a = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = -1.0;
  return a;
}

double CubicBilinear::value(const Vec& z) const {
  check_point(z);
  const Eigen::Index n = b_.size();
  const Vec x = z.head(n);
  return cubic_value(x, rho_) + z.tail(n).dot(apply_a(x) - b_);
}

Vec CubicBilinear::gradient(const Vec& z) const {
  check_point(z);
  const Eigen::Index n = b_.size();
  const Vec x = z.head(n);
  const Vec y = z.tail(n);
  Vec g(2 * n);
  g.head(n) = cubic_gradient(x, rho_) + apply_a_transpose(y);
  g.tail(n) = apply_a(x) - b_;
  return g;
}

Mat CubicBilinear::hessian(const Vec& z) const {
  check_point(z);
  const Eigen::Index n = b_.size();
  Mat h = Mat::Zero(2 * n, 2 * n);
  h.topLeftCorner(n, n) = cubic_hessian(z.head(n), rho_);
  const Mat a = this->a();
  h.topRightCorner(n, n) = a.transpose();
  h.bottomLeftCorner(n, n) = a;
  return h;
}

std::optional<double> CubicBilinear::max_over_y_ball(const Vec& x, const Vec& y_center,
                                                     double beta) const {
  const Vec r = apply_a(x) - b_;
  return cubic_value(x, rho_) + y_center.dot(r) + beta * r.norm();
}

CubicBilinear make_cubic_bilinear(Eigen::Index n, double rho, std::uint64_t seed) {
  require(n >= 1, "make_cubic_bilinear: n must be >= 1");
  require(rho > 0.0, "make_cubic_bilinear: rho must be positive");
  Rng rng(seed);
  Vec b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = rng.uniform(-1.0, 1.0);
  return CubicBilinear(std::move(b), rho);
}

JointPoint cubic_bilinear_saddle(const CubicBilinear& inst) {
  const Vec& b = inst.b();
  const Eigen::Index n = b.size();
  Vec x(n);
  x(n - 1) = b(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = b(i) + x(i + 1);
  // A^T w = x is lower bidiagonal: forward substitution.
  Vec w(n);
  w(0) = x(0);
  for (Eigen::Index i = 1; i < n; ++i) w(i) = x(i) + w(i - 1);
  const Vec y = (-0.5 * inst.rho() * x.norm()) * w;
  return JointPoint::from_blocks(x, y);
}

// ---------------------------------------------------------------------------
// Convex-concave quadratic

QuadraticSaddle::QuadraticSaddle(Mat p, Mat q, Mat r, Vec c, Vec d)
    : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), c_(std::move(c)), d_(std::move(d)) {
  require(p_.rows() >= 1 && p_.rows() == p_.cols(), "quadratic_saddle: P must be square");
  require(r_.rows() >= 1 && r_.rows() == r_.cols(), "quadratic_saddle: R must be square");
  require(q_.rows() == p_.rows() && q_.cols() == r_.rows(), "quadratic_saddle: Q shape mismatch");
  require(c_.size() == p_.rows() && d_.size() == r_.rows(), "quadratic_saddle: linear term shape mismatch");
}

double QuadraticSaddle::value(const Vec& z) const {
  check_point(z);
  const Vec x = z.head(dim_x());
  const Vec y = z.tail(dim_y());
  return 0.5 * x.dot(p_ * x) + x.dot(q_ * y) - 0.5 * y.dot(r_ * y) + c_.dot(x) - d_.dot(y);
}

Vec QuadraticSaddle::gradient(const Vec& z) const {
  check_point(z);
  const Vec x = z.head(dim_x());
  const Vec y = z.tail(dim_y());
  Vec g(dim());
  g.head(dim_x()) = p_ * x + q_ * y + c_;
  g.tail(dim_y()) = q_.transpose() * x - r_ * y - d_;
  return g;
}

Mat QuadraticSaddle::hessian(const Vec& z) const {
  check_point(z);
  const Eigen::Index m = dim_x();
  const Eigen::Index n = dim_y();
  Mat h(m + n, m + n);
  h << p_, q_, q_.transpose(), -r_;
  return h;
}

JointPoint QuadraticSaddle::saddle() const {
  const Vec zero = Vec::Zero(dim());
  const Vec z = direct_solve(hessian(zero), -gradient(zero));
  return JointPoint(dim_x(), dim_y(), z);
}

QuadraticSaddle make_random_cc_quadratic(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  require(m >= 1 && n >= 1, "make_random_cc_quadratic: m, n must be >= 1");
  Rng rng(seed);
  auto gaussian = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Mat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
    return out;
  };
  const Mat lp = gaussian(m, m) / std::sqrt(static_cast<double>(m));
  const Mat lr = gaussian(n, n) / std::sqrt(static_cast<double>(n));
  Mat p = lp * lp.transpose() + 0.1 * Mat::Identity(m, m);
  Mat r = lr * lr.transpose() + 0.1 * Mat::Identity(n, n);
  Mat q = gaussian(m, n) / std::sqrt(static_cast<double>(m + n));
  Vec c = gaussian(m, 1).col(0);
  Vec d = gaussian(n, 1).col(0);
  return QuadraticSaddle(std::move(p), std::move(q), std::move(r), std::move(c), std::move(d));
}

// ---------------------------------------------------------------------------
// Generalized-linear quadratic sum

namespace {

// Largest |eigenvalue| of the symmetric matrix V K V^T, computed from the
// small matrix G^{1/2} K G^{1/2} with G = V^T V.
double low_rank_norm(const Mat& v, const Mat& k) {
  Eigen::SelfAdjointEigenSolver<Mat> gram(v.transpose() * v);
  const Vec root = gram.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat half = gram.eigenvectors() * root.asDiagonal() * gram.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Mat> inner(half * k * half, Eigen::EigenvaluesOnly);
  return inner.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

GlmQuadraticSum::GlmQuadraticSum(std::vector<Component> comps, double mu)
    : comps_(std::move(comps)), mu_(mu) {
  require(!comps_.empty(), "glm_quadratic_sum: needs at least one component");
  require(mu >= 0.0, "glm_quadratic_sum: mu must be nonnegative");
  m_ = comps_.front().a.size();
  n_ = comps_.front().b.size();
  require(m_ >= 1 && n_ >= 1, "glm_quadratic_sum: a_i and b_i must be nonempty");
  bounds_.reserve(comps_.size());
  for (const Component& c : comps_) {
    require(c.a.size() == m_ && c.b.size() == n_, "glm_quadratic_sum: inconsistent component sizes");
    require(c.alpha >= 0.0 && c.delta >= 0.0, "glm_quadratic_sum: alpha and delta must be nonnegative");
    Mat v = Mat::Zero(m_ + n_, 2);
    v.col(0).head(m_) = c.a;
    v.col(1).tail(n_) = c.b;
    Mat k(2, 2);
    k << c.alpha, c.gamma, c.gamma, -c.delta;
    bounds_.push_back(low_rank_norm(v, k));
  }
}

double GlmQuadraticSum::component_value(std::size_t i, const Vec& z) const {
  const Component& c = comps_[i];
  const double s = c.a.dot(z.head(m_));
  const double t = c.b.dot(z.tail(n_));
  return 0.5 * c.alpha * s * s + c.gamma * s * t - 0.5 * c.delta * t * t + c.c * s - c.e * t;
}

void GlmQuadraticSum::add_component_gradient(std::size_t i, const Vec& z, double weight,
                                             Vec& out) const {
  const Component& c = comps_[i];
  const double s = c.a.dot(z.head(m_));
  const double t = c.b.dot(z.tail(n_));
  out.head(m_) += (weight * (c.alpha * s + c.gamma * t + c.c)) * c.a;
  out.tail(n_) += (weight * (c.gamma * s - c.delta * t - c.e)) * c.b;
}

void GlmQuadraticSum::add_component_hessian(std::size_t i, const Vec& /*z*/, double weight,
                                            Mat& out) const {
  const Component& c = comps_[i];
  out.topLeftCorner(m_, m_).noalias() += (weight * c.alpha) * c.a * c.a.transpose();
  out.topRightCorner(m_, n_).noalias() += (weight * c.gamma) * c.a * c.b.transpose();
  out.bottomLeftCorner(n_, m_).noalias() += (weight * c.gamma) * c.b * c.a.transpose();
  out.bottomRightCorner(n_, n_).noalias() -= (weight * c.delta) * c.b * c.b.transpose();
}

double GlmQuadraticSum::deterministic_value(const Vec& z) const {
  return 0.5 * mu_ * (z.head(m_).squaredNorm() - z.tail(n_).squaredNorm());
}

Vec GlmQuadraticSum::deterministic_gradient(const Vec& z) const {
  Vec g = mu_ * z;
  g.tail(n_) *= -1.0;
  return g;
}

Mat GlmQuadraticSum::deterministic_hessian(const Vec& /*z*/) const {
  Mat h = Mat::Zero(m_ + n_, m_ + n_);
  h.diagonal().head(m_).setConstant(mu_);
  h.diagonal().tail(n_).setConstant(-mu_);
  return h;
}

Eigen::Matrix2d GlmQuadraticSum::glm_curvature(std::size_t i, double /*s*/, double /*t*/) const {
  const Component& c = comps_[i];
  Eigen::Matrix2d k;
  k << c.alpha, c.gamma, c.gamma, -c.delta;
  return k;
}

double GlmQuadraticSum::glm_bound(std::size_t i) const {
  const Component& c = comps_[i];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(glm_curvature(i, 0.0, 0.0),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff() * (c.a.squaredNorm() + c.b.squaredNorm());
}

JointPoint GlmQuadraticSum::saddle() const {
  const Vec zero = Vec::Zero(m_ + n_);
  return JointPoint(m_, n_, direct_solve(hessian(zero), -gradient(zero)));
}

GlmQuadraticSum make_glm_quadratic_sum(std::size_t count, Eigen::Index m, Eigen::Index n,
                                       std::uint64_t seed, double mu) {
  require(count >= 1, "make_glm_quadratic_sum: count must be >= 1");
  require(m >= 1 && n >= 1, "make_glm_quadratic_sum: m, n must be >= 1");
  Rng rng(seed);
  std::vector<GlmQuadraticSum::Component> comps(count);
  for (auto& c : comps) {
    const double u = rng.uniform();
    const double scale = 0.3 + 1.7 * u * u;
    c.a.resize(m);
    c.b.resize(n);
    for (Eigen::Index j = 0; j < m; ++j) c.a(j) = scale * rng.normal() / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < n; ++j) c.b(j) = scale * rng.normal() / std::sqrt(static_cast<double>(n));
    c.alpha = rng.uniform(0.5, 1.5);
    c.delta = rng.uniform(0.5, 1.5);
    c.gamma = rng.uniform(-1.0, 1.0);
    c.c = 0.5 * rng.normal();
    c.e = 0.5 * rng.normal();
  }
  return GlmQuadraticSum(std::move(comps), mu);
}

// ---------------------------------------------------------------------------
// AUC maximization

AucProblem::AucProblem(const LibsvmDataset& ds, double rho)
    : features_(ds.num_features), rho_(rho) {
  require(!ds.empty(), "auc: dataset has no rows");
  require(ds.num_features >= 1, "auc: dataset has no features");
  require(rho > 0.0, "auc: rho must be positive");
  const std::size_t count = ds.size();
  rows_.reserve(count);
  positive_.reserve(count);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Vec a = Vec::Zero(features_);
    for (const auto& [idx, val] : ds.rows[i]) {
      require(idx >= 1 && idx <= features_, "auc: feature index out of range");
      a(idx - 1) = val;
    }
    rows_.push_back(std::move(a));
    const bool pos = ds.labels[i] > 0;
    positive_.push_back(pos);
    positives += pos ? 1 : 0;
  }
  p_hat_ = static_cast<double>(positives) / static_cast<double>(count);
  degenerate_ = positives == 0 || positives == count;

  // Component Hessians are constant: 2c [w1 w1^T + s (w2 e_y^T + e_y w2^T)]
  // with w1 = (a, -e_uv), w2 = (a, 0) and e_y the y coordinate.
  const Eigen::Index d = features_;
  bounds_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double c = positive_[i] ? 1.0 - p_hat_ : p_hat_;
    const double s = positive_[i] ? -1.0 : 1.0;
    Mat v = Mat::Zero(d + 3, 3);
    v.col(0).head(d) = rows_[i];
    v(positive_[i] ? d : d + 1, 0) = -1.0;
    v.col(1).head(d) = rows_[i];
    v(d + 2, 2) = 1.0;
    Mat k = Mat::Zero(3, 3);
    k(0, 0) = 2.0 * c;
    k(1, 2) = k(2, 1) = 2.0 * c * s;
    bounds_.push_back(low_rank_norm(v, k));
  }

  sum_hessian_ = Mat::Zero(d + 3, d + 3);
  const Vec zero = Vec::Zero(d + 3);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) add_component_hessian(i, zero, w, sum_hessian_);
}

double AucProblem::coupling(std::size_t i) const {
  return positive_[i] ? -(1.0 - p_hat_) : p_hat_;
}

double AucProblem::component_value(std::size_t i, const Vec& z) const {
  const Eigen::Index d = features_;
  const double s = rows_[i].dot(z.head(d));
  const double y = z(d + 2);
  const double c = positive_[i] ? 1.0 - p_hat_ : p_hat_;
  const double shift = positive_[i] ? z(d) : z(d + 1);
  return c * (s - shift) * (s - shift) + 2.0 * (1.0 + y) * coupling(i) * s;
}

void AucProblem::add_component_gradient(std::size_t i, const Vec& z, double weight,
                                        Vec& out) const {
  const Eigen::Index d = features_;
  const double s = rows_[i].dot(z.head(d));
  const double y = z(d + 2);
  const double c = positive_[i] ? 1.0 - p_hat_ : p_hat_;
  const Eigen::Index k = positive_[i] ? d : d + 1;
  const double resid = s - z(k);
  out.head(d) += (weight * (2.0 * c * resid + 2.0 * (1.0 + y) * coupling(i))) * rows_[i];
  out(k) -= weight * 2.0 * c * resid;
  out(d + 2) += weight * 2.0 * coupling(i) * s;
}

void AucProblem::add_component_hessian(std::size_t i, const Vec& /*z*/, double weight,
                                       Mat& out) const {
  const Eigen::Index d = features_;
  const double c = positive_[i] ? 1.0 - p_hat_ : p_hat_;
  const Eigen::Index k = positive_[i] ? d : d + 1;
  const Vec& a = rows_[i];
  out.topLeftCorner(d, d).noalias() += (weight * 2.0 * c) * a * a.transpose();
  out.col(k).head(d) -= (weight * 2.0 * c) * a;
  out.row(k).head(d) -= (weight * 2.0 * c) * a.transpose();
  out(k, k) += weight * 2.0 * c;
  out.col(d + 2).head(d) += (weight * 2.0 * coupling(i)) * a;
  out.row(d + 2).head(d) += (weight * 2.0 * coupling(i)) * a.transpose();
}

double AucProblem::deterministic_value(const Vec& z) const {
  const Eigen::Index d = features_;
  const double y = z(d + 2);
  return cubic_value(z.head(d + 2), rho_) - p_hat_ * (1.0 - p_hat_) * y * y;
}

Vec AucProblem::deterministic_gradient(const Vec& z) const {
  const Eigen::Index d = features_;
  Vec g(d + 3);
  g.head(d + 2) = cubic_gradient(z.head(d + 2), rho_);
  g(d + 2) = -2.0 * p_hat_ * (1.0 - p_hat_) * z(d + 2);
  return g;
}

Mat AucProblem::deterministic_hessian(const Vec& z) const {
  const Eigen::Index d = features_;
  Mat h = Mat::Zero(d + 3, d + 3);
  h.topLeftCorner(d + 2, d + 2) = cubic_hessian(z.head(d + 2), rho_);
  h(d + 2, d + 2) = -2.0 * p_hat_ * (1.0 - p_hat_);
  return h;
}

Mat AucProblem::hessian(const Vec& z) const {
  check_point(z);
  return sum_hessian_ + deterministic_hessian(z);
}

std::optional<double> AucProblem::max_over_y_ball(const Vec& x, const Vec& y_center,
                                                  double beta) const {
  // f(x, y) = base + slope * y - q y^2 on the interval [yc - beta, yc + beta].
  Vec z(features_ + 3);
  z.head(features_ + 2) = x;
  z(features_ + 2) = 0.0;
  const double base = value(z);
  const double slope = sum_gradient(z)(features_ + 2);
  const double q = p_hat_ * (1.0 - p_hat_);
  const double lo = y_center(0) - beta;
  const double hi = y_center(0) + beta;
  double y;
  if (q > 0.0) {
    y = std::clamp(slope / (2.0 * q), lo, hi);
  } else {
    y = slope >= 0.0 ? hi : lo;
  }
  return base + slope * y - q * y * y;
}

AucProblem make_auc_problem(const LibsvmDataset& ds, double rho) { return AucProblem(ds, rho); }

}  // namespace nmm
