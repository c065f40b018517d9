#include "nmm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nmm {

SamplingPlan SamplingPlan::uniform(std::size_t count, std::size_t sample_size,
                                   bool with_replacement) {
  require(count >= 1, "sampling: component count must be >= 1");
  SamplingPlan plan;
  plan.scheme = SamplingScheme::uniform;
  plan.probs = Vec::Constant(static_cast<Eigen::Index>(count), 1.0 / static_cast<double>(count));
  plan.sample_size = sample_size;
  plan.with_replacement = with_replacement;
  plan.validate(count);
  return plan;
}

SamplingPlan SamplingPlan::nonuniform(Vec probs, std::size_t sample_size) {
  SamplingPlan plan;
  plan.scheme = SamplingScheme::nonuniform;
  plan.probs = std::move(probs);
  plan.sample_size = sample_size;
  plan.with_replacement = true;
  plan.validate(static_cast<std::size_t>(plan.probs.size()));
  return plan;
}

SamplingPlan SamplingPlan::full_batch(std::size_t count) { return uniform(count, count, false); }

void SamplingPlan::validate(std::size_t count) const {
  require(count >= 1, "sampling: component count must be >= 1");
  require(static_cast<std::size_t>(probs.size()) == count, "sampling: probs length must equal N");
  require(sample_size >= 1, "sampling: sample size must be >= 1");
  require((probs.array() >= 0.0).all(), "sampling: probabilities must be nonnegative");
  require(std::abs(probs.sum() - 1.0) <= 1e-12 * static_cast<double>(count),
          "sampling: probabilities must sum to 1");
  if (!with_replacement) {
    require(scheme == SamplingScheme::uniform, "sampling: nonuniform plans draw with replacement");
    require(sample_size <= count, "sampling: sample size exceeds N without replacement");
  }
}

std::vector<std::size_t> draw_indices(const SamplingPlan& plan, Rng& rng) {
  const std::size_t count = static_cast<std::size_t>(plan.probs.size());
  plan.validate(count);
  std::vector<std::size_t> out;
  out.reserve(plan.sample_size);
  if (!plan.with_replacement) {
    // Partial Fisher-Yates, then sorted so summation order is canonical.
    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < plan.sample_size; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(count - k));
      std::swap(perm[k], perm[j]);
    }
    out.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(plan.sample_size));
    std::sort(out.begin(), out.end());
    return out;
  }
  if (plan.scheme == SamplingScheme::uniform) {
    for (std::size_t k = 0; k < plan.sample_size; ++k) out.push_back(rng.below(count));
    return out;
  }
  std::vector<double> cumulative(count);
  std::partial_sum(plan.probs.data(), plan.probs.data() + count, cumulative.begin());
  const double total = cumulative.back();
  for (std::size_t k = 0; k < plan.sample_size; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= count) {
      // u rounded up to the total: take the last index with positive mass.
      idx = count - 1;
      while (idx > 0 && plan.probs(static_cast<Eigen::Index>(idx)) == 0.0) --idx;
    }
    out.push_back(idx);
  }
  return out;
}

Mat subsampled_hessian(const FiniteSumProblem& fs, const Vec& z, const SamplingPlan& plan,
                       const std::vector<std::size_t>& indices) {
  fs.check_point(z);
  const std::size_t count = fs.num_components();
  plan.validate(count);
  require(!indices.empty(), "subsampled_hessian: empty sample");
  Mat h = Mat::Zero(fs.dim(), fs.dim());
  const double s = static_cast<double>(indices.size());
  const double n = static_cast<double>(count);
  for (std::size_t i : indices) {
    require(i < count, "subsampled_hessian: index out of range");
    const double w = plan.scheme == SamplingScheme::uniform
                         ? 1.0 / s
                         : 1.0 / (n * s * plan.probs(static_cast<Eigen::Index>(i)));
    fs.add_component_hessian(i, z, w, h);
  }
  h += fs.deterministic_hessian(z);
  // Accumulation order can leave the two triangles a rounding error apart.
  return 0.5 * (h + h.transpose());
}

Mat subsampled_hessian(const FiniteSumProblem& fs, const Vec& z, const SamplingPlan& plan, Rng& rng) {
  return subsampled_hessian(fs, z, plan, draw_indices(plan, rng));
}

namespace {

void check_size_args(double bound, double tau, double delta, Eigen::Index m, Eigen::Index n) {
  require(bound > 0.0, "sample size: bound must be positive");
  require(tau > 0.0, "sample size: tau must be positive");
  require(delta > 0.0 && delta < 1.0, "sample size: delta must lie in (0, 1)");
  require(m >= 1 && n >= 1, "sample size: m, n must be >= 1");
}

std::size_t ceil_size(double v) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

}  // namespace

double theta_uniform(double b_max, double tau, double delta, Eigen::Index m, Eigen::Index n) {
  check_size_args(b_max, tau, delta, m, n);
  return 16.0 * b_max * b_max / (tau * tau) * std::log(2.0 * static_cast<double>(m + n) / delta);
}

double theta_nonuniform(double b_avg, double tau, double delta, Eigen::Index m, Eigen::Index n) {
  check_size_args(b_avg, tau, delta, m, n);
  return 4.0 * b_avg * b_avg / (tau * tau) * std::log(2.0 * static_cast<double>(m + n) / delta);
}

std::size_t uniform_sample_size(double b_max, double tau, double delta, Eigen::Index m,
                                Eigen::Index n) {
  return ceil_size(theta_uniform(b_max, tau, delta, m, n));
}

std::size_t nonuniform_sample_size(double b_avg, double tau, double delta, Eigen::Index m,
                                   Eigen::Index n) {
  return ceil_size(theta_nonuniform(b_avg, tau, delta, m, n));
}

NonuniformProbs nonuniform_probs(const FiniteSumProblem& fs, const Vec& z) {
  const GlmStructure* glm = fs.glm();
  require(glm != nullptr, "nonuniform_probs: problem has no generalized-linear structure");
  fs.check_point(z);
  const std::size_t count = fs.num_components();
  const Eigen::Index m = fs.dim_x();
  const Eigen::Index n = fs.dim_y();
  NonuniformProbs out;
  out.probs.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Vec& a = glm->glm_a(i);
    const Vec& b = glm->glm_b(i);
    const Eigen::Matrix2d k = glm->glm_curvature(i, a.dot(z.head(m)), b.dot(z.tail(n)));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(k, Eigen::EigenvaluesOnly);
    out.probs(static_cast<Eigen::Index>(i)) =
        eig.eigenvalues().cwiseAbs().maxCoeff() * (a.squaredNorm() + b.squaredNorm());
  }
  const double total = out.probs.sum();
  if (total > 0.0) {
    out.probs /= total;
  } else {
    out.probs.setConstant(1.0 / static_cast<double>(count));
    out.uniform_fallback = true;
  }
  return out;
}

double max_component_bound(const FiniteSumProblem& fs) {
  double best = 0.0;
  for (std::size_t i = 0; i < fs.num_components(); ++i)
    best = std::max(best, fs.component_hessian_bound(i));
  return best;
}

double average_glm_bound(const FiniteSumProblem& fs) {
  const GlmStructure* glm = fs.glm();
  if (glm == nullptr || fs.num_components() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < fs.num_components(); ++i) total += glm->glm_bound(i);
  return total / static_cast<double>(fs.num_components());
}

TauResult tau_rule(double tau0, double kappa_m, double kappa_h, double rho, double grad_norm) {
  require(tau0 > 0.0, "tau_rule: tau0 must be positive");
  require(kappa_m > 0.0 && kappa_m < 1.0, "tau_rule: kappa_m must lie in (0, 1)");
  require(kappa_h > 0.0, "tau_rule: kappa_H must be positive");
  require(rho > 0.0, "tau_rule: rho must be positive");
  require(grad_norm >= 0.0, "tau_rule: grad_norm must be nonnegative");
  if (grad_norm == 0.0) return {tau0, true};
  const double forced = rho * (1.0 - kappa_m) * grad_norm / (4.0 * (kappa_h + 6.0 * rho));
  return {std::min(tau0, forced), false};
}

bool inexact_hypotheses_hold(double kappa_m, double tau0, double rho) {
  return kappa_m > 0.0 && kappa_m < std::min(1.0, rho / 4.0) && tau0 > 0.0 && tau0 < rho / 4.0;
}

double per_iteration_delta(double delta_total, int iterations) {
  require(delta_total > 0.0 && delta_total < 1.0, "per_iteration_delta: delta must lie in (0, 1)");
  require(iterations >= 1, "per_iteration_delta: T must be >= 1");
  return -std::expm1(std::log1p(-delta_total) / static_cast<double>(iterations));
}

}  // namespace nmm
