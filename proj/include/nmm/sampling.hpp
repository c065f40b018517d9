#pragma once

#include <cstddef>
#include <vector>

#include "nmm/problem.hpp"
#include "nmm/rng.hpp"

namespace nmm {

enum class SamplingScheme { uniform, nonuniform };

struct SamplingPlan {
  SamplingScheme scheme = SamplingScheme::uniform;
  Vec probs;  // length N, sums to 1
  std::size_t sample_size = 1;
  bool with_replacement = true;

  static SamplingPlan uniform(std::size_t count, std::size_t sample_size,
                              bool with_replacement = true);
  static SamplingPlan nonuniform(Vec probs, std::size_t sample_size);
  /// Every component exactly once; reproduces the full Hessian.
  static SamplingPlan full_batch(std::size_t count);

  void validate(std::size_t count) const;
};

/// Indices drawn according to the plan. Draws without replacement are
/// returned in increasing order.
std::vector<std::size_t> draw_indices(const SamplingPlan& plan, Rng& rng);

/// (1/(N|S|)) sum_{i in S} (1/p_i) hess f_i(z) + hess of the deterministic part.
Mat subsampled_hessian(const FiniteSumProblem& fs, const Vec& z, const SamplingPlan& plan, Rng& rng);
/// Same estimator for a given index multiset.
Mat subsampled_hessian(const FiniteSumProblem& fs, const Vec& z, const SamplingPlan& plan,
                       const std::vector<std::size_t>& indices);

/// Sample-size thresholds before rounding up.
double theta_uniform(double b_max, double tau, double delta, Eigen::Index m, Eigen::Index n);
double theta_nonuniform(double b_avg, double tau, double delta, Eigen::Index m, Eigen::Index n);

/// ceil(16 B_max^2 / tau^2 * log(2(m+n)/delta))
std::size_t uniform_sample_size(double b_max, double tau, double delta, Eigen::Index m,
                                Eigen::Index n);
/// ceil(4 B_avg^2 / tau^2 * log(2(m+n)/delta))
std::size_t nonuniform_sample_size(double b_avg, double tau, double delta, Eigen::Index m,
                                   Eigen::Index n);

struct NonuniformProbs {
  Vec probs;
  bool uniform_fallback = false;  // every weight was zero
};

/// p_i proportional to ||f_i''(a_i^T x, b_i^T y)|| (||a_i||^2 + ||b_i||^2).
NonuniformProbs nonuniform_probs(const FiniteSumProblem& fs, const Vec& z);

/// max_i B_i and mean_i B_i^glm (the latter only for GLM problems, else 0).
double max_component_bound(const FiniteSumProblem& fs);
double average_glm_bound(const FiniteSumProblem& fs);

struct TauResult {
  double tau = 0.0;
  bool at_saddle = false;  // grad_norm was zero; tau0 returned
};

/// min{tau0, rho (1 - kappa_m) grad_norm / (4 (kappa_H + 6 rho))}
TauResult tau_rule(double tau0, double kappa_m, double kappa_h, double rho, double grad_norm);

/// Whether 0 < kappa_m < min{1, rho/4} and 0 < tau0 < rho/4.
bool inexact_hypotheses_hold(double kappa_m, double tau0, double rho);

/// 1 - (1 - delta_total)^{1/T}
double per_iteration_delta(double delta_total, int iterations);

}  // namespace nmm
