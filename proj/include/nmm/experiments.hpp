#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmm/libsvm.hpp"
#include "nmm/problems.hpp"
#include "nmm/solvers.hpp"

namespace nmm {

/// Invalid configuration: unknown keys, bad values, missing dataset files,
/// incompatible problem and algorithm.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string kind = "cubic";  // cubic | auc | quadratic | glm
  Eigen::Index n = 50;         // cubic dimension; block size for quadratic and glm
  std::optional<double> rho;   // default 1/(20 n) for cubic, 1/N for auc, 0.1 otherwise
  std::string dataset;         // LIBSVM file for auc; empty selects the a9a-shaped surrogate
  std::size_t subset = 0;      // keep the first rows of the dataset (0 keeps all)
  std::size_t components = 200;
  std::uint64_t instance_seed = 0;  // seed for random instances (b, quadratic, glm, surrogate)
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::string algo = "newton";  // newton | inexact | subsampled | eg | ogda | seg | sogda
  int iterations = 100;
  std::uint64_t seed = 0;
  double kappa_m = 0.1;
  std::optional<double> tau0;
  double delta = 0.01;
  std::string sampling = "uniform";  // uniform | nonuniform | empirical | full
  std::optional<double> step_c;      // first-order step constant
  std::optional<bool> step_decay;    // c / sqrt(k+1); default on for seg and sogda
  std::size_t batch = 0;             // seg/sogda minibatch; 0 selects max(1, N/50)
  int gap_stride = 1;
  bool wall_time = false;
  std::string out;
  std::string format = "csv";
  int reps = 1;

  /// Unknown keys and ill-typed values raise ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

/// Applies one "dotted.key" = value override (used by sweep grids).
void apply_override(nlohmann::json& config, const std::string& dotted_key, const nlohmann::json& value);

struct Instance {
  std::shared_ptr<const Problem> problem;
  const FiniteSumProblem* finite_sum = nullptr;
  std::optional<JointPoint> reference;
  JointPoint z0;
  double rho = 1.0;
  std::string label;
  bool surrogate_data = false;
  bool degenerate = false;

  Instance() : z0(1, 1) {}
};

/// Builds the problem, its start point and (when available) the reference
/// saddle point. AUC references come from auc_reference_saddle.
Instance build_instance(const ExperimentConfig& cfg);

/// Loads, scales and truncates the AUC dataset named by `spec.dataset`.
LibsvmDataset load_auc_dataset(const ProblemSpec& spec, bool* surrogate = nullptr);

/// Inexact-Newton-MinMax with kappa_m = tau0 = rho/8 run until ||F|| <= 1e-10.
JointPoint auc_reference_saddle(const AucProblem& problem, int max_iters = 500);

/// Step bound ell = ||hess f(z*)|| + 7 rho ||z0 - z*|| used by the EG and OGDA
/// baselines on problems with a known saddle.
double first_order_ell(const Problem& problem, const JointPoint& z0, const JointPoint& z_star,
                       double rho);

SolverResult run_algorithm(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed);

struct RunSummary {
  std::string algo;
  std::string status;
  std::string message;
  std::optional<double> final_gap;
  double final_grad_norm = 0.0;
  int iterations = 0;
  long long total_subproblem_iters = 0;
  std::size_t total_samples = 0;
  std::size_t component_evals = 0;
  std::optional<double> wall_time;
  std::optional<double> slope;
  bool theory_hypotheses_hold = true;

  nlohmann::json to_json() const;
};

/// Least-squares slope of log(gap) against log(k) over rows k in [k_min, k_max]
/// with a positive gap; nullopt with fewer than 10 such rows.
std::optional<double> loglog_slope(const std::vector<IterateTrace>& trace, int k_min = 1,
                                   int k_max = 1 << 30);

RunSummary summarize(const std::string& algo, const SolverResult& result);

/// Header object written into JSON traces: config echo, seed, versions.
nlohmann::json trace_header(const ExperimentConfig& cfg, std::uint64_t seed);

struct NamedRun {
  std::string algo;
  SolverResult result;
  double step_c = 0.0;  // first-order step constant actually used
};

struct CubicExperiment {
  std::unique_ptr<CubicBilinear> problem;
  JointPoint z0;
  JointPoint saddle;
  std::vector<NamedRun> runs;

  CubicExperiment() : z0(1, 1), saddle(1, 1) {}
};

/// rho = 1/(20 n), z0 = 0, gap against the analytic saddle with beta = 7 or 8
/// times ||z0 - z*||. Algorithms: newton, inexact, eg, ogda.
CubicExperiment run_cubic_experiment(Eigen::Index n, const std::vector<std::string>& algos,
                                     int iterations, std::uint64_t seed, bool wall_time = false);

struct AucExperiment {
  std::unique_ptr<AucProblem> problem;
  JointPoint z0;
  std::optional<JointPoint> reference;
  bool surrogate_data = false;
  std::vector<NamedRun> runs;

  AucExperiment() : z0(1, 1) {}
};

struct AucOptions {
  int iterations = 200;
  std::uint64_t seed = 0;
  SampleRule sampling = SampleRule::empirical;
  double kappa_m = 0.1;
  double delta = 0.01;
  bool wall_time = false;
  bool with_gap = false;  // needs the reference saddle and one gap solve per recorded row
  int gap_rows = 100;     // approximate number of rows that carry a gap
  std::size_t batch = 0;  // 0 selects max(1, N/50)
  std::vector<double> step_grid = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0, 3.0};
};

/// rho = 1/N from z0 = 0. Second-order runs use the given iteration budget;
/// seg and sogda get the epoch budget of the first second-order run and a
/// step constant c picked from the grid by final grad_norm.
AucExperiment run_auc_experiment(const LibsvmDataset& ds, const std::vector<std::string>& algos,
                                 const AucOptions& opts);

/// Cumulative component-gradient equivalents divided by N.
std::vector<double> epochs(const SolverResult& result, std::size_t num_components);

}  // namespace nmm
