#include "nmm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "nmm/sampling.hpp"

namespace nmm {

namespace {

using nlohmann::json;

const char* const kVersion = "0.1.0";

template <typename T>
T get_field(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError("unknown config field '" + where + it.key() + "'");
  }
}

bool is_second_order(const std::string& algo) {
  return algo == "newton" || algo == "inexact" || algo == "subsampled";
}

bool is_stochastic(const std::string& algo) { return algo == "seg" || algo == "sogda"; }

std::size_t default_batch(std::size_t count) { return std::max<std::size_t>(1, count / 50); }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"problem", "algo", "iterations", "seed", "kappa_m", "tau0", "delta", "sampling",
                  "step_c", "step_decay", "batch", "gap_stride", "wall_time", "out", "format", "reps"},
                 "");
  ExperimentConfig c;
  if (j.contains("problem")) {
    const json& p = j.at("problem");
    if (!p.is_object()) throw ConfigError("config field 'problem' must be an object");
    reject_unknown(p, {"kind", "n", "rho", "dataset", "subset", "components", "instance_seed"},
                   "problem.");
    c.problem.kind = get_field<std::string>(p, "kind", c.problem.kind);
    c.problem.n = get_field<Eigen::Index>(p, "n", c.problem.n);
    c.problem.rho = get_optional<double>(p, "rho");
    c.problem.dataset = get_field<std::string>(p, "dataset", c.problem.dataset);
    c.problem.subset = get_field<std::size_t>(p, "subset", c.problem.subset);
    c.problem.components = get_field<std::size_t>(p, "components", c.problem.components);
    c.problem.instance_seed = get_field<std::uint64_t>(p, "instance_seed", c.problem.instance_seed);
  }
  c.algo = get_field<std::string>(j, "algo", c.algo);
  c.iterations = get_field<int>(j, "iterations", c.iterations);
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.kappa_m = get_field<double>(j, "kappa_m", c.kappa_m);
  c.tau0 = get_optional<double>(j, "tau0");
  c.delta = get_field<double>(j, "delta", c.delta);
  c.sampling = get_field<std::string>(j, "sampling", c.sampling);
  c.step_c = get_optional<double>(j, "step_c");
  c.step_decay = get_optional<bool>(j, "step_decay");
  c.batch = get_field<std::size_t>(j, "batch", c.batch);
  c.gap_stride = get_field<int>(j, "gap_stride", c.gap_stride);
  c.wall_time = get_field<bool>(j, "wall_time", c.wall_time);
  c.out = get_field<std::string>(j, "out", c.out);
  c.format = get_field<std::string>(j, "format", c.format);
  c.reps = get_field<int>(j, "reps", c.reps);
  return c;
}

json ExperimentConfig::to_json() const {
  json p{{"kind", problem.kind},
         {"n", problem.n},
         {"rho", problem.rho ? json(*problem.rho) : json(nullptr)},
         {"dataset", problem.dataset},
         {"subset", problem.subset},
         {"components", problem.components},
         {"instance_seed", problem.instance_seed}};
  return json{{"problem", p},
              {"algo", algo},
              {"iterations", iterations},
              {"seed", seed},
              {"kappa_m", kappa_m},
              {"tau0", tau0 ? json(*tau0) : json(nullptr)},
              {"delta", delta},
              {"sampling", sampling},
              {"step_c", step_c ? json(*step_c) : json(nullptr)},
              {"step_decay", step_decay ? json(*step_decay) : json(nullptr)},
              {"batch", batch},
              {"gap_stride", gap_stride},
              {"wall_time", wall_time},
              {"out", out},
              {"format", format},
              {"reps", reps}};
}

void ExperimentConfig::validate() const {
  const std::string& k = problem.kind;
  if (k != "cubic" && k != "auc" && k != "quadratic" && k != "glm")
    throw ConfigError("unknown problem kind '" + k + "' (expected cubic, auc, quadratic or glm)");
  static const std::vector<std::string> algos{"newton", "inexact", "subsampled", "eg",
                                              "ogda",   "seg",     "sogda"};
  if (std::find(algos.begin(), algos.end(), algo) == algos.end())
    throw ConfigError("unknown algorithm '" + algo +
                      "' (expected newton, inexact, subsampled, eg, ogda, seg or sogda)");
  const bool finite_sum = k == "auc" || k == "glm";
  if ((algo == "subsampled" || is_stochastic(algo)) && !finite_sum)
    throw ConfigError("algorithm '" + algo + "' needs a finite-sum problem (auc or glm)");
  try {
    const SampleRule rule = parse_sample_rule(sampling);
    if (algo == "subsampled" && rule == SampleRule::nonuniform && k != "glm")
      throw ConfigError("nonuniform sampling needs generalized-linear components; '" + k +
                        "' has none");
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (gap_stride < 1) throw ConfigError("gap_stride must be >= 1");
  if (problem.n < 1 || (k == "cubic" && problem.n < 2)) throw ConfigError("problem.n is too small");
  if (problem.rho && !(*problem.rho > 0.0)) throw ConfigError("problem.rho must be positive");
  if (!(kappa_m > 0.0 && kappa_m < 1.0)) throw ConfigError("kappa_m must lie in (0, 1)");
  if (tau0 && !(*tau0 > 0.0)) throw ConfigError("tau0 must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (step_c && !(*step_c > 0.0)) throw ConfigError("step_c must be positive");
  if (k == "glm" && problem.components < 1) throw ConfigError("problem.components must be >= 1");
  if (k == "auc" && !problem.dataset.empty() && !std::filesystem::exists(problem.dataset))
    throw ConfigError("dataset file '" + problem.dataset + "' does not exist");
}

void apply_override(json& config, const std::string& dotted_key, const json& value) {
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("bad override key '" + dotted_key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

LibsvmDataset load_auc_dataset(const ProblemSpec& spec, bool* surrogate) {
  LibsvmDataset raw;
  if (spec.dataset.empty()) {
    raw = make_a9a_like(spec.subset > 0 ? spec.subset : 500, spec.instance_seed);
    if (surrogate != nullptr) *surrogate = true;
  } else {
    if (!std::filesystem::exists(spec.dataset))
      throw ConfigError("dataset file '" + spec.dataset + "' does not exist");
    try {
      raw = parse_libsvm(spec.dataset);
    } catch (const LibsvmParseError& e) {
      throw ConfigError(spec.dataset + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    if (surrogate != nullptr) *surrogate = false;
  }
  if (spec.subset > 0) raw = raw.head(spec.subset);
  if (raw.empty()) throw ConfigError("dataset has no rows");
  return scale_features(raw);
}

JointPoint auc_reference_saddle(const AucProblem& problem, int max_iters) {
  SolverConfig cfg;
  cfg.rho = problem.rho();
  cfg.iterations = max_iters;
  cfg.kappa_m = problem.rho() / 8.0;
  cfg.tau0 = problem.rho() / 8.0;
  cfg.stop_tol = 1e-10;
  const SolverResult r =
      inexact_newton_minmax(problem, JointPoint(problem.dim_x(), problem.dim_y()), cfg);
  require(r.status != SolverStatus::aborted, "auc_reference_saddle: " + r.message);
  // The saddle is the last leading point; the average lags behind it.
  return r.last;
}

double first_order_ell(const Problem& problem, const JointPoint& z0, const JointPoint& z_star,
                       double rho) {
  const double d = (z0.coords() - z_star.coords()).norm();
  return std::max(spectral_norm(problem.hessian(z_star.coords())) + 7.0 * rho * d, 1e-12);
}

Instance build_instance(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProblemSpec& spec = cfg.problem;
  Instance inst;
  if (spec.kind == "cubic") {
    const double rho = spec.rho.value_or(1.0 / (20.0 * static_cast<double>(spec.n)));
    auto p = std::make_shared<CubicBilinear>(make_cubic_bilinear(spec.n, rho, spec.instance_seed));
    inst.reference = cubic_bilinear_saddle(*p);
    inst.z0 = JointPoint(spec.n, spec.n);
    inst.rho = rho;
    inst.label = "cubic_bilinear n=" + std::to_string(spec.n);
    inst.problem = std::move(p);
  } else if (spec.kind == "quadratic") {
    auto p = std::make_shared<QuadraticSaddle>(
        make_random_cc_quadratic(spec.n, spec.n, spec.instance_seed));
    inst.reference = p->saddle();
    inst.z0 = JointPoint(spec.n, spec.n);
    inst.rho = spec.rho.value_or(0.1);
    inst.label = "quadratic n=" + std::to_string(spec.n);
    inst.problem = std::move(p);
  } else if (spec.kind == "glm") {
    auto p = std::make_shared<GlmQuadraticSum>(
        make_glm_quadratic_sum(spec.components, spec.n, spec.n, spec.instance_seed));
    inst.reference = p->saddle();
    inst.z0 = JointPoint(spec.n, spec.n);
    inst.rho = spec.rho.value_or(0.1);
    inst.label = "glm_quadratic_sum N=" + std::to_string(spec.components);
    inst.finite_sum = p.get();
    inst.problem = std::move(p);
  } else {
    bool surrogate = false;
    const LibsvmDataset ds = load_auc_dataset(spec, &surrogate);
    const double rho = spec.rho.value_or(1.0 / static_cast<double>(ds.size()));
    auto p = std::make_shared<AucProblem>(ds, rho);
    inst.z0 = JointPoint(p->dim_x(), p->dim_y());
    inst.rho = rho;
    inst.surrogate_data = surrogate;
    inst.degenerate = p->degenerate();
    inst.label = std::string("auc ") + (surrogate ? "a9a-shaped surrogate" : ds.name) +
                 " N=" + std::to_string(ds.size());
    if (!p->degenerate()) inst.reference = auc_reference_saddle(*p);
    inst.finite_sum = p.get();
    inst.problem = std::move(p);
  }
  return inst;
}

SolverResult run_algorithm(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed) {
  const Problem& p = *inst.problem;
  if (is_second_order(cfg.algo)) {
    SolverConfig sc;
    sc.rho = inst.rho;
    sc.iterations = cfg.iterations;
    sc.kappa_m = cfg.kappa_m;
    sc.tau0 = cfg.tau0;
    sc.delta = cfg.delta;
    sc.seed = seed;
    sc.reference = inst.reference;
    sc.gap_stride = cfg.gap_stride;
    sc.wall_time = cfg.wall_time;
    if (cfg.algo == "newton") return newton_minmax(p, inst.z0, sc);
    if (cfg.algo == "inexact") return inexact_newton_minmax(p, inst.z0, sc);
    SubsampleConfig ss;
    ss.rule = parse_sample_rule(cfg.sampling);
    return subsampled_newton_minmax(*inst.finite_sum, inst.z0, sc, ss);
  }
  FirstOrderConfig fc;
  fc.iterations = cfg.iterations;
  fc.seed = seed;
  fc.reference = inst.reference;
  fc.gap_stride = cfg.gap_stride;
  fc.wall_time = cfg.wall_time;
  if (inst.reference) fc.beta = 7.0 * (inst.z0.coords() - inst.reference->coords()).norm();
  double ell = 1.0;
  if (inst.reference) ell = first_order_ell(p, inst.z0, *inst.reference, inst.rho);
  const bool decay = cfg.step_decay.value_or(is_stochastic(cfg.algo));
  fc.step = StepRule{cfg.step_c.value_or(1.0 / (2.0 * ell)), decay};
  // EG keeps a constant step; an explicit step_c overrides lambda = 1/(2 ell).
  if (cfg.algo == "eg") return eg_solve(p, inst.z0, 1.0 / (2.0 * fc.step.c), cfg.iterations, fc);
  if (cfg.algo == "ogda") return ogda_solve(p, inst.z0, fc);
  fc.batch = cfg.batch > 0 ? cfg.batch : default_batch(inst.finite_sum->num_components());
  if (cfg.algo == "seg") return seg_solve(*inst.finite_sum, inst.z0, fc);
  return sogda_solve(*inst.finite_sum, inst.z0, fc);
}

json RunSummary::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"algo", algo},
              {"status", status},
              {"message", message},
              {"final_gap", opt(final_gap)},
              {"final_grad_norm", final_grad_norm},
              {"iterations", iterations},
              {"total_subproblem_iters", total_subproblem_iters},
              {"total_samples", total_samples},
              {"component_evals", component_evals},
              {"wall_time", opt(wall_time)},
              {"slope", opt(slope)},
              {"theory_hypotheses_hold", theory_hypotheses_hold}};
}

std::optional<double> loglog_slope(const std::vector<IterateTrace>& trace, int k_min, int k_max) {
  std::vector<double> xs, ys;
  for (const IterateTrace& r : trace) {
    if (r.k < k_min || r.k > k_max || !r.gap || !(*r.gap > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(r.k)));
    ys.push_back(std::log(*r.gap));
  }
  if (xs.size() < 10) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

RunSummary summarize(const std::string& algo, const SolverResult& result) {
  RunSummary s;
  s.algo = algo;
  s.status = to_string(result.status);
  s.message = result.message;
  s.iterations = static_cast<int>(result.trace.size());
  s.theory_hypotheses_hold = result.theory_hypotheses_hold;
  for (const IterateTrace& r : result.trace) {
    s.total_subproblem_iters += r.subproblem_iters;
    s.total_samples += r.samples;
  }
  if (!result.trace.empty()) {
    const IterateTrace& last = result.trace.back();
    s.final_gap = last.gap;
    s.final_grad_norm = last.grad_norm;
    s.component_evals = last.component_evals;
    s.wall_time = last.wall_time;
  }
  s.slope = loglog_slope(result.trace);
  return s;
}

json trace_header(const ExperimentConfig& cfg, std::uint64_t seed) {
  return json{{"config", cfg.to_json()},
              {"seed", seed},
              {"versions",
               {{"newton_minmax", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)}}}};
}

CubicExperiment run_cubic_experiment(Eigen::Index n, const std::vector<std::string>& algos,
                                     int iterations, std::uint64_t seed, bool wall_time) {
  require(n >= 2, "run_cubic_experiment: n must be >= 2");
  CubicExperiment ex;
  const double rho = 1.0 / (20.0 * static_cast<double>(n));
  ex.problem = std::make_unique<CubicBilinear>(make_cubic_bilinear(n, rho, seed));
  ex.saddle = cubic_bilinear_saddle(*ex.problem);
  ex.z0 = JointPoint(n, n);
  const double d = (ex.z0.coords() - ex.saddle.coords()).norm();
  for (const std::string& algo : algos) {
    NamedRun run{algo, SolverResult(n, n), 0.0};
    if (algo == "newton" || algo == "inexact") {
      SolverConfig cfg;
      cfg.rho = rho;
      cfg.iterations = iterations;
      cfg.reference = ex.saddle;
      cfg.wall_time = wall_time;
      run.result = algo == "newton" ? newton_minmax(*ex.problem, ex.z0, cfg)
                                    : inexact_newton_minmax(*ex.problem, ex.z0, cfg);
    } else if (algo == "eg" || algo == "ogda") {
      const double ell = first_order_ell(*ex.problem, ex.z0, ex.saddle, rho);
      FirstOrderConfig fc;
      fc.reference = ex.saddle;
      fc.beta = 7.0 * d;
      fc.wall_time = wall_time;
      fc.iterations = iterations;
      fc.step = StepRule{1.0 / (2.0 * ell), false};
      run.step_c = fc.step.c;
      run.result = algo == "eg" ? eg_solve(*ex.problem, ex.z0, ell, iterations, fc)
                                : ogda_solve(*ex.problem, ex.z0, fc);
    } else {
      throw ConfigError("algorithm '" + algo + "' is not part of the cubic experiment");
    }
    ex.runs.push_back(std::move(run));
  }
  return ex;
}

AucExperiment run_auc_experiment(const LibsvmDataset& ds, const std::vector<std::string>& algos,
                                 const AucOptions& opts) {
  if (ds.empty()) throw ConfigError("AUC dataset has no rows");
  AucExperiment ex;
  const double rho = 1.0 / static_cast<double>(ds.size());
  ex.problem = std::make_unique<AucProblem>(ds, rho);
  if (ex.problem->degenerate())
    throw ConfigError("AUC dataset has a single class; p_hat is " +
                      std::to_string(ex.problem->p_hat()));
  if (opts.sampling == SampleRule::nonuniform)
    throw ConfigError("nonuniform sampling needs generalized-linear components; AUC has none");
  ex.z0 = JointPoint(ex.problem->dim_x(), ex.problem->dim_y());
  if (opts.with_gap) ex.reference = auc_reference_saddle(*ex.problem);
  const std::size_t count = ex.problem->num_components();
  const double beta_d =
      ex.reference ? (ex.z0.coords() - ex.reference->coords()).norm() : 0.0;
  const auto stride = [&](int iters) { return std::max(1, iters / std::max(1, opts.gap_rows)); };

  std::size_t epoch_budget = 0;  // component evaluations of the first second-order run
  for (const std::string& algo : algos) {
    if (algo != "inexact" && algo != "subsampled") continue;
    SolverConfig cfg;
    cfg.rho = rho;
    cfg.iterations = opts.iterations;
    cfg.kappa_m = opts.kappa_m;
    cfg.delta = opts.delta;
    cfg.seed = opts.seed;
    cfg.wall_time = opts.wall_time;
    cfg.reference = ex.reference;
    cfg.gap_stride = stride(opts.iterations);
    NamedRun run{algo, SolverResult(ex.z0.m(), ex.z0.n()), 0.0};
    if (algo == "inexact") {
      run.result = inexact_newton_minmax(*ex.problem, ex.z0, cfg);
    } else {
      SubsampleConfig ss;
      ss.rule = opts.sampling;
      run.result = subsampled_newton_minmax(*ex.problem, ex.z0, cfg, ss);
    }
    if (epoch_budget == 0 && !run.result.trace.empty())
      epoch_budget = run.result.trace.back().component_evals;
    ex.runs.push_back(std::move(run));
  }
  if (epoch_budget == 0) epoch_budget = static_cast<std::size_t>(opts.iterations) * 3 * count;

  const std::size_t batch = opts.batch > 0 ? opts.batch : default_batch(count);
  for (const std::string& algo : algos) {
    if (algo == "inexact" || algo == "subsampled") continue;
    if (!is_stochastic(algo)) throw ConfigError("algorithm '" + algo + "' is not part of the AUC experiment");
    // seg draws two minibatches per iteration, sogda one.
    const std::size_t per_iter = (algo == "seg" ? 2 : 1) * std::min(batch, count);
    const int iters = static_cast<int>(std::max<std::size_t>(1, epoch_budget / per_iter));
    FirstOrderConfig fc;
    fc.iterations = iters;
    fc.batch = batch;
    fc.seed = opts.seed;
    fc.wall_time = opts.wall_time;
    const auto solve = [&](const FirstOrderConfig& c) {
      return algo == "seg" ? seg_solve(*ex.problem, ex.z0, c) : sogda_solve(*ex.problem, ex.z0, c);
    };
    double best_c = opts.step_grid.front();
    double best_norm = std::numeric_limits<double>::infinity();
    for (double c : opts.step_grid) {
      FirstOrderConfig trial = fc;
      trial.step = StepRule{c, true};
      const SolverResult r = solve(trial);
      const double g = r.trace.back().grad_norm;
      if (std::isfinite(g) && g < best_norm) {
        best_norm = g;
        best_c = c;
      }
    }
    fc.step = StepRule{best_c, true};
    fc.reference = ex.reference;
    fc.beta = 8.0 * beta_d;
    fc.gap_stride = stride(iters);
    ex.runs.push_back(NamedRun{algo, solve(fc), best_c});
  }
  return ex;
}

std::vector<double> epochs(const SolverResult& result, std::size_t num_components) {
  std::vector<double> out;
  out.reserve(result.trace.size());
  for (const IterateTrace& r : result.trace)
    out.push_back(static_cast<double>(r.component_evals) / static_cast<double>(num_components));
  return out;
}

}  // namespace nmm
