#include "nmm/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "nmm/experiments.hpp"
#include "nmm/invariants.hpp"
#include "nmm/subproblem.hpp"
#include "nmm/trace.hpp"

namespace nmm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled by exactly one worker; fn must not share mutable state.
template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::uint64_t derive_seed(std::uint64_t seed, int rep) {
  if (rep == 0) return seed;
  Rng child = Rng(seed).split(static_cast<std::uint64_t>(rep));
  return child.next_u64();
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

std::string extension(TraceFormat f) { return f == TraceFormat::csv ? ".csv" : ".json"; }

std::vector<IterateTrace> without_time(std::vector<IterateTrace> trace) {
  for (IterateTrace& r : trace) r.wall_time.reset();
  return trace;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw TraceIoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceIoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw TraceIoError("write to '" + path + "' failed");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file '" + path + "' cannot be opened");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

struct RunOutcome {
  RunSummary summary;
  std::uint64_t seed = 0;
  std::string out_path;
  bool failed = false;
  std::string error;
};

RunOutcome execute_run(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed,
                       const std::string& out_path) {
  RunOutcome o;
  o.seed = seed;
  o.out_path = out_path;
  try {
    const SolverResult r = run_algorithm(cfg, inst, seed);
    o.summary = summarize(cfg.algo, r);
    o.failed = r.status == SolverStatus::aborted;
    if (!out_path.empty())
      emit_trace(r.trace, out_path, parse_trace_format(cfg.format), trace_header(cfg, seed));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    o.failed = true;
    o.error = e.what();
  }
  return o;
}

json outcome_json(const RunOutcome& o) {
  json j = o.summary.to_json();
  j["seed"] = o.seed;
  if (!o.out_path.empty()) j["out"] = o.out_path;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

// ---- run ------------------------------------------------------------------

struct RunFlags {
  std::string config, problem, algo, dataset, out, format, sampling;
  Eigen::Index n = 0;
  double rho = 0.0, kappa_m = 0.0, step_c = 0.0;
  int iters = 0, reps = 0, gap_stride = 0;
  std::uint64_t seed = 0;
  std::size_t subset = 0, batch = 0, components = 0;
  bool wall_time = false;
  unsigned jobs = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its fields");
  cmd->add_option("--problem", f.problem, "cubic | auc | quadratic | glm");
  cmd->add_option("--algo", f.algo, "newton | inexact | subsampled | eg | ogda | seg | sogda");
  cmd->add_option("--n", f.n, "problem dimension");
  cmd->add_option("--rho", f.rho, "Hessian Lipschitz parameter");
  cmd->add_option("--iters", f.iters, "iteration budget T");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--dataset", f.dataset, "LIBSVM file for the AUC problem");
  cmd->add_option("--subset", f.subset, "keep the first rows of the dataset");
  cmd->add_option("--out", f.out, "trace output path");
  cmd->add_option("--format", f.format, "csv | json");
  cmd->add_option("--reps", f.reps, "repetitions with independent seeds");
  cmd->add_option("--sampling", f.sampling, "uniform | nonuniform | empirical | full");
  cmd->add_option("--kappa-m", f.kappa_m, "Condition 2 constant");
  cmd->add_option("--step-c", f.step_c, "first-order step constant");
  cmd->add_option("--batch", f.batch, "minibatch size for seg and sogda");
  cmd->add_option("--components", f.components, "number of components of the glm problem");
  cmd->add_option("--gap-stride", f.gap_stride, "evaluate the gap every k rows");
  cmd->add_option("--jobs", f.jobs, "worker threads for repetitions");
  cmd->add_flag("--wall-time", f.wall_time, "record wall-clock time in traces");
}

json merged_config(CLI::App* cmd, const RunFlags& f) {
  json cfg = f.config.empty() ? json::object() : load_json_file(f.config);
  const auto given = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (given("--problem")) apply_override(cfg, "problem.kind", f.problem);
  if (given("--n")) apply_override(cfg, "problem.n", f.n);
  if (given("--rho")) apply_override(cfg, "problem.rho", f.rho);
  if (given("--dataset")) apply_override(cfg, "problem.dataset", f.dataset);
  if (given("--subset")) apply_override(cfg, "problem.subset", f.subset);
  if (given("--components")) apply_override(cfg, "problem.components", f.components);
  if (given("--algo")) cfg["algo"] = f.algo;
  if (given("--iters")) cfg["iterations"] = f.iters;
  if (given("--seed")) cfg["seed"] = f.seed;
  if (given("--out")) cfg["out"] = f.out;
  if (given("--format")) cfg["format"] = f.format;
  if (given("--reps")) cfg["reps"] = f.reps;
  if (given("--sampling")) cfg["sampling"] = f.sampling;
  if (given("--kappa-m")) cfg["kappa_m"] = f.kappa_m;
  if (given("--step-c")) cfg["step_c"] = f.step_c;
  if (given("--batch")) cfg["batch"] = f.batch;
  if (given("--gap-stride")) cfg["gap_stride"] = f.gap_stride;
  if (f.wall_time) cfg["wall_time"] = true;
  return cfg;
}

int cmd_run(CLI::App* cmd, const RunFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(merged_config(cmd, f));
  cfg.validate();
  const Instance inst = build_instance(cfg);
  if (inst.degenerate) {
    err << "error: dataset has a single class; the AUC problem is degenerate\n";
    return kFailure;
  }
  if (inst.surrogate_data)
    err << "note: no dataset given; using the a9a-shaped synthetic surrogate\n";
  if (!cfg.out.empty()) ensure_dir(fs::path(cfg.out).parent_path().string());

  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  parallel_for(outcomes.size(), f.jobs > 0 ? f.jobs : default_jobs(), [&](std::size_t r) {
    const std::string path =
        cfg.out.empty() ? "" : (cfg.reps == 1 ? cfg.out : with_suffix(cfg.out, "_rep" + std::to_string(r)));
    outcomes[r] = execute_run(cfg, inst, derive_seed(cfg.seed, static_cast<int>(r)), path);
  });
  int code = kOk;
  for (const RunOutcome& o : outcomes) {
    out << outcome_json(o).dump() << '\n';
    if (o.failed) {
      err << "run failed: " << (o.error.empty() ? o.summary.message : o.error) << '\n';
      code = kFailure;
    }
  }
  return code;
}

// ---- sweep ----------------------------------------------------------------

std::vector<json> expand_sweep(const json& doc) {
  if (!doc.is_object()) throw ConfigError("sweep config must be a JSON object");
  std::vector<json> configs;
  if (doc.contains("runs")) {
    if (!doc["runs"].is_array()) throw ConfigError("sweep field 'runs' must be an array");
    for (const json& r : doc["runs"]) configs.push_back(r);
    return configs;
  }
  const json base = doc.value("base", json::object());
  const json grid = doc.value("grid", json::object());
  if (!grid.is_object()) throw ConfigError("sweep field 'grid' must be an object");
  configs.push_back(base);
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array() || it.value().empty())
      throw ConfigError("sweep grid entry '" + it.key() + "' must be a nonempty array");
    std::vector<json> next;
    for (const json& c : configs) {
      for (const json& v : it.value()) {
        json copy = c;
        apply_override(copy, it.key(), v);
        next.push_back(std::move(copy));
      }
    }
    configs = std::move(next);
  }
  return configs;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, unsigned jobs,
              std::ostream& out, std::ostream& err) {
  if (config_path.empty()) throw ConfigError("sweep needs --config");
  const std::vector<json> docs = expand_sweep(load_json_file(config_path));
  std::vector<ExperimentConfig> cfgs;
  for (const json& d : docs) {
    cfgs.push_back(ExperimentConfig::from_json(d));
    cfgs.back().validate();
  }
  ensure_dir(out_dir);
  std::vector<RunOutcome> outcomes(cfgs.size());
  parallel_for(cfgs.size(), jobs > 0 ? jobs : default_jobs(), [&](std::size_t i) {
    const ExperimentConfig& cfg = cfgs[i];
    std::string path = cfg.out;
    if (path.empty() && !out_dir.empty())
      path = (fs::path(out_dir) / ("run_" + std::to_string(i) + (cfg.format == "csv" ? ".csv" : ".json"))).string();
    try {
      const Instance inst = build_instance(cfg);
      outcomes[i] = execute_run(cfg, inst, cfg.seed, path);
    } catch (const std::exception& e) {
      outcomes[i].failed = true;
      outcomes[i].error = e.what();
    }
  });
  int code = kOk;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    json j = outcome_json(outcomes[i]);
    j["index"] = i;
    j["config"] = cfgs[i].to_json();
    out << j.dump() << '\n';
    if (outcomes[i].failed) {
      err << "sweep run " << i << " failed: "
          << (outcomes[i].error.empty() ? outcomes[i].summary.message : outcomes[i].error) << '\n';
      code = kFailure;
    }
  }
  return code;
}

// ---- repro-cubic ------------------------------------------------------------

struct ReproFlags {
  std::vector<long> ns{50};
  std::vector<std::string> algos;
  int iters = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool wall_time = false;
  // AUC only
  std::string dataset;
  std::size_t subset = 500;
  std::string sampling = "empirical";
  double kappa_m = 0.1;
  bool no_gap = false;
  unsigned jobs = 0;
};

void write_views(const std::vector<IterateTrace>& trace, const std::string& stem, TraceFormat fmt,
                 const json& header, bool wall_time) {
  emit_trace(without_time(trace), stem + "_iter" + extension(fmt), fmt, header);
  if (wall_time) emit_trace(trace, stem + "_time" + extension(fmt), fmt, header);
}

int cmd_repro_cubic(const ReproFlags& f, std::ostream& out, std::ostream& err) {
  const TraceFormat fmt = parse_trace_format(f.format);
  const std::vector<std::string> algos =
      f.algos.empty() ? std::vector<std::string>{"newton", "inexact", "eg", "ogda"} : f.algos;
  for (const std::string& a : algos)
    if (a != "newton" && a != "inexact" && a != "eg" && a != "ogda")
      throw ConfigError("repro-cubic supports newton, inexact, eg and ogda; got '" + a + "'");
  for (long n : f.ns)
    if (n < 2) throw ConfigError("repro-cubic needs --n >= 2");
  ensure_dir(f.out);

  std::vector<json> reports(f.ns.size());
  std::vector<std::string> errors(f.ns.size());
  std::vector<bool> failed(f.ns.size(), false);
  parallel_for(f.ns.size(), f.jobs > 0 ? f.jobs : default_jobs(), [&](std::size_t i) {
    const Eigen::Index n = f.ns[i];
    try {
      const CubicExperiment ex = run_cubic_experiment(n, algos, f.iters, f.seed, f.wall_time);
      const double rho = ex.problem->rho();
      const double d = (ex.z0.coords() - ex.saddle.coords()).norm();
      json runs = json::array();
      for (const NamedRun& run : ex.runs) {
        ExperimentConfig cfg;
        cfg.problem.kind = "cubic";
        cfg.problem.n = n;
        cfg.problem.instance_seed = f.seed;
        cfg.algo = run.algo;
        cfg.iterations = f.iters;
        cfg.seed = f.seed;
        cfg.format = f.format;
        cfg.wall_time = f.wall_time;
        const std::string stem =
            (fs::path(f.out) / ("cubic_n" + std::to_string(n) + "_" + run.algo)).string();
        write_views(run.result.trace, stem, fmt, trace_header(cfg, f.seed), f.wall_time);
        json j = summarize(run.algo, run.result).to_json();
        if (run.algo == "newton" || run.algo == "inexact") {
          const TheoryContext ctx{rho, d, run.algo == "inexact", 1e-8};
          const auto checks = check_trace_invariants(run.result.trace, ctx);
          j["gap_bound_holds"] = all_ok({checks.back()});
          j["invariants_hold"] = all_ok(checks);
          if (!all_ok(checks)) failed[i] = true;
        }
        if (run.result.status == SolverStatus::aborted) failed[i] = true;
        runs.push_back(std::move(j));
      }
      reports[i] = json{{"experiment", "cubic"}, {"n", n}, {"rho", rho}, {"seed", f.seed},
                        {"dist0", d}, {"runs", std::move(runs)}};
      write_text((fs::path(f.out) / ("cubic_n" + std::to_string(n) + "_summary.json")).string(),
                 reports[i].dump(2) + "\n");
    } catch (const std::exception& e) {
      failed[i] = true;
      errors[i] = e.what();
    }
  });
  int code = kOk;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].is_null()) out << reports[i].dump() << '\n';
    if (failed[i]) {
      err << "repro-cubic n=" << f.ns[i] << " failed"
          << (errors[i].empty() ? std::string(" an invariant check or aborted") : ": " + errors[i]) << '\n';
      code = kFailure;
    }
  }
  return code;
}

// ---- repro-auc --------------------------------------------------------------

int cmd_repro_auc(const ReproFlags& f, std::ostream& out, std::ostream& err) {
  const TraceFormat fmt = parse_trace_format(f.format);
  const std::vector<std::string> algos =
      f.algos.empty() ? std::vector<std::string>{"inexact", "subsampled", "seg", "sogda"} : f.algos;
  ProblemSpec spec;
  spec.kind = "auc";
  spec.dataset = f.dataset;
  spec.subset = f.subset;
  spec.instance_seed = f.seed;
  bool surrogate = false;
  const LibsvmDataset ds = load_auc_dataset(spec, &surrogate);
  if (surrogate) err << "note: no --dataset given; using the a9a-shaped synthetic surrogate\n";
  AucOptions opts;
  opts.iterations = f.iters;
  opts.seed = f.seed;
  try {
    opts.sampling = parse_sample_rule(f.sampling);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  opts.kappa_m = f.kappa_m;
  opts.wall_time = f.wall_time;
  opts.with_gap = !f.no_gap;
  // Wall time excludes parsing: the dataset is already loaded here.
  const AucExperiment ex = run_auc_experiment(ds, algos, opts);
  ensure_dir(f.out);
  const std::string label = surrogate ? "a9a_surrogate" : fs::path(f.dataset).stem().string();
  const std::size_t count = ex.problem->num_components();
  json runs = json::array();
  bool failed = false;
  for (const NamedRun& run : ex.runs) {
    ExperimentConfig cfg;
    cfg.problem.kind = "auc";
    cfg.problem.dataset = f.dataset;
    cfg.problem.subset = f.subset;
    cfg.problem.instance_seed = f.seed;
    cfg.algo = run.algo;
    cfg.iterations = static_cast<int>(run.result.trace.size());
    cfg.seed = f.seed;
    cfg.kappa_m = f.kappa_m;
    cfg.sampling = f.sampling;
    cfg.format = f.format;
    cfg.wall_time = f.wall_time;
    if (run.step_c > 0.0) cfg.step_c = run.step_c;
    const std::string stem = (fs::path(f.out) / ("auc_" + label + "_" + run.algo)).string();
    write_views(run.result.trace, stem, fmt, trace_header(cfg, f.seed), f.wall_time);
    // Epoch view: cumulative component-gradient equivalents over N.
    std::string epoch_csv = "iter,epoch,grad_norm,gap\n";
    const std::vector<double> ep = epochs(run.result, count);
    for (std::size_t i = 0; i < ep.size(); ++i) {
      const IterateTrace& r = run.result.trace[i];
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,", r.k, ep[i], r.grad_norm);
      epoch_csv += buf;
      if (r.gap) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.gap);
        epoch_csv += buf;
      }
      epoch_csv += '\n';
    }
    write_text(stem + "_epoch.csv", epoch_csv);
    json j = summarize(run.algo, run.result).to_json();
    j["epochs"] = ep.empty() ? 0.0 : ep.back();
    if (run.step_c > 0.0) j["step_c"] = run.step_c;
    if (run.result.status == SolverStatus::aborted) failed = true;
    runs.push_back(std::move(j));
  }
  const json report{{"experiment", "auc"},
                    {"dataset", surrogate ? "a9a-shaped surrogate" : f.dataset},
                    {"surrogate_data", surrogate},
                    {"N", count},
                    {"p_hat", ex.problem->p_hat()},
                    {"rho", ex.problem->rho()},
                    {"seed", f.seed},
                    {"runs", runs}};
  write_text((fs::path(f.out) / ("auc_" + label + "_summary.json")).string(), report.dump(2) + "\n");
  out << report.dump() << '\n';
  return failed ? kFailure : kOk;
}

}  // namespace

// ---- check --------------------------------------------------------------------

bool run_check_suite(std::ostream& out) {
  bool all = true;
  const auto report = [&](const std::string& fixture, const std::vector<InvariantCheck>& checks) {
    for (const InvariantCheck& c : checks) {
      out << (c.ok ? "PASS " : "FAIL ") << fixture << ": " << c.name;
      if (!c.detail.empty()) out << " (" << c.detail << ")";
      out << '\n';
      all = all && c.ok;
    }
  };
  const auto newton_fixture = [&](const std::string& name, const Problem& p, const JointPoint& z0,
                                  const JointPoint& zs, double rho, int iters, bool inexact) {
    SolverConfig cfg;
    cfg.rho = rho;
    cfg.iterations = iters;
    cfg.reference = zs;
    const SolverResult r = inexact ? inexact_newton_minmax(p, z0, cfg) : newton_minmax(p, z0, cfg);
    const TheoryContext ctx{rho, (z0.coords() - zs.coords()).norm(), inexact, 1e-8};
    auto checks = check_result_invariants(r, p, z0, zs, ctx);
    checks.push_back({"no abort", r.status != SolverStatus::aborted, r.message});
    if (inexact) {
      bool cond2 = true;
      for (const IterationDiagnostics& d : r.diagnostics) cond2 = cond2 && d.condition2;
      checks.push_back({"Condition 2 certificate", cond2, ""});
    }
    report(name, checks);
  };

  try {
    const QuadraticSaddle toy(Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Identity(1, 1), Vec::Zero(1),
                              Vec::Zero(1));
    const JointPoint toy_z0(1, 1, Vec::Ones(2));
    newton_fixture("toy quadratic exact", toy, toy_z0, JointPoint(1, 1), 0.1, 50, false);
    newton_fixture("toy quadratic inexact", toy, toy_z0, JointPoint(1, 1), 0.1, 50, true);

    const CubicBilinear cb = make_cubic_bilinear(10, 1.0 / 200.0, 3);
    const JointPoint cb_star = cubic_bilinear_saddle(cb);
    newton_fixture("cubic-bilinear n=10 exact", cb, JointPoint(10, 10), cb_star, cb.rho(), 60, false);
    newton_fixture("cubic-bilinear n=10 inexact", cb, JointPoint(10, 10), cb_star, cb.rho(), 60, true);

    const QuadraticSaddle q = make_random_cc_quadratic(6, 4, 11);
    newton_fixture("random quadratic exact", q, JointPoint(6, 4), q.saddle(), 0.5, 40, false);

    // Cone projection: feasibility and idempotence.
    Rng rng(17);
    bool proj_ok = true;
    for (int t = 0; t < 200 && proj_ok; ++t) {
      Vec w(3 + 1 + 2 + 1);
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 3.0 * rng.normal();
      const Vec p = soc_project(w, 3, 2);
      const SOCPoint s = SOCPoint::from_vector(p, 3, 2);
      proj_ok = s.dx.norm() <= s.u + 1e-12 && s.dy.norm() <= s.v + 1e-12 &&
                (soc_project(p, 3, 2) - p).norm() <= 1e-12 * (1.0 + p.norm());
    }
    report("second-order cone", {{"projection feasible and idempotent", proj_ok, "200 points"}});

    // Full-batch sampling reproduces the exact-Hessian inexact run.
    const GlmQuadraticSum glm = make_glm_quadratic_sum(40, 3, 3, 5);
    SolverConfig cfg;
    cfg.rho = 0.1;
    cfg.iterations = 15;
    cfg.seed = 9;
    SubsampleConfig full;
    full.rule = SampleRule::full;
    const SolverResult a = inexact_newton_minmax(glm, JointPoint(3, 3), cfg);
    const SolverResult b = subsampled_newton_minmax(glm, JointPoint(3, 3), cfg, full);
    bool same = a.trace.size() == b.trace.size() && a.averaged.coords() == b.averaged.coords();
    for (std::size_t i = 0; same && i < a.trace.size(); ++i)
      same = same_persisted_fields(a.trace[i], b.trace[i]);
    report("finite-sum glm", {{"full-batch sampling matches exact Hessian bit for bit", same, ""}});

    // Trace serialization round trip.
    newton_fixture("cubic-bilinear n=10 exact (replayed)", cb, JointPoint(10, 10), cb_star, cb.rho(), 20,
                   false);
    SolverConfig rc;
    rc.rho = cb.rho();
    rc.iterations = 20;
    rc.reference = cb_star;
    const SolverResult r = newton_minmax(cb, JointPoint(10, 10), rc);
    const auto csv = trace_from_csv(trace_to_csv(r.trace));
    const auto js = trace_from_json(trace_to_json(r.trace, json::object()));
    bool rt = csv.size() == r.trace.size() && js.size() == r.trace.size();
    for (std::size_t i = 0; rt && i < r.trace.size(); ++i)
      rt = same_persisted_fields(csv[i], r.trace[i]) && same_persisted_fields(js[i], r.trace[i]);
    report("trace io", {{"csv and json round trip", rt, ""}});
    const TheoryContext ctx{cb.rho(), cb_star.coords().norm(), false, 1e-8};
    report("trace io", {{"replayed trace passes the invariant suite",
                         all_ok(check_trace_invariants(csv, ctx)), ""}});
  } catch (const std::exception& e) {
    out << "FAIL check suite raised: " << e.what() << '\n';
    return false;
  }
  return all;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order extragradient solvers for convex-concave saddle problems", "newton-minmax"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run one configured experiment");
  add_run_flags(run, run_flags);

  std::string sweep_config, sweep_out;
  unsigned sweep_jobs = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of configurations on a worker pool");
  sweep->add_option("--config", sweep_config, "JSON with {base, grid} or {runs}")->required();
  sweep->add_option("--out", sweep_out, "output directory for traces");
  sweep->add_option("--jobs", sweep_jobs, "worker threads");

  ReproFlags cubic_flags;
  cubic_flags.iters = 100;
  cubic_flags.out = "results/cubic";
  CLI::App* cubic = app.add_subcommand("repro-cubic", "cubic-bilinear experiment");
  cubic->add_option("--n", cubic_flags.ns, "dimensions (repeatable)");
  cubic->add_option("--algo", cubic_flags.algos, "newton, inexact, eg, ogda (repeatable)");
  cubic->add_option("--iters", cubic_flags.iters, "iteration budget");
  cubic->add_option("--seed", cubic_flags.seed, "instance seed");
  cubic->add_option("--out", cubic_flags.out, "output directory");
  cubic->add_option("--format", cubic_flags.format, "csv | json");
  cubic->add_option("--jobs", cubic_flags.jobs, "worker threads");
  cubic->add_flag("--wall-time", cubic_flags.wall_time, "also write *_time traces with wall-clock time");

  ReproFlags auc_flags;
  auc_flags.iters = 200;
  auc_flags.out = "results/auc";
  CLI::App* auc = app.add_subcommand("repro-auc", "AUC maximization experiment");
  auc->add_option("--dataset", auc_flags.dataset, "LIBSVM file (default: a9a-shaped surrogate)");
  auc->add_option("--subset", auc_flags.subset, "keep the first rows (0 keeps all)");
  auc->add_option("--algo", auc_flags.algos, "inexact, subsampled, seg, sogda (repeatable)");
  auc->add_option("--iters", auc_flags.iters, "iteration budget of the second-order runs");
  auc->add_option("--seed", auc_flags.seed, "run seed");
  auc->add_option("--sampling", auc_flags.sampling, "uniform | empirical | full");
  auc->add_option("--kappa-m", auc_flags.kappa_m, "Condition 2 constant");
  auc->add_option("--out", auc_flags.out, "output directory");
  auc->add_option("--format", auc_flags.format, "csv | json");
  auc->add_flag("--wall-time", auc_flags.wall_time, "also write *_time traces with wall-clock time");
  auc->add_flag("--no-gap", auc_flags.no_gap, "skip the reference saddle and gap evaluation");

  CLI::App* check = app.add_subcommand("check", "run the invariant suite on built-in fixtures");

  std::vector<const char*> argv{"newton-minmax"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run, run_flags, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_jobs, out, err);
    if (cubic->parsed()) return cmd_repro_cubic(cubic_flags, out, err);
    if (auc->parsed()) return cmd_repro_auc(auc_flags, out, err);
    if (check->parsed()) return run_check_suite(out) ? kOk : kFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kConfigError;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace nmm
