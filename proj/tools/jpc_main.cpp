// jpc: solver and experiment harness for energy-minimal proactive
// pushing/caching policies on a buffered point-to-point link.
//
// Subcommands: solve, simulate, baselines, sweep, bench, validate.
// Exit codes: 0 success, 1 validation failure, 2 bad input/mismatch,
// 3 non-convergence, 4 benchmark correctness mismatch.

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "jpc/baselines.hpp"
#include "jpc/serialization.hpp"
#include "jpc/simulator.hpp"
#include "jpc/validation.hpp"
#include "jpc/value_iteration.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitBenchMismatch = 4;

std::uint64_t ensure_seed(std::uint64_t seed, bool seed_given) {
  if (seed_given) return seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed not given; generated seed = " << s << "\n";
  return s;
}

struct TautSummary {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

TautSummary taut_over_traces(const jpc::SystemConfig& cfg, int traces,
                             std::size_t steps, std::uint64_t seed) {
  TautSummary out;
  if (traces <= 0 || steps == 0) return out;
  std::vector<double> per_trace;
  per_trace.reserve(traces);
  for (int k = 0; k < traces; ++k) {
    const auto tr = jpc::sample_trace(cfg, steps, seed + 1315423911u * (k + 1));
    const auto sched = jpc::taut_string_schedule(tr, cfg.B, cfg.eta);
    per_trace.push_back(sched.total_energy / static_cast<double>(steps));
  }
  double sum = 0.0;
  for (double v : per_trace) sum += v;
  out.mean = sum / traces;
  if (traces > 1) {
    double ss = 0.0;
    for (double v : per_trace) ss += (v - out.mean) * (v - out.mean);
    out.stderr_mean = std::sqrt(ss / (traces - 1) / traces);
  }
  return out;
}

// --------------------------------------------------------------------------
// solve
// --------------------------------------------------------------------------

int cmd_solve(const std::string& config_path, double eps, const std::string& method,
              const std::string& space, const std::string& out_path, long max_sweeps) {
  const auto cfg = jpc::load_config(config_path);
  jpc::VIOptions opts;
  opts.eps = eps;
  opts.max_sweeps = max_sweeps;
  opts.bellman.method = jpc::bellman_method_from_string(method);
  jpc::SolveOutput solved = space == "full" ? jpc::value_iterate_full(cfg, opts)
                                            : jpc::value_iterate_degenerated(cfg, opts);
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot write policy file: " + out_path);
  out << jpc::policy_to_json(solved.policy, &solved.report).dump(2) << "\n";
  json summary{{"L", solved.policy.L},
               {"gain", solved.policy.gain},
               {"epsilon", solved.policy.epsilon},
               {"iterations", solved.report.iterations},
               {"final_span", solved.report.final_span},
               {"wallclock_ms", solved.report.total_ms},
               {"method", solved.policy.method},
               {"multichain", solved.policy.multichain},
               {"policy_file", out_path}};
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

int cmd_simulate(const std::string& policy_path, std::uint64_t steps,
                 std::uint64_t seed, int b0, const std::string& out_path,
                 const std::string& trace_path) {
  const auto policy = jpc::load_policy(policy_path);
  std::ofstream trace;
  std::ostream* trace_os = nullptr;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw std::invalid_argument("cannot write trace file: " + trace_path);
    trace << jpc::kTraceCsvHeader << "\n";
    trace_os = &trace;
  }
  const auto rep =
      jpc::simulate_policy(policy, policy.config, steps, seed, b0, trace_os);
  auto j = jpc::report_to_json(rep);
  j["analytic_L"] = policy.L;
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write report file: " + out_path);
    out << j.dump(2) << "\n";
    std::cout << "report written to " << out_path << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// baselines
// --------------------------------------------------------------------------

int cmd_baselines(const std::string& config_path, int traces, std::size_t steps,
                  std::uint64_t seed, const std::string& schedule_csv,
                  int schedule_trace_index, const std::string& out_path) {
  const auto cfg = jpc::load_config(config_path);
  json j{{"no_buffer", jpc::no_buffer_cost(cfg)},
         {"infinite_buffer", jpc::infinite_buffer_cost(cfg)},
         {"seed", seed}};
  if (traces > 0 && steps > 0) {
    const auto taut = taut_over_traces(cfg, traces, steps, seed);
    j["taut_string"] = json{{"traces", traces},
                            {"steps", steps},
                            {"mean_per_slot", taut.mean},
                            {"stderr", taut.stderr_mean}};
  }
  if (!schedule_csv.empty()) {
    const auto tr = jpc::sample_trace(
        cfg, steps, seed + 1315423911u * (schedule_trace_index + 1));
    const auto sched = jpc::taut_string_schedule(tr, cfg.B, cfg.eta);
    std::ofstream out(schedule_csv);
    if (!out) throw std::invalid_argument("cannot write schedule file: " + schedule_csv);
    jpc::write_schedule_csv(out, tr, sched, cfg.eta);
    j["schedule_csv"] = schedule_csv;
  }
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write output file: " + out_path);
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

struct SweepSpec {
  std::string variable;  // "buffer-size" | "request-max"
  std::vector<int> grid;
  std::vector<double> etas;
  json dist;  // {"uniform_max": X} or {"pmf": [...]} (buffer-size only)
  int fixed_b = 8;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  int traces = 20;
  std::size_t trace_steps = 100000;
};

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sweep spec: " + path);
  json j;
  in >> j;
  SweepSpec spec;
  spec.variable = j.at("sweep").get<std::string>();
  if (spec.variable != "buffer-size" && spec.variable != "request-max")
    throw std::invalid_argument("sweep: unknown variable " + spec.variable);
  spec.grid = j.at("grid").get<std::vector<int>>();
  if (spec.grid.empty()) throw std::invalid_argument("sweep: empty grid");
  spec.etas = j.at("eta").get<std::vector<double>>();
  for (double e : spec.etas)
    if (!(e > 1.0)) throw std::invalid_argument("sweep: eta must exceed 1");
  if (j.contains("dist")) spec.dist = j.at("dist");
  spec.fixed_b = j.value("fixed_B", 8);
  spec.eps = j.value("eps", 1e-6);
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.traces = j.value("traces", 20);
  spec.trace_steps = j.value("trace_steps", static_cast<std::size_t>(100000));
  return spec;
}

jpc::SystemConfig sweep_point_config(const SweepSpec& spec, int value, double eta) {
  if (spec.variable == "request-max") return jpc::SystemConfig::uniform(spec.fixed_b, eta, value);
  // buffer-size sweep: the distribution comes from the spec's dist block
  if (spec.dist.contains("pmf"))
    return jpc::SystemConfig::make(value, eta, spec.dist.at("pmf").get<std::vector<double>>());
  const int x = spec.dist.value("uniform_max", 20);
  return jpc::SystemConfig::uniform(value, eta, x);
}

struct SweepRow {
  int variable = 0;
  double eta = 0.0;
  double l_mdp = 0.0;
  double no_buffer = 0.0;
  double inf_buffer = 0.0;
  double taut_mean = 0.0;
  double taut_stderr = 0.0;
  long iterations = 0;
  double wallclock_ms = 0.0;
  std::string status = "ok";
};

int cmd_sweep(const std::string& spec_path, const std::string& out_path,
              const std::string& gnuplot_path, int jobs, bool seed_given,
              std::uint64_t seed_flag, bool eps_given, double eps_flag) {
  auto spec = load_sweep_spec(spec_path);
  if (seed_given) spec.seed = seed_flag;
  if (eps_given) spec.eps = eps_flag;
  if (spec.seed == 0) spec.seed = ensure_seed(0, false);

  struct Task {
    int value;
    double eta;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const int v : spec.grid)
    for (const double e : spec.etas)
      tasks.push_back({v, e, spec.seed + 7919u * (tasks.size() + 1)});

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      SweepRow& row = rows[i];
      row.variable = tasks[i].value;
      row.eta = tasks[i].eta;
      try {
        const auto cfg = sweep_point_config(spec, tasks[i].value, tasks[i].eta);
        jpc::VIOptions opts;
        opts.eps = spec.eps;
        opts.record_gain_trace = false;
        const auto solved = jpc::value_iterate_degenerated(cfg, opts);
        row.l_mdp = solved.policy.L;
        row.iterations = solved.report.iterations;
        row.wallclock_ms = solved.report.bellman_ms;
        row.no_buffer = jpc::no_buffer_cost(cfg);
        row.inf_buffer = jpc::infinite_buffer_cost(cfg);
        const auto taut = taut_over_traces(cfg, spec.traces, spec.trace_steps, tasks[i].seed);
        row.taut_mean = taut.mean;
        row.taut_stderr = taut.stderr_mean;
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::invalid_argument("cannot write sweep output: " + out_path);
    os = &file;
  }
  os->precision(12);
  (*os) << jpc::kSweepCsvHeader << "\n";
  bool any_failed = false;
  for (const auto& row : rows) {
    (*os) << row.variable << ',' << row.eta << ',' << row.l_mdp << ',' << row.no_buffer
          << ',' << row.inf_buffer << ',' << row.taut_mean << ',' << row.taut_stderr
          << ',' << row.iterations << ',' << row.wallclock_ms << ',';
    if (row.status == "ok") {
      (*os) << "ok\n";
    } else {
      any_failed = true;
      std::string cleaned = row.status;
      for (char& c : cleaned)
        if (c == ',' || c == '\n') c = ';';
      (*os) << cleaned << "\n";
    }
  }
  if (!gnuplot_path.empty() && !out_path.empty()) {
    std::ofstream gp(gnuplot_path);
    if (!gp) throw std::invalid_argument("cannot write gnuplot script: " + gnuplot_path);
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel '" << spec.variable << "'\n"
       << "set ylabel 'average energy per slot'\n"
       << "set logscale y\n"
       << "plot '" << out_path << "' using 1:3 with linespoints title 'MDP policy', \\\n"
       << "     '" << out_path << "' using 1:4 with lines title 'no buffer', \\\n"
       << "     '" << out_path << "' using 1:5 with lines title 'infinite buffer', \\\n"
       << "     '" << out_path << "' using 1:6 with linespoints title 'offline taut string'\n";
  }
  return any_failed ? kExitValidationFailure : kExitOk;
}

// --------------------------------------------------------------------------
// bench
// --------------------------------------------------------------------------

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

int cmd_bench(const std::vector<int>& b_list, double eps, int reps, double eta,
              const std::string& out_path) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::invalid_argument("cannot write bench output: " + out_path);
    os = &file;
  }
  os->precision(12);
  (*os) << jpc::kBenchCsvHeader << "\n";
  for (const int b : b_list) {
    const int x = (3 * b) / 2;  // X = 1.5 B on the even grid
    const auto cfg = jpc::SystemConfig::uniform(b, eta, x);
    jpc::VIOptions opts;
    opts.eps = eps;
    opts.record_gain_trace = false;

    std::vector<double> deg_ms, full_ms;
    double l_deg = 0.0, l_full = 0.0;
    for (int r = 0; r < std::max(1, reps); ++r) {
      const auto deg = jpc::value_iterate_degenerated(cfg, opts);
      deg_ms.push_back(deg.report.bellman_ms);
      l_deg = deg.policy.L;
      const auto full = jpc::value_iterate_full(cfg, opts);
      full_ms.push_back(full.report.bellman_ms);
      l_full = full.policy.L;
    }
    if (std::abs(l_deg - l_full) > 1e-5) {
      std::cerr << "bench: solver disagreement at B=" << b << ": L_deg=" << l_deg
                << " L_full=" << l_full << " (refusing to report speed)\n";
      return kExitBenchMismatch;
    }
    const double dm = deg_ms.size() >= 3 ? median3(deg_ms[0], deg_ms[1], deg_ms[2]) : deg_ms[0];
    const double fm = full_ms.size() >= 3 ? median3(full_ms[0], full_ms[1], full_ms[2]) : full_ms[0];
    (*os) << b << ',' << x << ',' << dm << ',' << fm << ',' << (fm / dm) << ','
          << l_deg << ',' << l_full << "\n";
    os->flush();
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// validate
// --------------------------------------------------------------------------

int cmd_validate(std::uint64_t seed, const std::string& reproducer_dir,
                 const std::string& out_path) {
  jpc::validation::ValidateOptions opt;
  opt.seed = seed;
  opt.reproducer_dir = reproducer_dir;
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::invalid_argument("cannot write summary file: " + out_path);
    os = &file;
  }
  (*os) << "validation (seed " << seed << ")\n";
  const auto results = jpc::validation::run_all_suites(opt);
  bool all_ok = true;
  for (const auto& s : results) {
    (*os) << (s.passed() ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.checks
          << " checks, " << s.failures << " failures\n";
    for (const auto& note : s.notes) (*os) << "       " << note << "\n";
    all_ok = all_ok && s.passed();
  }
  (*os) << (all_ok ? "all suites passed\n" : "validation failed\n");
  return all_ok ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-minimal proactive pushing/caching policy solver"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve a problem instance by value iteration");
  std::string solve_config;
  double solve_eps = 1e-6;
  std::string solve_method = "exact-rowwise";
  std::string solve_space = "degenerated";
  std::string solve_out = "policy.json";
  long solve_max_sweeps = 1000000;
  solve->add_option("--config", solve_config, "instance JSON")->required();
  solve->add_option("--eps", solve_eps, "span stopping threshold");
  solve->add_option("--method", solve_method, "exact-rowwise | convex-marginal")
      ->check(CLI::IsMember({"exact-rowwise", "convex-marginal"}));
  solve->add_option("--space", solve_space, "degenerated | full")
      ->check(CLI::IsMember({"degenerated", "full"}));
  solve->add_option("--out", solve_out, "policy output path");
  solve->add_option("--max-sweeps", solve_max_sweeps, "iteration cap before giving up");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a solved policy on sampled requests");
  std::string sim_policy;
  std::uint64_t sim_steps = 1000000;
  std::uint64_t sim_seed = 0;
  bool sim_seed_given = false;
  int sim_b0 = 0;
  std::string sim_out, sim_trace;
  simulate->add_option("--policy", sim_policy, "policy JSON from solve")->required();
  simulate->add_option("--steps", sim_steps, "number of slots");
  simulate->add_option("--seed", sim_seed, "rng seed")->each([&](const std::string&) {
    sim_seed_given = true;
  });
  simulate->add_option("--b0", sim_b0, "initial buffer level");
  simulate->add_option("--out", sim_out, "report output path (stdout when omitted)");
  simulate->add_option("--trace", sim_trace, "per-slot CSV trace path");

  // baselines
  auto* baselines = app.add_subcommand("baselines", "bounds and the offline taut-string comparator");
  std::string base_config, base_schedule, base_out;
  int base_traces = 20;
  std::size_t base_steps = 100000;
  std::uint64_t base_seed = 0;
  bool base_seed_given = false;
  int base_trace_index = 0;
  baselines->add_option("--config", base_config, "instance JSON")->required();
  baselines->add_option("--traces", base_traces, "number of sampled traces");
  baselines->add_option("--steps", base_steps, "slots per trace");
  baselines->add_option("--seed", base_seed, "rng seed")->each([&](const std::string&) {
    base_seed_given = true;
  });
  baselines->add_option("--schedule-csv", base_schedule, "write one trace's offline schedule");
  baselines->add_option("--trace-index", base_trace_index, "which trace the schedule uses");
  baselines->add_option("--out", base_out, "summary output path (stdout when omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid experiments over buffer size or request bound");
  std::string sweep_spec, sweep_out, sweep_gnuplot;
  int sweep_jobs = 2;
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_given = false;
  sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
  sweep->add_option("--out", sweep_out, "CSV output path (stdout when omitted)");
  sweep->add_option("--gnuplot", sweep_gnuplot, "companion gnuplot script path");
  sweep->add_option("--jobs", sweep_jobs, "bounded worker pool size");
  sweep->add_option("--seed", sweep_seed, "base seed")->each([&](const std::string&) {
    sweep_seed_given = true;
  });
  double sweep_eps = 1e-6;
  bool sweep_eps_given = false;
  sweep->add_option("--eps", sweep_eps, "override the spec's stopping threshold")
      ->each([&](const std::string&) { sweep_eps_given = true; });

  // bench
  auto* bench = app.add_subcommand("bench", "degenerated vs full-space runtime comparison");
  std::vector<int> bench_b{2, 4, 6, 8, 10, 12, 14, 16};
  double bench_eps = 1e-6;
  int bench_reps = 3;
  double bench_eta = 1.4;
  std::string bench_out;
  bench->add_option("--b-list", bench_b, "buffer sizes (X = 1.5B each)");
  bench->add_option("--eps", bench_eps, "span stopping threshold");
  bench->add_option("--reps", bench_reps, "repetitions per point (median reported)");
  bench->add_option("--eta", bench_eta, "energy base");
  bench->add_option("--out", bench_out, "CSV output path (stdout when omitted)");

  // validate
  auto* validate = app.add_subcommand("validate", "run the oracle and property suites");
  std::uint64_t val_seed = 0;
  bool val_seed_given = false;
  std::string val_dir = ".";
  validate->add_option("--seed", val_seed, "suite seed")->each([&](const std::string&) {
    val_seed_given = true;
  });
  validate->add_option("--reproducer-dir", val_dir, "where failure reproducers are written");
  std::string val_out;
  validate->add_option("--out", val_out, "summary output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(solve_config, solve_eps, solve_method, solve_space, solve_out,
                       solve_max_sweeps);
    if (simulate->parsed())
      return cmd_simulate(sim_policy, sim_steps, ensure_seed(sim_seed, sim_seed_given),
                          sim_b0, sim_out, sim_trace);
    if (baselines->parsed())
      return cmd_baselines(base_config, base_traces, base_steps,
                           ensure_seed(base_seed, base_seed_given), base_schedule,
                           base_trace_index, base_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_spec, sweep_out, sweep_gnuplot, sweep_jobs,
                       sweep_seed_given, sweep_seed, sweep_eps_given, sweep_eps);
    if (bench->parsed()) return cmd_bench(bench_b, bench_eps, bench_reps, bench_eta, bench_out);
    if (validate->parsed())
      return cmd_validate(val_seed_given ? val_seed : 20240601, val_dir, val_out);
  } catch (const jpc::convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
