#pragma once

#include <optional>
#include <random>

#include "jpc/fast_assign.hpp"
#include "jpc/value_iteration.hpp"

namespace jpc::validation {

/// Exact optimum of the fixed-marginal transportation problem, solved by
/// successive shortest paths on the bipartite flow graph (rows supply p_m,
/// columns demand a_n, cells m+n >= b admissible with cost eta^{m+n-b}).
/// Independent of the greedy stripe fill it cross-checks.
struct TransportOracleResult {
  bool feasible = false;
  double cost = 0.0;  // objective of problem value minus the constant 1
  Mat mass;           // optimal transferred mass per cell
};
TransportOracleResult lp_transport_oracle(int b, double eta,
                                          std::span<const double> p,
                                          std::span<const double> a);

/// Brute-force enumeration of deterministic stationary policies with exact
/// long-run cost from b0 = 0 (closed-class stationary solves + absorption
/// weighting). Only for small instances; throws if the policy count is huge.
double enumerate_optimal_average_cost(const SystemConfig& cfg);

/// Continuous offline-schedule optimum on a discretized cumulative grid
/// (fine-grained DP); oracle for the taut-string construction on tiny traces.
double offline_schedule_dp_oracle(const std::vector<int>& trace, int B, double eta,
                                  int grid_per_slot = 2000);

// Randomized instance helpers (strictly positive p.m.f. entries).
SystemConfig random_config(std::mt19937_64& rng, int max_x, int max_b,
                           double eta_lo, double eta_hi);
MarginalVector random_feasible_marginal(std::mt19937_64& rng, const SystemConfig& cfg,
                                        int b);
std::vector<double> random_values(std::mt19937_64& rng, int n, double lo, double hi);

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> notes;
  bool passed() const { return failures == 0; }
};

struct ValidateOptions {
  std::uint64_t seed = 20240601;
  std::string reproducer_dir = ".";
  // Scale knobs so the acceptance harness can run the spec-sized versions.
  int fast_vs_lp_checks = 300;
  int convexity_checks = 300;
  int bellman_agreement_checks = 200;
  int vi_agreement_checks = 40;
  int simulator_instances = 4;
  std::uint64_t simulator_steps = 200000;
  int dominance_traces = 6;
  std::size_t dominance_steps = 100000;
};

SuiteResult suite_fast_vs_lp(const ValidateOptions& opt);
SuiteResult suite_monotonicity(const ValidateOptions& opt);
SuiteResult suite_convexity(const ValidateOptions& opt);
SuiteResult suite_hall_counterexample(const ValidateOptions& opt);
SuiteResult suite_bellman_agreement(const ValidateOptions& opt);
SuiteResult suite_vi_agreement(const ValidateOptions& opt);
SuiteResult suite_simulator_consistency(const ValidateOptions& opt);
SuiteResult suite_taut_string_dominance(const ValidateOptions& opt);

/// All eight suites in the order above.
std::vector<SuiteResult> run_all_suites(const ValidateOptions& opt);

}  // namespace jpc::validation
