#pragma once

#include "jpc/bellman.hpp"

namespace jpc {

/// Relative value-iteration state over buffer levels; v[0] is pinned to 0
/// after each renormalization.
struct ValueVector {
  std::vector<double> v;
  long t = 0;
};

/// A solved stationary policy: the per-level decision family plus everything
/// derived from it (transition matrix over buffer levels, stationary
/// distribution, per-state expected costs, average cost, and the VI gain).
struct Policy {
  SystemConfig config;
  std::vector<DecisionMatrix> levels;  // size B+1
  Mat A;                               // (B+1) x (B+1), row b = p-mixture of D^b rows
  std::vector<double> r;               // stationary distribution, A'r = r
  Mat Omega;                           // (B+1) x (X+1) expected state costs
  double L = 0.0;                      // r' Omega p
  double gain = 0.0;                   // VI gain estimate
  double epsilon = 0.0;                // stopping threshold used
  std::string method;
  bool multichain = false;
};

struct VIReport {
  long iterations = 0;
  double final_span = 0.0;
  double total_ms = 0.0;
  double bellman_ms = 0.0;
  double extract_ms = 0.0;
  std::string method;
  std::vector<double> gain_trace;  // midpoint of the one-step difference span
  std::vector<double> span_trace;  // monitored, not asserted, per sweep
};

struct VIOptions {
  double eps = 1e-6;
  long max_sweeps = 1000000;
  SolverOptions bellman;
  bool record_gain_trace = true;
};

struct SolveOutput {
  Policy policy;
  VIReport report;
};

/// Value iteration in the degenerated buffer space: from v0 = 0, applies the
/// per-level Bellman step each sweep, renormalizes (relative VI), and stops
/// when span(v_t - v_{t-1}) < eps. The gain is the midpoint of the final
/// difference span. Throws convergence_error past opts.max_sweeps.
SolveOutput value_iterate_degenerated(const SystemConfig& cfg, const VIOptions& opts);

/// Conventional value iteration over the full state space (b, x) with integer
/// actions: the continuation expectation is evaluated per (state, action)
/// against the generic transition kernel, i.e. without exploiting the
/// request/buffer factorization. Serves as the unadapted baseline.
SolveOutput value_iterate_full(const SystemConfig& cfg, const VIOptions& opts);

/// Row b of the result is the p-weighted mixture of the rows of D^b.
Mat build_transition_matrix(const std::vector<DecisionMatrix>& levels,
                            std::span<const double> p);

struct StationaryResult {
  std::vector<double> r;
  bool multichain = false;
};

/// Solves A'r = r, 1'r = 1 by direct dense elimination (handles periodic
/// chains). Reducible chains with several closed classes are flagged
/// multichain; r is then the stationary law of the class(es) reachable from
/// b = 0, absorption-weighted when more than one is reachable.
StationaryResult stationary_distribution(const Mat& A, double edge_tol = 1e-12);

/// Re-derives Omega, r and L = r' Omega p from the decision family alone.
double policy_average_cost(const Policy& policy);

/// Shared assembly: transition matrix, stationary distribution, Omega, L.
Policy assemble_policy(const SystemConfig& cfg, std::vector<DecisionMatrix> levels,
                       double gain, double epsilon, std::string method);

}  // namespace jpc
