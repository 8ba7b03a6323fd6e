#pragma once

#include <span>

#include "jpc/types.hpp"

namespace jpc {

/// Energy to transmit `items` content items in one slot: eta^items - 1.
/// Strictly increasing and convex in the item count; zero at zero.
double energy_cost(int items, double eta);

/// Real-rate variant used by the offline taut-string bound.
double energy_cost_rate(double rate, double eta);

/// eta^k for signed integer k, by repeated multiplication (matches the
/// canonical table construction, so independent call sites agree bitwise).
double pow_int(double eta, int k);

/// Feasible transmissions y (and next-buffer levels) from state (b, x):
/// y in [max(0, x-b), B-b+x], equivalently b+ in [max(0, b-x), B].
struct ActionRange {
  int y_min;
  int y_max;
  int next_min;
  int next_max;
};
ActionRange action_bounds(int b, int x, int B);

/// b+ = b + y - x. The caller is responsible for y within action_bounds;
/// a result outside [0, B] means that precondition was violated.
int next_buffer(int b, int x, int y);

/// Expected energy in state s under a next-buffer distribution d over {0..B}:
/// eta^(x-b) * sum_m eta^m d_m - 1. Mass below the feasible floor
/// max(0, b-x) signals an infeasible decision and is rejected.
double expected_state_cost(State s, std::span<const double> next_dist, double eta);

/// Average cost r' * Omega * p for stationary distribution r over buffer
/// levels and per-state expected-cost matrix Omega of shape (B+1)x(X+1).
double average_cost(std::span<const double> r, const Mat& omega,
                    std::span<const double> p);

/// Canonical table of eta^k over a signed exponent range. Every module reads
/// powers from one shared table per instance so that independently computed
/// objective values agree to rounding error.
struct EtaPowers {
  double eta = 2.0;
  int lo = 0;
  int hi = 0;
  std::vector<double> tab;

  EtaPowers() = default;
  EtaPowers(double eta, int lo, int hi);

  double at(int k) const { return tab[static_cast<std::size_t>(k - lo)]; }
  const double* ptr(int k) const { return tab.data() + (k - lo); }

  /// Exponent range [-B, X+B] covering every eta^(m+n-b) the solvers need.
  static EtaPowers for_config(const SystemConfig& cfg);
};

}  // namespace jpc
