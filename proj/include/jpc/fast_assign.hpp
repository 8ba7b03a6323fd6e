#pragma once

#include <span>

#include "jpc/model.hpp"
#include "jpc/types.hpp"

namespace jpc {

/// Distribution a^b of the next buffer level conditioned on the current
/// level b (one row of the transition matrix over buffer levels).
struct MarginalVector {
  int b = 0;
  std::vector<double> a;

  /// Validates p.m.f.-ness (entries >= 0, sum within 1e-9, renormalized).
  static MarginalVector make(int b, std::vector<double> a);
};

/// Per-level decision matrix D^b: row m is the conditional next-buffer
/// distribution given request x = m. Feasible matrices are row-stochastic
/// and zero on the staircase m + n < b.
struct DecisionMatrix {
  int b = 0;
  Mat d;  // (X+1) x (B+1)

  bool satisfies_zero_pattern(double tol = 1e-10) const;

  /// Largest probability mass p_m * D(m, n) sitting below the staircase.
  /// Infeasibility is judged on mass: a conditional entry in a row with tiny
  /// p_m can look large while carrying none.
  double max_forbidden_mass(std::span<const double> p) const;

  /// Throws std::invalid_argument on negative entries, row sums off by more
  /// than 1e-10, or zero-pattern mass above 1e-10.
  void validate(std::span<const double> p) const;
};

struct StripeCell {
  int row = 0;
  int col = 0;
  double mass = 0.0;      // transferred probability mass p_m * D(m,n)
  bool degenerate = false;  // zero-mass cell kept to connect the dual chain
};

/// The staircase support walked by the assignment: rows non-decreasing,
/// columns non-increasing. `visited` counts fill steps (at most X+B+1).
struct StripeSupport {
  std::vector<StripeCell> cells;
  int visited = 0;
};

struct FastResult {
  DecisionMatrix D;
  StripeSupport stripe;
};

/// Greedy stripe fill from corner (m=0, n=B): transfers min(u_m, w_n) between
/// row residual u and column residual w, advancing whichever exhausts (both
/// on a tie). Rows with p_m = 0 are skipped and then filled with a point mass
/// at the smallest feasible column max(0, b-m). The walk itself is agnostic
/// to the level b carried by `a`; feasibility is the caller's concern
/// (see marginal_feasible / h_value).
FastResult fast_assign(std::span<const double> p, const MarginalVector& a);

/// Optimal value of the fixed-marginal subproblem at level a.b:
/// eta^{-b} * Phi_X' diag(p) D Phi_B - 1 with D from fast_assign.
/// Throws infeasible_marginal when the assignment violates the zero pattern
/// (equivalently, when the cumulative feasibility condition fails).
double h_value(const SystemConfig& cfg, const EtaPowers& pows, const MarginalVector& a);
double h_value(const SystemConfig& cfg, const MarginalVector& a);

/// A subgradient of h at `a`: the optimal transportation dual prices of the
/// marginal constraints, recovered from the stripe chain (mu_m + p_m nu_n =
/// p_m eta^{m+n-b} on basic cells, mu pinned to zero at the first row).
/// Defined up to an additive constant shift.
std::vector<double> h_subgradient(const SystemConfig& cfg, const EtaPowers& pows,
                                  const MarginalVector& a);

/// True iff no entry > tol has another entry > tol strictly below and to the
/// right of it (the staircase support pattern of optimal decision matrices).
bool is_generalized_monotone(const Mat& d, double tol = 1e-9);

/// Prefix caps sum_{x >= b-k} p_x for k = 0..b-1 (empty for b = 0).
std::vector<double> hall_caps(int b, std::span<const double> p);

/// Cumulative (Hall) feasibility: sum_{n<=k} a_n <= sum_{x>=b-k} p_x for all
/// k < b. Strictly stronger than the per-column bound a_m <= sum_{x>=b-m} p_x,
/// which is necessary but not sufficient; see the b=3 regression test for a
/// marginal that passes every per-column bound yet is unrealizable.
bool marginal_feasible(int b, std::span<const double> p, std::span<const double> a);

}  // namespace jpc
