#pragma once

#include <span>
#include <string>

#include "jpc/fast_assign.hpp"

namespace jpc {

enum class BellmanMethod { ExactRowwise, ConvexMarginal };

BellmanMethod bellman_method_from_string(const std::string& s);
const char* to_string(BellmanMethod m);

struct SolverOptions {
  BellmanMethod method = BellmanMethod::ExactRowwise;
  int max_iters = 10000;
  double inner_tol = 1e-8;
  // Golden-section steps of the line search along a conditional-gradient
  // direction (the 1-D restriction is convex piecewise linear).
  int line_search_steps = 60;
  // The conditional-gradient certificate cannot close at optima interior to a
  // kink (any single-piece subgradient keeps the gap open). When enabled, a
  // stalled run finishes with the exact cumulative-space solve; when disabled,
  // the solver throws convergence_error instead.
  bool exact_finish = true;
};

struct BellmanResult {
  int b = 0;
  double value = 0.0;
  MarginalVector a_star;
  DecisionMatrix D_star;
  int iterations = 0;  // inner iterations (1 for the exact solver)
  double gap = 0.0;    // certified duality-gap surrogate at return
};

/// Exact one-step optimum: substituting a = D'p makes the joint objective
/// sum_m p_m sum_n D(m,n) (eta^{m+n-b} + v_n) - 1, linear in D and separable
/// by row, so each row takes a unit mass at its argmin column (ties toward
/// the smaller next level).
BellmanResult bellman_exact_rowwise(int b, const SystemConfig& cfg,
                                    const EtaPowers& pows,
                                    std::span<const double> v_prev);

/// First-order solver over the marginal polytope {a >= 0, 1'a = 1, prefix
/// caps}: conditional gradient with a greedy linear-minimization step, exact
/// line search, and the standard lower-bound gap certificate built from
/// h_subgradient. Throws convergence_error when the certificate does not
/// reach opts.inner_tol within opts.max_iters.
BellmanResult bellman_convex_marginal(int b, const SystemConfig& cfg,
                                      const EtaPowers& pows,
                                      std::span<const double> v_prev,
                                      const SolverOptions& opts);

/// Greedy linear minimization over the prefix-capped simplex: fills the
/// cheapest coordinates first, each up to the tightest remaining prefix cap.
std::vector<double> lmo_prefix_capped(std::span<const double> g, int b,
                                      std::span<const double> p);

/// Exact minimizer of h(a) + a'v over the prefix-capped simplex. In the
/// cumulative-tail coordinates z_n = sum_{j>=n} a_j the objective separates
/// into per-coordinate convex piecewise-linear terms under a chain
/// constraint, and some optimum has every z_n on the shared breakpoint grid,
/// so a small DP over candidates solves it exactly.
MarginalVector exact_marginal_minimizer(int b, const SystemConfig& cfg,
                                        const EtaPowers& pows,
                                        std::span<const double> v_prev);

}  // namespace jpc
