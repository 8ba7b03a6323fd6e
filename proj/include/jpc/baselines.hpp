#pragma once

#include <cstdint>

#include "jpc/types.hpp"

namespace jpc {

/// A finite request trace with its seed provenance.
struct Trace {
  std::vector<int> x;
  std::uint64_t seed = 0;
};

/// Offline transmission schedule: per-slot real-valued rates y, cumulative Y,
/// and total energy. Feasible schedules keep R_t <= Y_t <= R_t + B and end at
/// Y_T = R_T (with the default empty-start anchor).
struct OfflineSchedule {
  std::vector<double> y;
  std::vector<double> Y;
  double total_energy = 0.0;
};

/// Real-time transmission: sum_x p_x (eta^x - 1).
double no_buffer_cost(const SystemConfig& cfg);

/// Stationary transmission at the average rate: eta^{E[x]} - 1.
double infinite_buffer_cost(const SystemConfig& cfg);

/// Non-causal offline optimum: the taut (shortest) non-decreasing path
/// through the corridor [max(0, R_t - b0), R_t - b0 + B], anchored at 0 and
/// pinned to total demand at the horizon. By convexity of the energy curve
/// this minimizes the total energy over all feasible schedules. Amortized
/// linear anchor-and-scan construction.
OfflineSchedule taut_string_schedule(const Trace& trace, int B, double eta, int b0 = 0);

/// Samples T i.i.d. requests from cfg.pmf (mt19937_64, inverse CDF).
Trace sample_trace(const SystemConfig& cfg, std::size_t T, std::uint64_t seed);

}  // namespace jpc
