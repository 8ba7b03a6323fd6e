#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>

#include "jpc/baselines.hpp"
#include "jpc/value_iteration.hpp"

namespace jpc {

struct SimulationReport {
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
  int b0 = 0;
  double mean_energy = 0.0;
  double std_error = 0.0;
  double total_energy = 0.0;
  double on_demand_fraction = 0.0;               // slots with x_t > b_t
  std::vector<std::uint64_t> occupancy_histogram;  // start-of-slot buffer level
};

/// Inverse-CDF sampler over a fixed p.m.f.; uniforms are drawn as
/// (rng() >> 11) * 2^-53 so results are engine-deterministic everywhere.
class InverseCdfSampler {
 public:
  explicit InverseCdfSampler(std::span<const double> pmf);
  int sample(std::mt19937_64& rng) const;

 private:
  std::vector<double> cdf_;
};

/// One i.i.d. request draw from p.
int sample_request(std::span<const double> pmf, std::mt19937_64& rng);

/// Runs the policy for T slots from buffer level b0: draw x, draw b+ from row
/// x of D^b, transmit y = b+ - b + x, accrue eta^y - 1. Deterministic for a
/// fixed seed. Throws policy_violation if a sampled transition implies y < 0.
/// When trace_csv is given, writes one "t,b,x,y,energy" row per slot.
SimulationReport simulate_policy(const Policy& policy, const SystemConfig& cfg,
                                 std::uint64_t T, std::uint64_t seed, int b0 = 0,
                                 std::ostream* trace_csv = nullptr);

/// Same dynamics with the request sequence fixed to `trace` (the seed only
/// drives the policy's internal randomization).
SimulationReport simulate_policy_on_trace(const Policy& policy, const SystemConfig& cfg,
                                          const Trace& trace, std::uint64_t seed,
                                          int b0 = 0);

}  // namespace jpc
