#include "jpc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jpc/model.hpp"
#include "jpc/simulator.hpp"

namespace jpc {

double no_buffer_cost(const SystemConfig& cfg) {
  double acc = 0.0;
  for (int x = 0; x <= cfg.X(); ++x)
    acc += cfg.pmf[static_cast<std::size_t>(x)] * energy_cost(x, cfg.eta);
  return acc;
}

double infinite_buffer_cost(const SystemConfig& cfg) {
  return std::pow(cfg.eta, cfg.mean_request()) - 1.0;
}

Trace sample_trace(const SystemConfig& cfg, std::size_t T, std::uint64_t seed) {
  Trace tr;
  tr.seed = seed;
  tr.x.resize(T);
  std::mt19937_64 rng(seed);
  const InverseCdfSampler sampler(cfg.pmf);
  for (std::size_t t = 0; t < T; ++t) tr.x[t] = sampler.sample(rng);
  return tr;
}

OfflineSchedule taut_string_schedule(const Trace& trace, int B, double eta, int b0) {
  const std::size_t T = trace.x.size();
  if (T == 0) throw std::invalid_argument("taut string: empty trace");
  if (B < 0) throw std::invalid_argument("taut string: negative buffer size");

  // Corridor for the cumulative transmitted total Y_t:
  //   floor_t = max(0, R_t - b0)   (demand must be met each slot)
  //   ceil_t  = min(R_t - b0 + B, floor_T)   (buffer cap; nothing transmitted
  //             beyond the total the horizon can absorb)
  // Index 0 is the anchor Y_0 = 0.
  std::vector<double> floor_v(T + 1, 0.0), ceil_v(T + 1, 0.0);
  double running = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    running += trace.x[t - 1];
    floor_v[t] = std::max(0.0, running - b0);
    ceil_v[t] = running - b0 + B;
  }
  const double pin = floor_v[T];
  for (std::size_t t = 1; t <= T; ++t) ceil_v[t] = std::min(ceil_v[t], pin);
  ceil_v[T] = floor_v[T] = pin;

  // Anchor-and-scan string pulling: from the current anchor, scan forward
  // narrowing the admissible slope interval; on a conflict, bend at the
  // binding extreme point and continue from there.
  std::vector<double> Y(T + 1, 0.0);
  std::size_t t0 = 0;
  double y0 = 0.0;
  while (t0 < T) {
    double best_up = std::numeric_limits<double>::infinity();
    double best_dn = 0.0;  // rates are non-negative
    std::size_t arg_up = t0, arg_dn = t0;
    std::size_t bend = 0;
    double bend_val = 0.0;
    for (std::size_t t = t0 + 1; t <= T; ++t) {
      const double dt = static_cast<double>(t - t0);
      const double su = (ceil_v[t] - y0) / dt;
      const double sd = (floor_v[t] - y0) / dt;
      if (sd > best_up) {  // must bend down onto the tightest ceiling point
        bend = arg_up;
        bend_val = ceil_v[arg_up];
        break;
      }
      if (su < best_dn) {  // must bend up onto the tightest floor point
        bend = arg_dn;
        bend_val = floor_v[arg_dn];
        break;
      }
      if (su < best_up) {
        best_up = su;
        arg_up = t;
      }
      if (sd > best_dn) {
        best_dn = sd;
        arg_dn = t;
      }
      if (t == T) {  // pinned endpoint reached without conflict
        bend = T;
        bend_val = pin;
      }
    }
    const double slope = (bend_val - y0) / static_cast<double>(bend - t0);
    for (std::size_t t = t0 + 1; t <= bend; ++t)
      Y[t] = y0 + slope * static_cast<double>(t - t0);
    Y[bend] = bend_val;
    t0 = bend;
    y0 = bend_val;
  }

  OfflineSchedule sched;
  sched.Y.assign(Y.begin() + 1, Y.end());
  sched.y.resize(T);
  sched.total_energy = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double prev = t == 0 ? 0.0 : sched.Y[t - 1];
    sched.y[t] = std::max(0.0, sched.Y[t] - prev);
    sched.total_energy += energy_cost_rate(sched.y[t], eta);
  }
  return sched;
}

}  // namespace jpc
