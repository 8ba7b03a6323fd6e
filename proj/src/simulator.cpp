#include "jpc/simulator.hpp"

#include <cmath>
#include <ostream>

#include "jpc/model.hpp"

namespace jpc {

namespace {

inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; identical across platforms for a given engine state.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

InverseCdfSampler::InverseCdfSampler(std::span<const double> pmf) {
  cdf_.reserve(pmf.size());
  double acc = 0.0;
  for (double v : pmf) {
    acc += std::max(v, 0.0);
    cdf_.push_back(acc);
  }
  cdf_.back() = std::max(cdf_.back(), 1.0);
}

int InverseCdfSampler::sample(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  for (std::size_t i = 0; i + 1 < cdf_.size(); ++i)
    if (u < cdf_[i]) return static_cast<int>(i);
  return static_cast<int>(cdf_.size()) - 1;
}

int sample_request(std::span<const double> pmf, std::mt19937_64& rng) {
  return InverseCdfSampler(pmf).sample(rng);
}

namespace {

SimulationReport run_simulation(const Policy& policy, const SystemConfig& cfg,
                                std::uint64_t T, std::uint64_t seed, int b0,
                                const Trace* fixed_trace, std::ostream* trace_csv) {
  const int B = cfg.B;
  const int X = cfg.X();
  if (static_cast<int>(policy.levels.size()) != B + 1)
    throw std::invalid_argument("policy/config mismatch: level count");
  for (const auto& lvl : policy.levels)
    if (lvl.d.rows != X + 1 || lvl.d.cols != B + 1)
      throw std::invalid_argument("policy/config mismatch: decision matrix shape");
  if (b0 < 0 || b0 > B) throw std::invalid_argument("initial buffer out of range");
  if (fixed_trace) {
    for (int x : fixed_trace->x)
      if (x < 0 || x > X)
        throw std::invalid_argument("trace request " + std::to_string(x) +
                                    " outside {0.." + std::to_string(X) + "}");
  }

  // Per-(level, request) next-buffer CDFs.
  std::vector<double> row_cdf(static_cast<std::size_t>((B + 1) * (X + 1) * (B + 1)));
  for (int b = 0; b <= B; ++b) {
    for (int x = 0; x <= X; ++x) {
      double acc = 0.0;
      double* out = row_cdf.data() + (static_cast<std::size_t>(b) * (X + 1) + x) * (B + 1);
      const double* row = policy.levels[static_cast<std::size_t>(b)].d.row(x);
      for (int n = 0; n <= B; ++n) {
        acc += std::max(row[n], 0.0);
        out[n] = acc;
      }
      out[B] = std::max(out[B], 1.0);
    }
  }
  std::vector<double> energy_of_y(static_cast<std::size_t>(X + B + 1));
  for (int y = 0; y <= X + B; ++y)
    energy_of_y[static_cast<std::size_t>(y)] = energy_cost(y, cfg.eta);

  std::mt19937_64 rng(seed);
  const InverseCdfSampler request(cfg.pmf);

  SimulationReport rep;
  rep.steps = T;
  rep.seed = seed;
  rep.b0 = b0;
  rep.occupancy_histogram.assign(static_cast<std::size_t>(B + 1), 0);

  int b = b0;
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t on_demand = 0;

  for (std::uint64_t t = 0; t < T; ++t) {
    const int x = fixed_trace ? fixed_trace->x[static_cast<std::size_t>(t)]
                              : request.sample(rng);
    const double* cdf = row_cdf.data() + (static_cast<std::size_t>(b) * (X + 1) + x) * (B + 1);
    const double u = uniform01(rng);
    int next = B;
    for (int n = 0; n <= B; ++n) {
      if (u < cdf[n]) {
        next = n;
        break;
      }
    }
    const int y = next - b + x;
    if (y < 0)
      throw policy_violation("policy drew next buffer " + std::to_string(next) +
                             " from state (b=" + std::to_string(b) +
                             ", x=" + std::to_string(x) +
                             "), implying negative transmission");
    const double e = energy_of_y[static_cast<std::size_t>(y)];
    sum += e;
    sumsq += e * e;
    rep.occupancy_histogram[static_cast<std::size_t>(b)] += 1;
    if (x > b) ++on_demand;
    if (trace_csv)
      (*trace_csv) << t << ',' << b << ',' << x << ',' << y << ',' << e << '\n';
    b = next;
  }

  const double n = static_cast<double>(T);
  rep.total_energy = sum;
  rep.mean_energy = sum / n;
  const double var = T > 1 ? std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) : 0.0;
  rep.std_error = std::sqrt(var / n);
  rep.on_demand_fraction = static_cast<double>(on_demand) / n;
  return rep;
}

}  // namespace

SimulationReport simulate_policy(const Policy& policy, const SystemConfig& cfg,
                                 std::uint64_t T, std::uint64_t seed, int b0,
                                 std::ostream* trace_csv) {
  return run_simulation(policy, cfg, T, seed, b0, nullptr, trace_csv);
}

SimulationReport simulate_policy_on_trace(const Policy& policy, const SystemConfig& cfg,
                                          const Trace& trace, std::uint64_t seed,
                                          int b0) {
  return run_simulation(policy, cfg, trace.x.size(), seed, b0, &trace, nullptr);
}

}  // namespace jpc
