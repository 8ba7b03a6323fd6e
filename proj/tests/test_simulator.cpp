#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jpc/baselines.hpp"
#include "jpc/serialization.hpp"
#include "jpc/simulator.hpp"
#include "jpc/validation.hpp"

using namespace jpc;

namespace {

Policy solved(const SystemConfig& cfg, double eps = 1e-8) {
  VIOptions o;
  o.eps = eps;
  o.record_gain_trace = false;
  return value_iterate_degenerated(cfg, o).policy;
}

Policy on_demand_policy(const SystemConfig& cfg) {
  std::vector<DecisionMatrix> levels;
  for (int b = 0; b <= cfg.B; ++b) {
    Mat d(cfg.X() + 1, cfg.B + 1, 0.0);
    for (int x = 0; x <= cfg.X(); ++x) d(x, std::max(0, b - x)) = 1.0;
    levels.push_back(DecisionMatrix{b, std::move(d)});
  }
  return assemble_policy(cfg, levels, 0.0, 0.0, "on-demand");
}

}  // namespace

TEST_CASE("request sampling: point mass and empirical means") {
  std::mt19937_64 rng(1);
  const std::vector<double> point{0.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_request(point, rng) == 3);

  const InverseCdfSampler coin(std::vector<double>{0.5, 0.5});
  std::mt19937_64 rng2(7);
  double mean = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) mean += coin.sample(rng2);
  mean /= n;
  CHECK(std::abs(mean - 0.5) <= 0.002);  // 4 sigma

  const auto uni = SystemConfig::uniform(0, 1.4, 20);
  const InverseCdfSampler usamp(uni.pmf);
  std::mt19937_64 rng3(11);
  mean = 0.0;
  for (int i = 0; i < n; ++i) mean += usamp.sample(rng3);
  mean /= n;
  CHECK(std::abs(mean - 10.0) <= 0.03);  // sigma = 6.06, 4 sigma / sqrt(n)
}

TEST_CASE("pure on-demand simulation reproduces the real-time cost") {
  const auto cfg = SystemConfig::make(1, 2.0, {0.5, 0.5});
  const auto pol = on_demand_policy(cfg);
  const auto rep = simulate_policy(pol, cfg, 1000000, 99);
  CHECK(std::abs(rep.mean_energy - no_buffer_cost(cfg)) <= 0.01 * no_buffer_cost(cfg));
}

TEST_CASE("solved ground-truth instance simulates to its average cost") {
  const auto cfg = SystemConfig::make(1, 2.0, {0.5, 0.5});
  const auto pol = solved(cfg, 1e-9);
  const auto rep = simulate_policy(pol, cfg, 1000000, 12345);
  CHECK(std::abs(rep.mean_energy - 0.5) <= 0.005);
  CHECK(std::abs(rep.mean_energy - pol.L) <= std::max(0.02 * pol.L, 4 * rep.std_error));
}

TEST_CASE("zero demand never transmits and never moves the buffer") {
  const auto cfg = SystemConfig::make(2, 1.4, {1.0, 0.0});
  const auto pol = solved(cfg);
  const auto rep = simulate_policy(pol, cfg, 5000, 3, /*b0=*/1);
  CHECK(rep.mean_energy == doctest::Approx(0.0));
  CHECK(rep.occupancy_histogram[1] == 5000);
  CHECK(rep.on_demand_fraction == doctest::Approx(0.0));
}

TEST_CASE("same seed gives a bit-identical report") {
  const auto cfg = SystemConfig::uniform(3, 1.4, 5);
  const auto pol = solved(cfg);
  const auto r1 = report_to_json(simulate_policy(pol, cfg, 20000, 777)).dump();
  const auto r2 = report_to_json(simulate_policy(pol, cfg, 20000, 777)).dump();
  CHECK(r1 == r2);
  const auto r3 = report_to_json(simulate_policy(pol, cfg, 20000, 778)).dump();
  CHECK(r1 != r3);
}

TEST_CASE("histogram matches the stationary distribution in total variation") {
  const auto cfg = SystemConfig::uniform(4, 1.4, 6);
  const auto pol = solved(cfg);
  REQUIRE_FALSE(pol.multichain);
  const std::uint64_t T = 1000000;
  const auto rep = simulate_policy(pol, cfg, T, 31337);
  double tv = 0.0;
  for (int b = 0; b <= cfg.B; ++b)
    tv += std::abs(static_cast<double>(rep.occupancy_histogram[b]) / static_cast<double>(T) -
                   pol.r[b]);
  CHECK(tv / 2.0 <= 0.02);
}

TEST_CASE("empirical mean converges to L on random solved instances") {
  std::mt19937_64 rng(2025);
  for (int it = 0; it < 4; ++it) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.1, 1.9);
    const auto pol = solved(cfg);
    const auto rep = simulate_policy(pol, cfg, 1000000, 1000 + it);
    CHECK(std::abs(rep.mean_energy - pol.L) <=
          std::max(0.02 * pol.L, 4 * rep.std_error) + 1e-12);
  }
}

TEST_CASE("per-slot trace rows follow the buffer recursion") {
  const auto cfg = SystemConfig::uniform(2, 1.5, 3);
  const auto pol = solved(cfg);
  std::ostringstream csv;
  simulate_policy(pol, cfg, 50, 5, 0, &csv);
  std::istringstream in(csv.str());
  std::string line;
  int b_expect = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    int t, b, x, y;
    double e;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%d,%lf", &t, &b, &x, &y, &e) == 5);
    CHECK(b == b_expect);
    CHECK(y >= 0);
    CHECK(e == doctest::Approx(energy_cost(y, cfg.eta)).epsilon(1e-12));
    b_expect = b + y - x;
    ++rows;
  }
  CHECK(rows == 50);
}

TEST_CASE("policy violations are reported with the offending state") {
  const auto cfg = SystemConfig::make(1, 2.0, {0.5, 0.5});
  auto pol = on_demand_policy(cfg);
  // corrupt level 1, row x=0: a draw of b+ = 0 implies y = -1
  pol.levels[1].d(0, 0) = 1.0;
  pol.levels[1].d(0, 1) = 0.0;
  // force the chain into level 1 first
  pol.levels[0].d(0, 1) = 1.0;
  pol.levels[0].d(0, 0) = 0.0;
  CHECK_THROWS_AS(simulate_policy(pol, cfg, 1000, 17), policy_violation);
}

TEST_CASE("mismatched policy and config are rejected") {
  const auto cfg = SystemConfig::make(1, 2.0, {0.5, 0.5});
  const auto other = SystemConfig::uniform(3, 1.4, 4);
  const auto pol = solved(cfg);
  CHECK_THROWS_AS(simulate_policy(pol, other, 100, 1), std::invalid_argument);
}

TEST_CASE("trace-driven simulation consumes the given requests") {
  const auto cfg = SystemConfig::make(2, 1.4, {0.4, 0.3, 0.3});
  const auto pol = on_demand_policy(cfg);
  const Trace tr{{2, 0, 1, 2, 0}, 0};
  const auto rep = simulate_policy_on_trace(pol, cfg, tr, 9);
  // on-demand: energy is exactly the per-slot request cost
  double want = 0.0;
  for (int x : tr.x) want += energy_cost(x, cfg.eta);
  CHECK(rep.total_energy == doctest::Approx(want).epsilon(1e-12));
}
