#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jpc/baselines.hpp"
#include "jpc/model.hpp"
#include "jpc/validation.hpp"

using namespace jpc;

TEST_CASE("no-buffer cost") {
  CHECK(no_buffer_cost(SystemConfig::make(0, 1.7, {1.0})) == doctest::Approx(0.0));
  CHECK(no_buffer_cost(SystemConfig::make(0, 2.0, {0.5, 0.5})) == doctest::Approx(0.5));
  // closed form (eta^(X+1) - 1) / ((eta-1)(X+1)) - 1 for the uniform law
  const auto uni = SystemConfig::uniform(0, 1.4, 20);
  CHECK(no_buffer_cost(uni) == doctest::Approx(138.3280447564269).epsilon(1e-12));
}

TEST_CASE("infinite-buffer cost") {
  const auto point = SystemConfig::make(4, 1.9, {0.0, 0.0, 0.0, 1.0});
  CHECK(infinite_buffer_cost(point) == doctest::Approx(no_buffer_cost(point)).epsilon(1e-12));
  const auto uni = SystemConfig::uniform(0, 1.4, 20);
  CHECK(infinite_buffer_cost(uni) == doctest::Approx(27.925465497599983).epsilon(1e-12));
  CHECK(infinite_buffer_cost(SystemConfig::make(1, 2.0, {0.5, 0.5})) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("taut string: constant trace is already taut") {
  for (int B : {0, 1, 4}) {
    const auto s = taut_string_schedule(Trace{{3, 3, 3}, 0}, B, 1.4);
    for (double y : s.y) CHECK(y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.total_energy == doctest::Approx(3.0 * energy_cost(3, 1.4)).epsilon(1e-12));
  }
}

TEST_CASE("taut string: two-slot smoothing example") {
  // frozen by a one-dimensional grid search over Y_1 in [0, 2]
  const auto s = taut_string_schedule(Trace{{0, 4}, 0}, 2, 1.4);
  CHECK(s.y[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.y[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.total_energy == doctest::Approx(1.92).epsilon(1e-12));
}

TEST_CASE("taut string: zero-width corridor reproduces the trace") {
  std::mt19937_64 rng(13);
  std::vector<int> x(200);
  for (int& v : x) v = static_cast<int>(rng() % 7);
  const auto s = taut_string_schedule(Trace{x, 0}, 0, 1.3);
  for (std::size_t t = 0; t < x.size(); ++t)
    CHECK(s.y[t] == doctest::Approx(static_cast<double>(x[t])).epsilon(1e-12));
}

TEST_CASE("taut string: corridor feasibility and terminal condition") {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 40; ++it) {
    const int B = static_cast<int>(rng() % 6);
    const int T = 1 + static_cast<int>(rng() % 300);
    std::vector<int> x(T);
    for (int& v : x) v = static_cast<int>(rng() % 9);
    const auto s = taut_string_schedule(Trace{x, 0}, B, 1.4);
    double R = 0.0;
    for (int t = 0; t < T; ++t) {
      R += x[t];
      CHECK(s.Y[t] >= R - 1e-9);
      CHECK(s.Y[t] <= R + B + 1e-9);
      if (t > 0) CHECK(s.Y[t] >= s.Y[t - 1] - 1e-12);
      CHECK(s.y[t] >= -1e-12);
    }
    CHECK(s.Y[T - 1] == doctest::Approx(R).epsilon(1e-12));
  }
}

TEST_CASE("taut string matches the discretized offline DP oracle") {
  std::mt19937_64 rng(2718);
  for (int it = 0; it < 8; ++it) {
    const int B = 1 + static_cast<int>(rng() % 2);
    const int T = 3 + static_cast<int>(rng() % 6);
    std::vector<int> x(T);
    for (int& v : x) v = static_cast<int>(rng() % 5);
    const double eta = 1.2 + 0.1 * static_cast<double>(rng() % 5);
    const auto s = taut_string_schedule(Trace{x, 0}, B, eta);
    const double dp = validation::offline_schedule_dp_oracle(x, B, eta, 1600);
    CHECK(s.total_energy <= dp + 1e-6);       // the DP is grid-restricted
    CHECK(std::abs(s.total_energy - dp) <= 1e-3);
  }
}

TEST_CASE("nonzero initial buffer shifts the corridor") {
  // total demand below b0: nothing needs transmitting
  const auto s = taut_string_schedule(Trace{{1, 0, 1}, 0}, 4, 1.5, 3);
  CHECK(s.total_energy == doctest::Approx(0.0));
  CHECK(s.Y.back() == doctest::Approx(0.0));
}

TEST_CASE("empty trace is rejected") {
  CHECK_THROWS_AS(taut_string_schedule(Trace{{}, 0}, 2, 1.4), std::invalid_argument);
}

TEST_CASE("per-slot taut cost approaches the infinite-buffer floor from above") {
  const auto cfg = SystemConfig::uniform(12, 1.4, 8);
  const auto tr = sample_trace(cfg, 100000, 4242);
  const auto s = taut_string_schedule(tr, cfg.B, cfg.eta);
  const double per_slot = s.total_energy / static_cast<double>(tr.x.size());
  const double floor_cost = infinite_buffer_cost(cfg);
  CHECK(per_slot >= floor_cost * 0.98);
  CHECK(per_slot <= no_buffer_cost(cfg));
}
