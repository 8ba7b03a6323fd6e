#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jpc/fast_assign.hpp"
#include "jpc/validation.hpp"

using namespace jpc;

TEST_CASE("two-point instance assigns the anti-diagonal") {
  const std::vector<double> p{0.5, 0.5};
  const auto fr = fast_assign(p, MarginalVector{0, {0.5, 0.5}});
  CHECK(fr.D.d(0, 0) == doctest::Approx(0.0));
  CHECK(fr.D.d(0, 1) == doctest::Approx(1.0));
  CHECK(fr.D.d(1, 0) == doctest::Approx(1.0));
  CHECK(fr.D.d(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("hand-traced three-row instance, including the equal branch") {
  const std::vector<double> p{0.5, 0.25, 0.25};
  const auto fr = fast_assign(p, MarginalVector{0, {0.0, 0.25, 0.5, 0.25}});
  const std::vector<std::vector<double>> want{
      {0.0, 0.0, 0.5, 0.5}, {0.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 4; ++n)
      CHECK(fr.D.d(m, n) == doctest::Approx(want[m][n]).epsilon(1e-12));
}

TEST_CASE("point mass marginal concentrates every positive row at B") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 50; ++it) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.2, 2.0);
    std::vector<double> a(cfg.B + 1, 0.0);
    a.back() = 1.0;
    const auto fr = fast_assign(cfg.pmf, MarginalVector{0, a});
    for (int m = 0; m <= cfg.X(); ++m) CHECK(fr.D.d(m, cfg.B) == doctest::Approx(1.0));
  }
}

TEST_CASE("zero-probability rows are skipped then pinned to the feasible floor") {
  const std::vector<double> p{0.5, 0.0, 0.5};
  const int b = 2;
  const auto fr = fast_assign(p, MarginalVector{b, {0.0, 0.3, 0.5, 0.2}});
  // row 1 carries no mass; it is filled at max(0, b-1) = 1
  CHECK(fr.D.d(1, 1) == doctest::Approx(1.0));
  double row_sum = 0.0;
  for (int n = 0; n <= 3; ++n) row_sum += fr.D.d(1, n);
  CHECK(row_sum == doctest::Approx(1.0));
  // the walk never visits the zero row
  for (const auto& c : fr.stripe.cells) CHECK(c.row != 1);
}

TEST_CASE("stripe is a staircase, reconstruction and row sums are tight") {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 400; ++it) {
    const auto cfg = validation::random_config(rng, 6, 6, 1.2, 2.2);
    const int b = static_cast<int>(rng() % (cfg.B + 1));
    const auto a = validation::random_feasible_marginal(rng, cfg, b);
    const auto fr = fast_assign(cfg.pmf, a);

    // complexity: at most X+B+1 fills
    CHECK(fr.stripe.visited <= cfg.X() + cfg.B + 1);

    // staircase order
    for (std::size_t i = 1; i < fr.stripe.cells.size(); ++i) {
      CHECK(fr.stripe.cells[i].row >= fr.stripe.cells[i - 1].row);
      CHECK(fr.stripe.cells[i].col <= fr.stripe.cells[i - 1].col);
    }

    // D' p = a and unit row sums
    for (int n = 0; n <= cfg.B; ++n) {
      double col = 0.0;
      for (int m = 0; m <= cfg.X(); ++m) col += fr.D.d(m, n) * cfg.pmf[m];
      CHECK(std::abs(col - a.a[n]) <= 1e-10);
    }
    for (int m = 0; m <= cfg.X(); ++m) {
      double rs = 0.0;
      for (int n = 0; n <= cfg.B; ++n) {
        rs += fr.D.d(m, n);
        CHECK(fr.D.d(m, n) >= 0.0);
      }
      CHECK(std::abs(rs - 1.0) <= 1e-10);
    }

    // feasible marginals realize the zero pattern
    CHECK(fr.D.satisfies_zero_pattern());
    CHECK(is_generalized_monotone(fr.D.d));
  }
}

TEST_CASE("h value examples") {
  const auto cfg2 = SystemConfig::make(1, 2.0, {0.5, 0.5});
  CHECK(h_value(cfg2, MarginalVector{0, {0.5, 0.5}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h_value(cfg2, MarginalVector{0, {1.0, 0.0}}) == doctest::Approx(0.5).epsilon(1e-12));

  // zero-transmission steady state: p = point mass at 0, a = point mass at b
  const auto cfg3 = SystemConfig::make(3, 1.7, {1.0});
  for (int b = 0; b <= 3; ++b) {
    std::vector<double> a(4, 0.0);
    a[b] = 1.0;
    CHECK(h_value(cfg3, MarginalVector{b, a}) == doctest::Approx(0.0));
  }
}

TEST_CASE("h matches the LP oracle on random instances") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 150; ++it) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.15, 2.2);
    const int b = static_cast<int>(rng() % (cfg.B + 1));
    const auto a = validation::random_feasible_marginal(rng, cfg, b);
    const auto lp = validation::lp_transport_oracle(b, cfg.eta, cfg.pmf, a.a);
    REQUIRE(lp.feasible);
    CHECK(std::abs(h_value(cfg, a) - lp.cost) <= 1e-9);
  }
}

TEST_CASE("h is convex along random chords") {
  std::mt19937_64 rng(31415);
  for (int it = 0; it < 200; ++it) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.15, 2.2);
    const int b = static_cast<int>(rng() % (cfg.B + 1));
    const auto a1 = validation::random_feasible_marginal(rng, cfg, b);
    const auto a2 = validation::random_feasible_marginal(rng, cfg, b);
    const double lam = static_cast<double>(rng() % 1000 + 1) / 1001.0;
    std::vector<double> mix(a1.a.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix[i] = lam * a1.a[i] + (1.0 - lam) * a2.a[i];
    CHECK(h_value(cfg, MarginalVector{b, mix}) <=
          lam * h_value(cfg, a1) + (1.0 - lam) * h_value(cfg, a2) + 1e-9);
  }
}

TEST_CASE("subgradient example: dual prices (1, 2) up to a shift") {
  const auto cfg = SystemConfig::make(1, 2.0, {0.5, 0.5});
  const auto pows = EtaPowers::for_config(cfg);
  const auto nu = h_subgradient(cfg, pows, MarginalVector{0, {0.5, 0.5}});
  CHECK(nu[1] - nu[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nu[0] == doctest::Approx(1.0).epsilon(1e-12));  // column-first chain pins these
  CHECK(nu[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("subgradient inequality holds on random pairs") {
  std::mt19937_64 rng(777);
  int pairs = 0;
  while (pairs < 1000) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.15, 2.2);
    const auto pows = EtaPowers::for_config(cfg);
    const int b = static_cast<int>(rng() % (cfg.B + 1));
    const auto a = validation::random_feasible_marginal(rng, cfg, b);
    const auto nu = h_subgradient(cfg, pows, a);
    const double ha = h_value(cfg, pows, a);
    for (int k = 0; k < 5; ++k) {
      const auto ap = validation::random_feasible_marginal(rng, cfg, b);
      double bound = ha;
      for (std::size_t i = 0; i < nu.size(); ++i) bound += nu[i] * (ap.a[i] - a.a[i]);
      CHECK(h_value(cfg, pows, ap) >= bound - 1e-9);
      ++pairs;
    }
  }
}

TEST_CASE("one-sided finite differences bound the subgradient slope") {
  std::mt19937_64 rng(555);
  const double t = 1e-6;
  for (int it = 0; it < 120; ++it) {
    const auto cfg = validation::random_config(rng, 5, 5, 1.15, 2.0);
    const auto pows = EtaPowers::for_config(cfg);
    const int b = static_cast<int>(rng() % (cfg.B + 1));
    const auto a = validation::random_feasible_marginal(rng, cfg, b);
    const auto nu = h_subgradient(cfg, pows, a);
    const double ha = h_value(cfg, pows, a);
    for (int i = 0; i <= cfg.B; ++i) {
      for (int j = 0; j <= cfg.B; ++j) {
        if (i == j) continue;
        std::vector<double> fwd = a.a;
        fwd[i] += t;
        fwd[j] -= t;
        bool ok = fwd[j] >= 0.0 && marginal_feasible(b, cfg.pmf, fwd);
        if (!ok) continue;
        // forward difference of a convex function dominates the subgradient slope
        const double slope = nu[i] - nu[j];
        const double fd = (h_value(cfg, pows, MarginalVector{b, fwd}) - ha) / t;
        CHECK(fd >= slope - 1e-6);
      }
    }
  }
}

TEST_CASE("generalized monotonicity test cases") {
  Mat anti(2, 2, 0.0);
  anti(0, 1) = 1.0;
  anti(1, 0) = 1.0;
  CHECK(is_generalized_monotone(anti));
  Mat diag(2, 2, 0.0);
  diag(0, 0) = 1.0;
  diag(1, 1) = 1.0;
  CHECK_FALSE(is_generalized_monotone(diag));
}

TEST_CASE("marginal feasibility: trivial, counterexample, cumulative") {
  // b = 0: no zero pattern, everything feasible
  const std::vector<double> p1{0.3, 0.7};
  CHECK(marginal_feasible(0, p1, std::vector<double>{0.2, 0.5, 0.3}));

  // the per-column bounds hold but the cumulative condition fails
  const std::vector<double> p2{0.5, 0.25, 0.25};
  const std::vector<double> bad{0.0, 0.25, 0.5, 0.25};
  CHECK_FALSE(marginal_feasible(3, p2, bad));

  const std::vector<double> p3{0.5, 0.5};
  CHECK(marginal_feasible(2, p3, std::vector<double>{0.0, 0.5, 0.5}));
}

TEST_CASE("unrealizable marginal raises instead of returning a value") {
  const auto cfg = SystemConfig::make(3, 1.4, {0.5, 0.25, 0.25});
  const MarginalVector bad{3, {0.0, 0.25, 0.5, 0.25}};
  const auto fr = fast_assign(cfg.pmf, bad);
  CHECK_FALSE(fr.D.satisfies_zero_pattern());
  CHECK_THROWS_AS(h_value(cfg, bad), infeasible_marginal);
  CHECK_THROWS_AS(h_subgradient(cfg, EtaPowers::for_config(cfg), bad), infeasible_marginal);
}

TEST_CASE("the structural checks catch a corrupted assignment") {
  // A deliberately broken fill (as a flipped tie-break would produce) must
  // trip the staircase test and the min(u, w) identity.
  const std::vector<double> p{0.5, 0.25, 0.25};
  const MarginalVector a{0, {0.0, 0.25, 0.5, 0.25}};
  auto fr = fast_assign(p, a);
  REQUIRE(is_generalized_monotone(fr.D.d));

  Mat broken = fr.D.d;
  // move row 1's mass from column 2 to column 3, below-right of (0, 2)
  broken(1, 2) = 0.0;
  broken(1, 3) = 1.0;
  CHECK_FALSE(is_generalized_monotone(broken));

  // the identity D(m,n) = min(u_m, w_n) fails for the corrupted matrix
  bool identity_holds = true;
  for (int m = 0; m <= 2 && identity_holds; ++m) {
    for (int n = 0; n <= 3 && identity_holds; ++n) {
      double col_used = 0.0;
      for (int i = 0; i < m; ++i) col_used += broken(i, n) * p[i];
      double row_right = 0.0;
      for (int j = n + 1; j <= 3; ++j) row_right += broken(m, j);
      const double u = (a.a[n] - col_used) / p[m];
      const double w = 1.0 - row_right;
      identity_holds = std::abs(broken(m, n) - std::min(u, w)) <= 1e-9;
    }
  }
  CHECK_FALSE(identity_holds);
}

TEST_CASE("non-normalized inputs are rejected") {
  CHECK_THROWS_AS(fast_assign(std::vector<double>{0.5, 0.4}, MarginalVector{0, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fast_assign(std::vector<double>{0.5, 0.5}, MarginalVector{0, {0.9, 0.0}}),
                  std::invalid_argument);
}
