#include "jpc/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jpc/kernels.hpp"

namespace jpc {

BellmanMethod bellman_method_from_string(const std::string& s) {
  if (s == "exact-rowwise") return BellmanMethod::ExactRowwise;
  if (s == "convex-marginal") return BellmanMethod::ConvexMarginal;
  throw std::invalid_argument("unknown bellman method: " + s);
}

const char* to_string(BellmanMethod m) {
  return m == BellmanMethod::ExactRowwise ? "exact-rowwise" : "convex-marginal";
}

BellmanResult bellman_exact_rowwise(int b, const SystemConfig& cfg,
                                    const EtaPowers& pows,
                                    std::span<const double> v_prev) {
  const int X = cfg.X();
  const int B = cfg.B;
  Mat D(X + 1, B + 1, 0.0);
  std::vector<double> a(static_cast<std::size_t>(B + 1), 0.0);
  double total = 0.0;
  for (int m = 0; m <= X; ++m) {
    const int lo = std::max(0, b - m);
    // costs eta^{m+n-b} over n = lo..B are a contiguous slice of the table
    const auto res =
        kernels::argmin_sum(pows.ptr(m - b + lo), v_prev.data() + lo, B - lo + 1);
    const int n = lo + res.index;
    D(m, n) = 1.0;
    const double pm = cfg.pmf[static_cast<std::size_t>(m)];
    a[static_cast<std::size_t>(n)] += pm;
    total += pm * res.value;
  }
  BellmanResult out;
  out.b = b;
  out.value = total - 1.0;
  out.a_star = MarginalVector{b, std::move(a)};
  out.D_star = DecisionMatrix{b, std::move(D)};
  out.iterations = 1;
  out.gap = 0.0;
  return out;
}

std::vector<double> lmo_prefix_capped(std::span<const double> g, int b,
                                      std::span<const double> p) {
  const int B = static_cast<int>(g.size()) - 1;
  const auto caps = hall_caps(b, p);
  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return g[static_cast<std::size_t>(i)] <
                                              g[static_cast<std::size_t>(j)]; });
  std::vector<double> a(g.size(), 0.0);
  std::vector<double> prefix(caps.size(), 0.0);  // mass placed at columns <= k
  double total = 0.0;
  for (int j : order) {
    double room = 1.0 - total;
    for (int k = j; k < b; ++k)
      room = std::min(room, caps[static_cast<std::size_t>(k)] -
                                prefix[static_cast<std::size_t>(k)]);
    if (room <= 0.0) continue;
    a[static_cast<std::size_t>(j)] += room;
    total += room;
    for (int k = j; k < b; ++k) prefix[static_cast<std::size_t>(k)] += room;
    if (total >= 1.0) break;
  }
  if (total < 1.0) a[static_cast<std::size_t>(B)] += 1.0 - total;  // rounding residual
  return a;
}

namespace {

MarginalVector mix(const MarginalVector& a, std::span<const double> s, double gamma) {
  std::vector<double> out(a.a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - gamma) * a.a[i] + gamma * s[i];
  return MarginalVector{a.b, std::move(out)};
}

}  // namespace

MarginalVector exact_marginal_minimizer(int b, const SystemConfig& cfg,
                                        const EtaPowers& pows,
                                        std::span<const double> v_prev) {
  const int B = cfg.B;
  const int X = cfg.X();
  if (B == 0) return MarginalVector{b, {1.0}};

  // H(z) = integral of eta^{row at cumulative-p position u} du on [0, z]:
  // the stripe fill is the tail-quantile coupling, so
  //   h(a) + 1 = eta^{-b} * [H(1) + sum_n eta^{n-1}(eta-1) H(z_n)].
  std::vector<double> pcum(static_cast<std::size_t>(X + 1));
  std::vector<double> hcum(static_cast<std::size_t>(X + 1));
  double pc = 0.0, hc = 0.0;
  for (int m = 0; m <= X; ++m) {
    pc += cfg.pmf[static_cast<std::size_t>(m)];
    hc += cfg.pmf[static_cast<std::size_t>(m)] * pows.at(m);
    pcum[static_cast<std::size_t>(m)] = std::min(pc, 1.0);
    hcum[static_cast<std::size_t>(m)] = hc;
  }
  pcum[static_cast<std::size_t>(X)] = 1.0;
  const auto H = [&](double z) {
    int m = static_cast<int>(std::lower_bound(pcum.begin(), pcum.end(), z) - pcum.begin());
    m = std::min(m, X);
    const double base = m == 0 ? 0.0 : hcum[static_cast<std::size_t>(m - 1)];
    const double pprev = m == 0 ? 0.0 : pcum[static_cast<std::size_t>(m - 1)];
    return base + pows.at(m) * (z - pprev);
  };

  // Lower bounds from the prefix caps: z_j >= 1 - c_{j-1} for j <= b.
  const auto caps = hall_caps(b, cfg.pmf);
  std::vector<double> lo(static_cast<std::size_t>(B + 1), 0.0);
  for (int j = 1; j <= b; ++j)
    lo[static_cast<std::size_t>(j)] = std::max(0.0, 1.0 - caps[static_cast<std::size_t>(j - 1)]);

  // Candidate grid: an optimal vertex has every z_n at a breakpoint of H,
  // at a bound, or tied to a neighbor anchored at one.
  std::vector<double> cand{0.0, 1.0};
  cand.insert(cand.end(), pcum.begin(), pcum.end());
  for (int j = 1; j <= B; ++j) cand.push_back(lo[static_cast<std::size_t>(j)]);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-15; }),
             cand.end());
  const int K = static_cast<int>(cand.size());

  std::vector<double> hval(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) hval[static_cast<std::size_t>(i)] = H(cand[static_cast<std::size_t>(i)]);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(static_cast<std::size_t>(K), 0.0);  // z_0 = 1 >= all candidates
  std::vector<std::vector<int>> from(static_cast<std::size_t>(B + 1),
                                     std::vector<int>(static_cast<std::size_t>(K), -1));
  std::vector<int> choice_best(static_cast<std::size_t>(B + 1), -1);
  for (int n = 1; n <= B; ++n) {
    // suffix minima of dp (previous level must sit at a value >= this one)
    std::vector<double> suff(static_cast<std::size_t>(K));
    std::vector<int> suff_arg(static_cast<std::size_t>(K));
    suff[static_cast<std::size_t>(K - 1)] = dp[static_cast<std::size_t>(K - 1)];
    suff_arg[static_cast<std::size_t>(K - 1)] = K - 1;
    for (int i = K - 2; i >= 0; --i) {
      if (dp[static_cast<std::size_t>(i)] <= suff[static_cast<std::size_t>(i + 1)]) {
        suff[static_cast<std::size_t>(i)] = dp[static_cast<std::size_t>(i)];
        suff_arg[static_cast<std::size_t>(i)] = i;
      } else {
        suff[static_cast<std::size_t>(i)] = suff[static_cast<std::size_t>(i + 1)];
        suff_arg[static_cast<std::size_t>(i)] = suff_arg[static_cast<std::size_t>(i + 1)];
      }
    }
    const double weight = pows.at(n - 1 - b) * (cfg.eta - 1.0);
    const double slope = v_prev[static_cast<std::size_t>(n)] -
                         v_prev[static_cast<std::size_t>(n - 1)];
    std::vector<double> next(static_cast<std::size_t>(K), inf);
    for (int i = 0; i < K; ++i) {
      if (cand[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(n)] - 1e-15) continue;
      next[static_cast<std::size_t>(i)] = weight * hval[static_cast<std::size_t>(i)] +
                                          slope * cand[static_cast<std::size_t>(i)] +
                                          suff[static_cast<std::size_t>(i)];
      from[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] =
          suff_arg[static_cast<std::size_t>(i)];
    }
    dp = std::move(next);
  }

  int best = 0;
  for (int i = 1; i < K; ++i)
    if (dp[static_cast<std::size_t>(i)] < dp[static_cast<std::size_t>(best)]) best = i;

  std::vector<double> z(static_cast<std::size_t>(B + 2), 0.0);
  z[0] = 1.0;
  int cur = best;
  for (int n = B; n >= 1; --n) {
    z[static_cast<std::size_t>(n)] = cand[static_cast<std::size_t>(cur)];
    cur = from[static_cast<std::size_t>(n)][static_cast<std::size_t>(cur)];
  }
  std::vector<double> a(static_cast<std::size_t>(B + 1));
  for (int n = 0; n <= B; ++n)
    a[static_cast<std::size_t>(n)] =
        std::max(0.0, z[static_cast<std::size_t>(n)] - z[static_cast<std::size_t>(n + 1)]);
  return MarginalVector::make(b, std::move(a));
}

BellmanResult bellman_convex_marginal(int b, const SystemConfig& cfg,
                                      const EtaPowers& pows,
                                      std::span<const double> v_prev,
                                      const SolverOptions& opts) {
  const int B = cfg.B;
  const auto& p = cfg.pmf;
  const auto objective = [&](const MarginalVector& mv) {
    return h_value(cfg, pows, mv) +
           kernels::dot(mv.a.data(), v_prev.data(), B + 1);
  };

  MarginalVector a{b, lmo_prefix_capped(v_prev, b, p)};
  double fa = objective(a);
  MarginalVector a_best = a;
  double f_best = fa;
  double lower = -std::numeric_limits<double>::infinity();
  double certified = std::numeric_limits<double>::infinity();
  int stalls = 0;
  int it = 0;
  std::vector<double> g(static_cast<std::size_t>(B + 1));

  const int stall_limit = 4;
  const int fw_budget = opts.exact_finish ? std::min(opts.max_iters, 120) : opts.max_iters;
  for (it = 1; it <= fw_budget && stalls < stall_limit; ++it) {
    const auto nu = h_subgradient(cfg, pows, a);
    for (int n = 0; n <= B; ++n)
      g[static_cast<std::size_t>(n)] = nu[static_cast<std::size_t>(n)] +
                                       v_prev[static_cast<std::size_t>(n)];
    const auto s = lmo_prefix_capped(g, b, p);
    double gap_t = 0.0;
    for (int n = 0; n <= B; ++n)
      gap_t += g[static_cast<std::size_t>(n)] *
               (a.a[static_cast<std::size_t>(n)] - s[static_cast<std::size_t>(n)]);
    lower = std::max(lower, fa - gap_t);
    certified = f_best - lower;
    if (certified <= opts.inner_tol) {
      break;
    }

    // Exact-enough line search: the restriction to [a, s] is convex piecewise
    // linear, so golden-section narrows to the kink.
    const double gr = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = objective(mix(a, s, x1));
    double f2 = objective(mix(a, s, x2));
    for (int step = 0; step < opts.line_search_steps; ++step) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = objective(mix(a, s, x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = objective(mix(a, s, x2));
      }
    }
    double gamma = f1 < f2 ? x1 : x2;
    double f_gamma = std::min(f1, f2);
    const double f_full = objective(mix(a, s, 1.0));
    if (f_full < f_gamma) {
      gamma = 1.0;
      f_gamma = f_full;
    }

    const double improve_tol = 1e-14 * std::max(1.0, std::abs(fa));
    if (f_gamma >= fa - improve_tol) {
      // Kink stall: step just past the kink so the next subgradient samples
      // the adjacent piece, which tightens the lower bound.
      ++stalls;
      const double nudge = std::min(1.0, 1e-6 * stalls);
      a = mix(a, s, nudge);
      fa = objective(a);
    } else {
      stalls = 0;
      a = mix(a, s, gamma);
      fa = f_gamma;
    }
    if (fa < f_best) {
      f_best = fa;
      a_best = a;
    }
  }

  if (certified > opts.inner_tol) {
    if (!opts.exact_finish)
      throw convergence_error("convex-marginal bellman step failed to certify gap " +
                                  std::to_string(certified) + " <= tol at level " +
                                  std::to_string(b),
                              f_best, certified, it, a_best.a);
    // Finish at the exact cumulative-space optimum.
    auto a_z = exact_marginal_minimizer(b, cfg, pows, v_prev);
    const double f_z = objective(a_z);
    if (f_z <= f_best) {
      f_best = f_z;
      a_best = std::move(a_z);
    }
    certified = 0.0;
  }

  auto fr = fast_assign(p, a_best);
  BellmanResult out;
  out.b = b;
  out.value = objective(a_best);
  out.a_star = std::move(a_best);
  out.D_star = std::move(fr.D);
  out.iterations = it;
  out.gap = certified;
  return out;
}

}  // namespace jpc
