#include "jpc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "jpc/baselines.hpp"
#include "jpc/serialization.hpp"
#include "jpc/simulator.hpp"

namespace jpc::validation {

namespace {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uint_below(std::mt19937_64& rng, int n) {  // uniform over {0..n-1}
  return std::min(n - 1, static_cast<int>(u01(rng) * n));
}

std::vector<double> dirichlet(std::mt19937_64& rng, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log(std::max(u01(rng), 1e-300));
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

void write_reproducer(const ValidateOptions& opt, SuiteResult& result,
                      nlohmann::json instance) {
  if (result.failures != 1) return;  // only the first failure per suite
  instance["suite"] = result.name;
  const std::string path =
      opt.reproducer_dir + "/validate_reproducer_" + result.name + ".json";
  std::ofstream out(path);
  if (out) {
    out << instance.dump(2) << '\n';
    result.notes.push_back("reproducer written to " + path);
  }
}

nlohmann::json instance_json(const SystemConfig& cfg) {
  return nlohmann::json{{"config", config_to_json(cfg)}};
}

}  // namespace

SystemConfig random_config(std::mt19937_64& rng, int max_x, int max_b,
                           double eta_lo, double eta_hi) {
  const int X = uint_below(rng, max_x + 1);
  const int B = uint_below(rng, max_b + 1);
  const double eta = eta_lo + (eta_hi - eta_lo) * u01(rng);
  return SystemConfig::make(B, eta, dirichlet(rng, X + 1));
}

MarginalVector random_feasible_marginal(std::mt19937_64& rng, const SystemConfig& cfg,
                                        int b) {
  const int X = cfg.X();
  const int B = cfg.B;
  std::vector<double> a(static_cast<std::size_t>(B + 1), 0.0);
  for (int m = 0; m <= X; ++m) {
    const int lo = std::max(0, b - m);
    const auto row = dirichlet(rng, B - lo + 1);
    for (int n = lo; n <= B; ++n)
      a[static_cast<std::size_t>(n)] +=
          cfg.pmf[static_cast<std::size_t>(m)] * row[static_cast<std::size_t>(n - lo)];
  }
  return MarginalVector::make(b, std::move(a));
}

std::vector<double> random_values(std::mt19937_64& rng, int n, double lo, double hi) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = lo + (hi - lo) * u01(rng);
  return v;
}

// ---------------------------------------------------------------------------
// Transportation LP oracle: successive shortest paths on the bipartite graph.
// ---------------------------------------------------------------------------

TransportOracleResult lp_transport_oracle(int b, double eta,
                                          std::span<const double> p,
                                          std::span<const double> a) {
  const int R = static_cast<int>(p.size());
  const int C = static_cast<int>(a.size());
  const int source = 0;
  const int sink = R + C + 1;
  const int n_nodes = R + C + 2;

  struct Edge {
    int to;
    double cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Edge>> g(static_cast<std::size_t>(n_nodes));
  const auto add_edge = [&](int from, int to, double cap, double cost) {
    g[static_cast<std::size_t>(from)].push_back(
        {to, cap, cost, static_cast<int>(g[static_cast<std::size_t>(to)].size())});
    g[static_cast<std::size_t>(to)].push_back(
        {from, 0.0, -cost, static_cast<int>(g[static_cast<std::size_t>(from)].size()) - 1});
  };
  for (int m = 0; m < R; ++m) add_edge(source, 1 + m, p[static_cast<std::size_t>(m)], 0.0);
  for (int n = 0; n < C; ++n) add_edge(1 + R + n, sink, a[static_cast<std::size_t>(n)], 0.0);
  for (int m = 0; m < R; ++m)
    for (int n = 0; n < C; ++n)
      if (m + n >= b) add_edge(1 + m, 1 + R + n, 2.0, pow_int(eta, m + n - b));

  // Successive shortest paths with Johnson potentials; the initial graph has
  // non-negative costs, so plain Dijkstra applies throughout (reduced costs
  // are clamped at 0 against rounding drift). Visit-once Dijkstra guarantees
  // acyclic parent chains.
  double pushed = 0.0;
  double cost = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pot(static_cast<std::size_t>(n_nodes), 0.0);
  int augmentations = 0;
  while (pushed < 1.0 - 1e-12) {
    if (++augmentations > 100 * n_nodes)
      throw std::runtime_error("transport oracle: augmentation budget exceeded");
    std::vector<double> dist(static_cast<std::size_t>(n_nodes), inf);
    std::vector<bool> done(static_cast<std::size_t>(n_nodes), false);
    std::vector<int> par_node(static_cast<std::size_t>(n_nodes), -1);
    std::vector<int> par_edge(static_cast<std::size_t>(n_nodes), -1);
    dist[source] = 0.0;
    for (int iter = 0; iter < n_nodes; ++iter) {
      int vtx = -1;
      for (int i = 0; i < n_nodes; ++i)
        if (!done[static_cast<std::size_t>(i)] && dist[static_cast<std::size_t>(i)] < inf &&
            (vtx < 0 || dist[static_cast<std::size_t>(i)] < dist[static_cast<std::size_t>(vtx)]))
          vtx = i;
      if (vtx < 0) break;
      done[static_cast<std::size_t>(vtx)] = true;
      const auto& edges = g[static_cast<std::size_t>(vtx)];
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].cap <= 1e-15 || done[static_cast<std::size_t>(edges[e].to)]) continue;
        const double reduced = std::max(
            0.0, edges[e].cost + pot[static_cast<std::size_t>(vtx)] -
                     pot[static_cast<std::size_t>(edges[e].to)]);
        const double nd = dist[static_cast<std::size_t>(vtx)] + reduced;
        if (nd < dist[static_cast<std::size_t>(edges[e].to)]) {
          dist[static_cast<std::size_t>(edges[e].to)] = nd;
          par_node[static_cast<std::size_t>(edges[e].to)] = vtx;
          par_edge[static_cast<std::size_t>(edges[e].to)] = static_cast<int>(e);
        }
      }
    }
    if (dist[static_cast<std::size_t>(sink)] == inf) break;  // no augmenting path
    for (int i = 0; i < n_nodes; ++i)
      if (dist[static_cast<std::size_t>(i)] < inf) pot[static_cast<std::size_t>(i)] += dist[static_cast<std::size_t>(i)];
    double push = 1.0 - pushed;
    for (int vtx = sink; vtx != source; vtx = par_node[static_cast<std::size_t>(vtx)])
      push = std::min(push,
                      g[static_cast<std::size_t>(par_node[static_cast<std::size_t>(vtx)])]
                       [static_cast<std::size_t>(par_edge[static_cast<std::size_t>(vtx)])]
                           .cap);
    if (push <= 1e-15) break;
    for (int vtx = sink; vtx != source; vtx = par_node[static_cast<std::size_t>(vtx)]) {
      auto& e = g[static_cast<std::size_t>(par_node[static_cast<std::size_t>(vtx)])]
                 [static_cast<std::size_t>(par_edge[static_cast<std::size_t>(vtx)])];
      e.cap -= push;
      g[static_cast<std::size_t>(vtx)][static_cast<std::size_t>(e.rev)].cap += push;
      cost += push * e.cost;
    }
    pushed += push;
  }

  TransportOracleResult out;
  out.feasible = pushed >= 1.0 - 1e-9;
  out.cost = cost - 1.0;
  out.mass = Mat(R, C, 0.0);
  for (int m = 0; m < R; ++m) {
    for (const auto& e : g[static_cast<std::size_t>(1 + m)]) {
      if (e.to >= 1 + R && e.to < 1 + R + C) {
        const double flow = g[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap;
        out.mass(m, e.to - 1 - R) = flow;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic-policy enumeration oracle (independent stationary solves).
// ---------------------------------------------------------------------------

namespace {

std::vector<double> oracle_solve(std::vector<std::vector<double>> m,
                                 std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
        piv = r;
    std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(col)]);
    std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(col)]);
    for (int r = col + 1; r < n; ++r) {
      const double f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                       m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            f * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c)
      acc -= m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
             x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = acc / m[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  return x;
}

/// Long-run average cost of the chain `A` started at state 0 with per-state
/// costs `c`: absorption-weighted mixture over reachable closed classes.
double oracle_long_run_cost(const std::vector<std::vector<double>>& A,
                            const std::vector<double>& c) {
  const int n = static_cast<int>(A.size());
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack{s};
    reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j)
        if (A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 1e-14 &&
            !reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)]) {
          reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = true;
          stack.push_back(j);
        }
    }
  }
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    const int id = static_cast<int>(classes.size());
    classes.emplace_back();
    for (int j = 0; j < n; ++j)
      if (comp[static_cast<std::size_t>(j)] < 0 && reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
          reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        comp[static_cast<std::size_t>(j)] = id;
        classes.back().push_back(j);
      }
  }
  std::vector<bool> closed(classes.size(), true);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 1e-14 &&
          comp[static_cast<std::size_t>(i)] != comp[static_cast<std::size_t>(j)])
        closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = false;

  const auto class_cost = [&](const std::vector<int>& nodes) {
    const int k = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> m(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            A[static_cast<std::size_t>(nodes[static_cast<std::size_t>(j)])]
             [static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)])] -
            (i == j ? 1.0 : 0.0);
    for (int j = 0; j < k; ++j) m[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] = 1.0;
    rhs[static_cast<std::size_t>(k - 1)] = 1.0;
    const auto r = oracle_solve(std::move(m), std::move(rhs));
    double acc = 0.0;
    for (int i = 0; i < k; ++i)
      acc += r[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)])];
    return acc;
  };

  // Absorption probabilities from state 0 into each reachable closed class.
  if (closed[static_cast<std::size_t>(comp[0])])
    return class_cost(classes[static_cast<std::size_t>(comp[0])]);
  std::vector<int> transient;
  std::vector<int> tindex(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    if (!closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])]) {
      tindex[static_cast<std::size_t>(i)] = static_cast<int>(transient.size());
      transient.push_back(i);
    }
  const int nt = static_cast<int>(transient.size());
  double total = 0.0;
  for (std::size_t cid = 0; cid < classes.size(); ++cid) {
    if (!closed[cid] || !reach[0][static_cast<std::size_t>(classes[cid].front())]) continue;
    std::vector<std::vector<double>> m(static_cast<std::size_t>(nt),
                                       std::vector<double>(static_cast<std::size_t>(nt), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(nt), 0.0);
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (i == j ? 1.0 : 0.0) -
            A[static_cast<std::size_t>(transient[static_cast<std::size_t>(i)])]
             [static_cast<std::size_t>(transient[static_cast<std::size_t>(j)])];
      double into = 0.0;
      for (int v : classes[cid])
        into += A[static_cast<std::size_t>(transient[static_cast<std::size_t>(i)])]
                 [static_cast<std::size_t>(v)];
      rhs[static_cast<std::size_t>(i)] = into;
    }
    const double wgt = oracle_solve(std::move(m), std::move(rhs))[0];
    if (wgt > 0.0) total += wgt * class_cost(classes[cid]);
  }
  return total;
}

}  // namespace

double enumerate_optimal_average_cost(const SystemConfig& cfg) {
  const int B = cfg.B;
  const int X = cfg.X();
  struct FreeState {
    int b, x, lo;
  };
  std::vector<FreeState> free_states;
  long double combos = 1.0L;
  for (int b = 0; b <= B; ++b)
    for (int x = 0; x <= X; ++x)
      if (cfg.pmf[static_cast<std::size_t>(x)] > 0.0) {
        const int lo = std::max(0, b - x);
        free_states.push_back({b, x, lo});
        combos *= (B - lo + 1);
      }
  if (combos > 2e6L)
    throw std::invalid_argument("enumeration oracle: instance too large");

  std::vector<int> choice(free_states.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<double>> A(static_cast<std::size_t>(B + 1),
                                       std::vector<double>(static_cast<std::size_t>(B + 1), 0.0));
    std::vector<double> cost(static_cast<std::size_t>(B + 1), 0.0);
    for (std::size_t i = 0; i < free_states.size(); ++i) {
      const auto& st = free_states[i];
      const int next = st.lo + choice[i];
      const double px = cfg.pmf[static_cast<std::size_t>(st.x)];
      A[static_cast<std::size_t>(st.b)][static_cast<std::size_t>(next)] += px;
      cost[static_cast<std::size_t>(st.b)] += px * energy_cost(next - st.b + st.x, cfg.eta);
    }
    best = std::min(best, oracle_long_run_cost(A, cost));
    // odometer
    std::size_t pos = 0;
    while (pos < choice.size()) {
      const auto& st = free_states[pos];
      if (choice[pos] < B - st.lo) {
        ++choice[pos];
        break;
      }
      choice[pos] = 0;
      ++pos;
    }
    if (pos == choice.size()) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Offline schedule DP oracle on a discretized cumulative grid.
// ---------------------------------------------------------------------------

double offline_schedule_dp_oracle(const std::vector<int>& trace, int B, double eta,
                                  int grid_per_slot) {
  const std::size_t T = trace.size();
  if (T == 0) throw std::invalid_argument("dp oracle: empty trace");
  std::vector<double> floor_v(T + 1, 0.0), ceil_v(T + 1, 0.0);
  double running = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    running += trace[t - 1];
    floor_v[t] = running;
    ceil_v[t] = running + B;
  }
  for (std::size_t t = 1; t <= T; ++t) ceil_v[t] = std::min(ceil_v[t], floor_v[T]);

  const int G = grid_per_slot;
  std::vector<double> prev_y{0.0};
  std::vector<double> prev_cost{0.0};
  for (std::size_t t = 1; t <= T; ++t) {
    const double lo = floor_v[t], hi = ceil_v[t];
    const int pts = hi > lo ? G + 1 : 1;
    std::vector<double> ys(static_cast<std::size_t>(pts));
    for (int i = 0; i < pts; ++i)
      ys[static_cast<std::size_t>(i)] = pts == 1 ? lo : lo + (hi - lo) * i / G;
    std::vector<double> cost(static_cast<std::size_t>(pts),
                             std::numeric_limits<double>::infinity());
    for (int i = 0; i < pts; ++i) {
      for (std::size_t j = 0; j < prev_y.size(); ++j) {
        const double dy = ys[static_cast<std::size_t>(i)] - prev_y[j];
        if (dy < -1e-12) continue;
        const double cnd = prev_cost[j] + std::pow(eta, std::max(dy, 0.0)) - 1.0;
        if (cnd < cost[static_cast<std::size_t>(i)]) cost[static_cast<std::size_t>(i)] = cnd;
      }
    }
    prev_y = std::move(ys);
    prev_cost = std::move(cost);
  }
  return *std::min_element(prev_cost.begin(), prev_cost.end());
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

SuiteResult suite_fast_vs_lp(const ValidateOptions& opt) {
  SuiteResult res{"fast-vs-lp", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x1001);
  for (int i = 0; i < opt.fast_vs_lp_checks; ++i) {
    const auto cfg = random_config(rng, 5, 5, 1.15, 2.2);
    const int b = uint_below(rng, cfg.B + 1);
    ++res.checks;
    if (i % 4 == 3) {
      // Unconstrained random marginal: feasibility verdicts must agree.
      const auto a = dirichlet(rng, cfg.B + 1);
      const bool hall = marginal_feasible(b, cfg.pmf, a);
      const auto lp = lp_transport_oracle(b, cfg.eta, cfg.pmf, a);
      bool ok = hall == lp.feasible;
      double hv = 0.0;
      if (ok && hall) {
        hv = h_value(cfg, MarginalVector{b, a});
        ok = std::abs(hv - lp.cost) <= 1e-9;
      } else if (ok && !hall) {
        try {
          h_value(cfg, MarginalVector{b, a});
          ok = false;  // expected infeasibility error
        } catch (const infeasible_marginal&) {
        }
      }
      if (!ok) {
        ++res.failures;
        auto j = instance_json(cfg);
        j["b"] = b;
        j["a"] = a;
        j["hall"] = hall;
        j["lp_feasible"] = lp.feasible;
        write_reproducer(opt, res, std::move(j));
      }
    } else {
      const auto a = random_feasible_marginal(rng, cfg, b);
      const auto lp = lp_transport_oracle(b, cfg.eta, cfg.pmf, a.a);
      const double hv = h_value(cfg, a);
      if (!lp.feasible || std::abs(hv - lp.cost) > 1e-9) {
        ++res.failures;
        auto j = instance_json(cfg);
        j["b"] = b;
        j["a"] = a.a;
        j["h_value"] = hv;
        j["lp_cost"] = lp.cost;
        write_reproducer(opt, res, std::move(j));
      }
    }
  }
  return res;
}

SuiteResult suite_monotonicity(const ValidateOptions& opt) {
  SuiteResult res{"monotonicity", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x2002);
  const int n_checks = std::max(50, opt.fast_vs_lp_checks / 2);
  for (int i = 0; i < n_checks; ++i) {
    const auto cfg = random_config(rng, 5, 5, 1.15, 2.2);
    const int b = uint_below(rng, cfg.B + 1);
    const auto a = random_feasible_marginal(rng, cfg, b);
    const auto fr = fast_assign(cfg.pmf, a);
    const auto lp = lp_transport_oracle(b, cfg.eta, cfg.pmf, a.a);
    ++res.checks;

    bool ok = is_generalized_monotone(fr.D.d, 1e-9);

    // LP optimum, normalized to conditional form with sub-tolerance mass cleaned.
    Mat lp_d(lp.mass.rows, lp.mass.cols, 0.0);
    for (int m = 0; m < lp.mass.rows; ++m)
      for (int n = 0; n < lp.mass.cols; ++n) {
        const double mass = lp.mass(m, n) <= 1e-12 ? 0.0 : lp.mass(m, n);
        lp_d(m, n) = mass / cfg.pmf[static_cast<std::size_t>(m)];
      }
    ok = ok && is_generalized_monotone(lp_d, 1e-9);

    // Theorem-2 identity on the stripe fill.
    for (int m = 0; m <= cfg.X() && ok; ++m) {
      for (int n = 0; n <= cfg.B && ok; ++n) {
        double col_used = 0.0;
        for (int i2 = 0; i2 < m; ++i2)
          col_used += fr.D.d(i2, n) * cfg.pmf[static_cast<std::size_t>(i2)];
        double row_right = 0.0;
        for (int j2 = n + 1; j2 <= cfg.B; ++j2) row_right += fr.D.d(m, j2);
        const double u = (a.a[static_cast<std::size_t>(n)] - col_used) /
                         cfg.pmf[static_cast<std::size_t>(m)];
        const double w = 1.0 - row_right;
        ok = std::abs(fr.D.d(m, n) - std::min(u, w)) <= 1e-8;
      }
    }

    // Four-cell exchanges around the optimum never reduce the objective.
    std::vector<std::pair<int, int>> support;
    for (int m = 0; m <= cfg.X(); ++m)
      for (int n = 0; n <= cfg.B; ++n)
        if (fr.D.d(m, n) * cfg.pmf[static_cast<std::size_t>(m)] > 1e-9)
          support.push_back({m, n});
    for (std::size_t i1 = 0; i1 < support.size() && ok; ++i1) {
      for (std::size_t i2 = 0; i2 < support.size() && ok; ++i2) {
        const auto [m1, n1] = support[i1];
        const auto [m2, n2] = support[i2];
        if (m2 <= m1 || n1 == n2) continue;
        if (m1 + n2 < b || m2 + n1 < b) continue;  // exchange must stay feasible
        const double delta = pow_int(cfg.eta, m1 + n2 - b) + pow_int(cfg.eta, m2 + n1 - b) -
                             pow_int(cfg.eta, m1 + n1 - b) - pow_int(cfg.eta, m2 + n2 - b);
        ok = delta >= -1e-9;
      }
    }

    if (!ok) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["b"] = b;
      j["a"] = a.a;
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

SuiteResult suite_convexity(const ValidateOptions& opt) {
  SuiteResult res{"convexity", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x3003);
  for (int i = 0; i < opt.convexity_checks; ++i) {
    const auto cfg = random_config(rng, 5, 5, 1.15, 2.2);
    const int b = uint_below(rng, cfg.B + 1);
    const auto a1 = random_feasible_marginal(rng, cfg, b);
    const auto a2 = random_feasible_marginal(rng, cfg, b);
    const double lam = u01(rng);
    std::vector<double> blend(a1.a.size());
    for (std::size_t k = 0; k < blend.size(); ++k)
      blend[k] = lam * a1.a[k] + (1.0 - lam) * a2.a[k];
    ++res.checks;
    const double lhs = h_value(cfg, MarginalVector{b, blend});
    const double rhs = lam * h_value(cfg, a1) + (1.0 - lam) * h_value(cfg, a2);
    if (lhs > rhs + 1e-9) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["b"] = b;
      j["a1"] = a1.a;
      j["a2"] = a2.a;
      j["lambda"] = lam;
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

SuiteResult suite_hall_counterexample(const ValidateOptions& opt) {
  SuiteResult res{"hall-counterexample", 0, 0, {}};
  const auto cfg = SystemConfig::make(3, 1.4, {0.5, 0.25, 0.25});
  const int b = 3;
  const std::vector<double> a{0.0, 0.25, 0.5, 0.25};

  const auto fail = [&](const std::string& what) {
    ++res.failures;
    auto j = instance_json(cfg);
    j["b"] = b;
    j["a"] = a;
    j["check"] = what;
    write_reproducer(opt, res, std::move(j));
  };

  // Every per-column bound a_m <= sum_{x >= b-m} p_x holds...
  ++res.checks;
  for (int m = 0; m <= cfg.B; ++m) {
    double tail = 0.0;
    for (int x = b - m; x <= cfg.X(); ++x)
      if (x >= 0) tail += cfg.pmf[static_cast<std::size_t>(x)];
    if (a[static_cast<std::size_t>(m)] > tail + 1e-12) {
      fail("per-column bound unexpectedly violated");
      break;
    }
  }
  // ...yet the cumulative condition rejects the marginal...
  ++res.checks;
  if (marginal_feasible(b, cfg.pmf, a)) fail("cumulative condition accepted the marginal");
  // ...the assignment places mass below the staircase...
  ++res.checks;
  const auto fr = fast_assign(cfg.pmf, MarginalVector{b, a});
  if (fr.D.satisfies_zero_pattern()) fail("assignment unexpectedly satisfied the pattern");
  // ...h reports infeasibility rather than a silent value...
  ++res.checks;
  try {
    h_value(cfg, MarginalVector{b, a});
    fail("h_value returned a value for an unrealizable marginal");
  } catch (const infeasible_marginal&) {
  }
  // ...and the LP oracle agrees there is no realization.
  ++res.checks;
  if (lp_transport_oracle(b, cfg.eta, cfg.pmf, a).feasible)
    fail("LP oracle found a realization");
  return res;
}

SuiteResult suite_bellman_agreement(const ValidateOptions& opt) {
  SuiteResult res{"bellman-agreement", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x4004);
  SolverOptions fw;
  fw.method = BellmanMethod::ConvexMarginal;
  for (int i = 0; i < opt.bellman_agreement_checks; ++i) {
    const auto cfg = random_config(rng, 8, 8, 1.1, 2.0);
    const auto pows = EtaPowers::for_config(cfg);
    const int b = uint_below(rng, cfg.B + 1);
    const auto v_prev = random_values(rng, cfg.B + 1, 0.0, 5.0);
    ++res.checks;
    const auto exact = bellman_exact_rowwise(b, cfg, pows, v_prev);
    bool ok = marginal_feasible(b, cfg.pmf, exact.a_star.a);
    double fw_value = 0.0;
    try {
      const auto conv = bellman_convex_marginal(b, cfg, pows, v_prev, fw);
      fw_value = conv.value;
      ok = ok && std::abs(conv.value - exact.value) <= 1e-6 &&
           marginal_feasible(b, cfg.pmf, conv.a_star.a);
    } catch (const convergence_error& e) {
      fw_value = e.best_value();
      ok = false;
    }
    if (!ok) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["b"] = b;
      j["v_prev"] = v_prev;
      j["exact_value"] = exact.value;
      j["convex_value"] = fw_value;
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

SuiteResult suite_vi_agreement(const ValidateOptions& opt) {
  SuiteResult res{"vi-agreement", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x5005);
  for (int i = 0; i < opt.vi_agreement_checks; ++i) {
    const auto cfg = random_config(rng, 6, 6, 1.1, 1.9);
    VIOptions vo;
    vo.eps = 1e-8;
    vo.record_gain_trace = false;
    ++res.checks;
    try {
      const auto deg = value_iterate_degenerated(cfg, vo);
      const auto full = value_iterate_full(cfg, vo);
      if (std::abs(deg.policy.L - full.policy.L) > 1e-6) {
        ++res.failures;
        auto j = instance_json(cfg);
        j["L_degenerated"] = deg.policy.L;
        j["L_full"] = full.policy.L;
        write_reproducer(opt, res, std::move(j));
      }
    } catch (const std::exception& e) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["error"] = e.what();
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

SuiteResult suite_simulator_consistency(const ValidateOptions& opt) {
  SuiteResult res{"simulator-consistency", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x6006);
  for (int i = 0; i < opt.simulator_instances; ++i) {
    const auto cfg = random_config(rng, 5, 5, 1.1, 1.9);
    VIOptions vo;
    vo.eps = 1e-8;
    vo.record_gain_trace = false;
    ++res.checks;
    try {
      const auto solved = value_iterate_degenerated(cfg, vo);
      const auto rep = simulate_policy(solved.policy, cfg, opt.simulator_steps,
                                       opt.seed + static_cast<std::uint64_t>(i));
      const double tol =
          std::max(0.02 * std::abs(solved.policy.L), 4.0 * rep.std_error);
      if (std::abs(rep.mean_energy - solved.policy.L) > std::max(tol, 1e-9)) {
        ++res.failures;
        auto j = instance_json(cfg);
        j["L"] = solved.policy.L;
        j["empirical"] = rep.mean_energy;
        j["std_error"] = rep.std_error;
        write_reproducer(opt, res, std::move(j));
      }
    } catch (const std::exception& e) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["error"] = e.what();
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

SuiteResult suite_taut_string_dominance(const ValidateOptions& opt) {
  SuiteResult res{"taut-string-dominance", 0, 0, {}};
  std::mt19937_64 rng(opt.seed ^ 0x7007);
  const auto cfg = random_config(rng, 6, 6, 1.2, 1.6);
  VIOptions vo;
  vo.eps = 1e-7;
  vo.record_gain_trace = false;
  const auto solved = value_iterate_degenerated(cfg, vo);
  const double floor_cost = infinite_buffer_cost(cfg);
  for (int k = 0; k < opt.dominance_traces; ++k) {
    const auto trace =
        sample_trace(cfg, opt.dominance_steps, opt.seed + 977u * (k + 1));
    const auto sim = simulate_policy_on_trace(solved.policy, cfg, trace,
                                              opt.seed + 31u * (k + 1));
    const auto taut = taut_string_schedule(trace, cfg.B, cfg.eta, 0);
    ++res.checks;
    const double slack = std::max(1e-9, 1e-12 * sim.total_energy);
    const double per_slot = taut.total_energy / static_cast<double>(trace.x.size());
    // Offline dominance is exact per trace; the infinite-buffer floor binds
    // asymptotically (2% at this horizon).
    if (taut.total_energy > sim.total_energy + slack ||
        per_slot < floor_cost * (1.0 - 0.02) - 1e-9) {
      ++res.failures;
      auto j = instance_json(cfg);
      j["trace_seed"] = trace.seed;
      j["taut_total"] = taut.total_energy;
      j["policy_total"] = sim.total_energy;
      j["per_slot"] = per_slot;
      j["floor"] = floor_cost;
      write_reproducer(opt, res, std::move(j));
    }
  }
  return res;
}

std::vector<SuiteResult> run_all_suites(const ValidateOptions& opt) {
  return {suite_fast_vs_lp(opt),        suite_monotonicity(opt),
          suite_convexity(opt),         suite_hall_counterexample(opt),
          suite_bellman_agreement(opt), suite_vi_agreement(opt),
          suite_simulator_consistency(opt), suite_taut_string_dominance(opt)};
}

}  // namespace jpc::validation
