#include "jpc/value_iteration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "jpc/kernels.hpp"

namespace jpc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(Mat m, std::vector<double> rhs) {
  const int n = m.rows;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < 1e-300)
      throw std::runtime_error("singular linear system in stationary solve");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(col)]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c) acc -= m(r, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = acc / m(r, r);
  }
  return x;
}

/// Stationary law of the chain restricted to one closed class.
std::vector<double> class_stationary(const Mat& A, const std::vector<int>& nodes) {
  const int k = static_cast<int>(nodes.size());
  Mat m(k, k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = A(nodes[static_cast<std::size_t>(j)],
                                            nodes[static_cast<std::size_t>(i)]);
  for (int i = 0; i < k; ++i) m(i, i) -= 1.0;
  for (int j = 0; j < k; ++j) m(k - 1, j) = 1.0;  // replace last row with 1'r = 1
  std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
  rhs[static_cast<std::size_t>(k - 1)] = 1.0;
  auto r = solve_dense(std::move(m), std::move(rhs));
  double sum = 0.0;
  for (double& v : r) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    sum += v;
  }
  for (double& v : r) v /= sum;
  return r;
}

}  // namespace

Mat build_transition_matrix(const std::vector<DecisionMatrix>& levels,
                            std::span<const double> p) {
  if (levels.empty()) throw std::invalid_argument("empty decision family");
  const int B = static_cast<int>(levels.size()) - 1;
  const int X = static_cast<int>(p.size()) - 1;
  Mat A(B + 1, B + 1, 0.0);
  for (int b = 0; b <= B; ++b) {
    const auto& D = levels[static_cast<std::size_t>(b)];
    if (D.d.rows != X + 1 || D.d.cols != B + 1)
      throw std::invalid_argument("decision matrix shape mismatch at level " +
                                  std::to_string(b));
    for (int m = 0; m <= X; ++m)
      kernels::axpy(p[static_cast<std::size_t>(m)], D.d.row(m), A.row(b), B + 1);
  }
  return A;
}

StationaryResult stationary_distribution(const Mat& A, double edge_tol) {
  const int n = A.rows;
  // Reachability closure over the support graph.
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n)));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = true;
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j = 0; j < n; ++j) {
        if (A(i, j) > edge_tol && !reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)]) {
          reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = true;
          q.push(j);
        }
      }
    }
  }
  // Communicating classes and whether they are closed.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    const int id = static_cast<int>(classes.size());
    classes.emplace_back();
    for (int j = 0; j < n; ++j) {
      if (comp[static_cast<std::size_t>(j)] < 0 &&
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
          reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        comp[static_cast<std::size_t>(j)] = id;
        classes.back().push_back(j);
      }
    }
  }
  std::vector<bool> closed(classes.size(), true);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A(i, j) > edge_tol && comp[static_cast<std::size_t>(i)] != comp[static_cast<std::size_t>(j)])
        closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = false;

  int n_closed = 0;
  for (bool c : closed) n_closed += c ? 1 : 0;

  StationaryResult out;
  out.multichain = n_closed > 1;
  out.r.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<int> reachable_closed;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!closed[c]) continue;
    if (reach[0][static_cast<std::size_t>(classes[c].front())])
      reachable_closed.push_back(static_cast<int>(c));
  }
  if (reachable_closed.empty())
    throw std::runtime_error("no closed class reachable from level 0");

  if (reachable_closed.size() == 1) {
    const auto& nodes = classes[static_cast<std::size_t>(reachable_closed[0])];
    const auto r = class_stationary(A, nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      out.r[static_cast<std::size_t>(nodes[i])] = r[i];
    return out;
  }

  // Several closed classes reachable from 0: weight their stationary laws by
  // the absorption probabilities of the transient chain started at 0.
  std::vector<int> transient;
  for (int i = 0; i < n; ++i)
    if (!closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])])
      transient.push_back(i);
  std::vector<int> tindex(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < transient.size(); ++k)
    tindex[static_cast<std::size_t>(transient[k])] = static_cast<int>(k);
  const int nt = static_cast<int>(transient.size());
  for (int cid : reachable_closed) {
    const auto& nodes = classes[static_cast<std::size_t>(cid)];
    double weight;
    if (tindex[0] < 0) {
      weight = (comp[0] == cid) ? 1.0 : 0.0;
    } else {
      Mat m(nt, nt, 0.0);
      std::vector<double> rhs(static_cast<std::size_t>(nt), 0.0);
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j)
          m(i, j) = (i == j ? 1.0 : 0.0) - A(transient[static_cast<std::size_t>(i)],
                                             transient[static_cast<std::size_t>(j)]);
        double into = 0.0;
        for (int v : nodes) into += A(transient[static_cast<std::size_t>(i)], v);
        rhs[static_cast<std::size_t>(i)] = into;
      }
      weight = solve_dense(std::move(m), std::move(rhs))[static_cast<std::size_t>(tindex[0])];
    }
    if (weight <= 0.0) continue;
    const auto r = class_stationary(A, nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      out.r[static_cast<std::size_t>(nodes[i])] += weight * r[i];
  }
  double sum = std::accumulate(out.r.begin(), out.r.end(), 0.0);
  for (double& v : out.r) v /= sum;
  return out;
}

Policy assemble_policy(const SystemConfig& cfg, std::vector<DecisionMatrix> levels,
                       double gain, double epsilon, std::string method) {
  Policy pol;
  pol.config = cfg;
  pol.A = build_transition_matrix(levels, cfg.pmf);
  auto st = stationary_distribution(pol.A);
  pol.r = std::move(st.r);
  pol.multichain = st.multichain;
  const int B = cfg.B;
  const int X = cfg.X();
  pol.Omega = Mat(B + 1, X + 1, 0.0);
  for (int b = 0; b <= B; ++b) {
    const auto& D = levels[static_cast<std::size_t>(b)];
    for (int x = 0; x <= X; ++x) {
      pol.Omega(b, x) = expected_state_cost(
          State{b, x}, std::span<const double>(D.d.row(x), static_cast<std::size_t>(B + 1)),
          cfg.eta);
    }
  }
  pol.L = average_cost(pol.r, pol.Omega, cfg.pmf);
  pol.gain = gain;
  pol.epsilon = epsilon;
  pol.method = std::move(method);
  pol.levels = std::move(levels);
  return pol;
}

double policy_average_cost(const Policy& policy) {
  return assemble_policy(policy.config, policy.levels, policy.gain, policy.epsilon,
                         policy.method)
      .L;
}

SolveOutput value_iterate_degenerated(const SystemConfig& cfg, const VIOptions& opts) {
  const auto pows = EtaPowers::for_config(cfg);
  const int B = cfg.B;
  std::vector<double> v(static_cast<std::size_t>(B + 1), 0.0);
  std::vector<double> vnew(static_cast<std::size_t>(B + 1), 0.0);
  std::vector<BellmanResult> last(static_cast<std::size_t>(B + 1));

  VIReport rep;
  rep.method = std::string("degenerated/") + to_string(opts.bellman.method);

  const auto t0 = Clock::now();
  bool converged = false;
  double span = std::numeric_limits<double>::infinity();
  double gain = 0.0;
  long sweep = 0;
  for (sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (int b = 0; b <= B; ++b) {
      last[static_cast<std::size_t>(b)] =
          opts.bellman.method == BellmanMethod::ExactRowwise
              ? bellman_exact_rowwise(b, cfg, pows, v)
              : bellman_convex_marginal(b, cfg, pows, v, opts.bellman);
      vnew[static_cast<std::size_t>(b)] = last[static_cast<std::size_t>(b)].value;
    }
    const auto mm = kernels::diff_span(vnew.data(), v.data(), B + 1);
    span = mm.hi - mm.lo;
    gain = 0.5 * (mm.hi + mm.lo);
    if (opts.record_gain_trace) {
      rep.gain_trace.push_back(gain);
      rep.span_trace.push_back(span);
    }
    if (span < opts.eps) {
      converged = true;
      break;
    }
    const double shift = vnew[0];
    for (int b = 0; b <= B; ++b) v[static_cast<std::size_t>(b)] = vnew[static_cast<std::size_t>(b)] - shift;
  }
  rep.bellman_ms = ms_since(t0);
  if (!converged)
    throw convergence_error(
        "degenerated value iteration: span " + std::to_string(span) +
            " did not fall below eps " + std::to_string(opts.eps) + " within " +
            std::to_string(opts.max_sweeps) + " sweeps",
        gain, span, sweep);
  rep.iterations = sweep;
  rep.final_span = span;

  const auto t1 = Clock::now();
  std::vector<DecisionMatrix> levels;
  levels.reserve(static_cast<std::size_t>(B + 1));
  for (int b = 0; b <= B; ++b)
    levels.push_back(std::move(last[static_cast<std::size_t>(b)].D_star));
  Policy pol = assemble_policy(cfg, std::move(levels), gain, opts.eps, rep.method);
  rep.extract_ms = ms_since(t1);
  rep.total_ms = ms_since(t0);
  return {std::move(pol), std::move(rep)};
}

SolveOutput value_iterate_full(const SystemConfig& cfg, const VIOptions& opts) {
  const auto pows = EtaPowers::for_config(cfg);
  const int B = cfg.B;
  const int X = cfg.X();
  const int S = (B + 1) * (X + 1);
  Mat v(B + 1, X + 1, 0.0);
  Mat vnew(B + 1, X + 1, 0.0);
  std::vector<int> best_next(static_cast<std::size_t>(S), 0);

  VIReport rep;
  rep.method = "full-space";

  const auto t0 = Clock::now();
  bool converged = false;
  double span = std::numeric_limits<double>::infinity();
  double gain = 0.0;
  long sweep = 0;
  for (sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (int b = 0; b <= B; ++b) {
      for (int x = 0; x <= X; ++x) {
        const int lo = std::max(0, b - x);
        double best = std::numeric_limits<double>::infinity();
        int bn = lo;
        // Conventional sweep: the continuation expectation is evaluated per
        // action against the generic kernel (row n of v, weighted by p).
        for (int n = lo; n <= B; ++n) {
          const double q = pows.at(x - b + n) - 1.0 +
                           kernels::dot(cfg.pmf.data(), v.row(n), X + 1);
          if (q < best) {
            best = q;
            bn = n;
          }
        }
        vnew(b, x) = best;
        best_next[static_cast<std::size_t>(b * (X + 1) + x)] = bn;
      }
    }
    const auto mm = kernels::diff_span(vnew.a.data(), v.a.data(), S);
    span = mm.hi - mm.lo;
    gain = 0.5 * (mm.hi + mm.lo);
    if (opts.record_gain_trace) {
      rep.gain_trace.push_back(gain);
      rep.span_trace.push_back(span);
    }
    if (span < opts.eps) {
      converged = true;
      break;
    }
    const double shift = vnew(0, 0);
    for (int i = 0; i < S; ++i) v.a[static_cast<std::size_t>(i)] = vnew.a[static_cast<std::size_t>(i)] - shift;
  }
  rep.bellman_ms = ms_since(t0);
  if (!converged)
    throw convergence_error(
        "full-space value iteration: span " + std::to_string(span) +
            " did not fall below eps " + std::to_string(opts.eps) + " within " +
            std::to_string(opts.max_sweeps) + " sweeps",
        gain, span, sweep);
  rep.iterations = sweep;
  rep.final_span = span;

  const auto t1 = Clock::now();
  std::vector<DecisionMatrix> levels;
  levels.reserve(static_cast<std::size_t>(B + 1));
  for (int b = 0; b <= B; ++b) {
    Mat D(X + 1, B + 1, 0.0);
    for (int x = 0; x <= X; ++x)
      D(x, best_next[static_cast<std::size_t>(b * (X + 1) + x)]) = 1.0;
    levels.push_back(DecisionMatrix{b, std::move(D)});
  }
  Policy pol = assemble_policy(cfg, std::move(levels), gain, opts.eps, rep.method);
  rep.extract_ms = ms_since(t1);
  rep.total_ms = ms_since(t0);
  return {std::move(pol), std::move(rep)};
}

}  // namespace jpc
