#include "jpc/fast_assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jpc {

namespace {

void check_pmf(std::span<const double> v, const char* what) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": not normalized (sum " +
                                std::to_string(sum) + ")");
}

}  // namespace

MarginalVector MarginalVector::make(int b, std::vector<double> a) {
  if (b < 0 || b >= static_cast<int>(a.size()))
    throw std::invalid_argument("marginal level b out of range");
  check_pmf(a, "marginal vector");
  const double sum = std::accumulate(a.begin(), a.end(), 0.0);
  if (sum != 1.0)
    for (double& v : a) v /= sum;
  return MarginalVector{b, std::move(a)};
}

bool DecisionMatrix::satisfies_zero_pattern(double tol) const {
  for (int m = 0; m < d.rows; ++m) {
    const int forbidden = std::min(b - m, d.cols);
    for (int n = 0; n < forbidden; ++n)
      if (d(m, n) > tol) return false;
  }
  return true;
}

double DecisionMatrix::max_forbidden_mass(std::span<const double> p) const {
  double worst = 0.0;
  for (int m = 0; m < d.rows; ++m) {
    const int forbidden = std::min(b - m, d.cols);
    for (int n = 0; n < forbidden; ++n)
      worst = std::max(worst, d(m, n) * p[static_cast<std::size_t>(m)]);
  }
  return worst;
}

void DecisionMatrix::validate(std::span<const double> p) const {
  for (int m = 0; m < d.rows; ++m) {
    double sum = 0.0;
    for (int n = 0; n < d.cols; ++n) {
      if (d(m, n) < -1e-12)
        throw std::invalid_argument("decision matrix: negative entry");
      sum += d(m, n);
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw std::invalid_argument("decision matrix: row " + std::to_string(m) +
                                  " sums to " + std::to_string(sum));
  }
  if (max_forbidden_mass(p) > 1e-10)
    throw std::invalid_argument("decision matrix: zero-pattern violation at level " +
                                std::to_string(b));
}

FastResult fast_assign(std::span<const double> p, const MarginalVector& mv) {
  check_pmf(p, "request pmf");
  check_pmf(mv.a, "marginal vector");
  const int X = static_cast<int>(p.size()) - 1;
  const int B = static_cast<int>(mv.a.size()) - 1;

  Mat D(X + 1, B + 1, 0.0);
  StripeSupport stripe;
  stripe.cells.reserve(static_cast<std::size_t>(X + B + 2));

  std::vector<int> rows;  // rows with positive probability, in order
  rows.reserve(p.size());
  for (int m = 0; m <= X; ++m)
    if (p[m] > 0.0) rows.push_back(m);

  std::size_t ri = 0;
  int n = B;
  double u = rows.empty() ? 0.0 : p[rows[0]];
  double w = mv.a[static_cast<std::size_t>(n)];
  int visited = 0;

  while (ri < rows.size() && n >= 0) {
    const int m = rows[ri];
    const double tie_tol = 1e-12 * std::max(u, w);
    ++visited;
    if (u < w - tie_tol) {
      // Row m exhausts; the column keeps its residual.
      D(m, n) = u / p[m];
      stripe.cells.push_back({m, n, u, false});
      w -= u;
      if (++ri < rows.size()) u = p[rows[ri]];
    } else if (u > w + tie_tol) {
      // Column n exhausts.
      D(m, n) = w / p[m];
      stripe.cells.push_back({m, n, w, false});
      u -= w;
      if (--n >= 0) w = mv.a[static_cast<std::size_t>(n)];
    } else {
      // Equal residuals: advance both. A zero-mass cell keeps the dual chain
      // connected when the walk continues in both dimensions.
      const double t = std::min(u, w);
      D(m, n) = t / p[m];
      stripe.cells.push_back({m, n, t, false});
      if (n >= 1 && ri + 1 < rows.size())
        stripe.cells.push_back({m, n - 1, 0.0, true});
      if (++ri < rows.size()) u = p[rows[ri]];
      if (--n >= 0) w = mv.a[static_cast<std::size_t>(n)];
    }
  }
  stripe.visited = visited;

  // Rows never reached by the walk (zero probability, or starved by rounding
  // drift) get a point mass at the smallest feasible column; partially filled
  // rows absorb their sub-ulp deficit at the last visited cell.
  std::vector<double> row_sum(static_cast<std::size_t>(X + 1), 0.0);
  std::vector<int> row_last(static_cast<std::size_t>(X + 1), -1);
  for (const auto& c : stripe.cells) {
    if (c.degenerate) continue;
    row_sum[static_cast<std::size_t>(c.row)] += D(c.row, c.col);
    row_last[static_cast<std::size_t>(c.row)] = c.col;
  }
  for (int m = 0; m <= X; ++m) {
    if (row_last[static_cast<std::size_t>(m)] < 0) {
      D(m, std::max(0, mv.b - m)) = 1.0;
    } else {
      const double deficit = 1.0 - row_sum[static_cast<std::size_t>(m)];
      if (deficit != 0.0) D(m, row_last[static_cast<std::size_t>(m)]) += deficit;
    }
  }

  return {DecisionMatrix{mv.b, std::move(D)}, std::move(stripe)};
}

namespace {

void require_pattern(const FastResult& fr, std::span<const double> p, int b) {
  if (fr.D.max_forbidden_mass(p) > 1e-10)
    throw infeasible_marginal(
        b, "marginal is not realizable at level " + std::to_string(b) +
               ": assignment places mass below the staircase (cumulative "
               "feasibility violated)");
}

}  // namespace

double h_value(const SystemConfig& cfg, const EtaPowers& pows, const MarginalVector& a) {
  const auto fr = fast_assign(cfg.pmf, a);
  require_pattern(fr, cfg.pmf, a.b);
  double acc = 0.0;
  for (const auto& c : fr.stripe.cells) acc += c.mass * pows.at(c.row + c.col - a.b);
  return acc - 1.0;
}

double h_value(const SystemConfig& cfg, const MarginalVector& a) {
  return h_value(cfg, EtaPowers::for_config(cfg), a);
}

std::vector<double> h_subgradient(const SystemConfig& cfg, const EtaPowers& pows,
                                  const MarginalVector& a) {
  const auto fr = fast_assign(cfg.pmf, a);
  require_pattern(fr, cfg.pmf, a.b);
  const int B = cfg.B;
  const int b = a.b;
  const auto& cells = fr.stripe.cells;

  std::vector<double> nu(static_cast<std::size_t>(B + 1),
                         std::numeric_limits<double>::quiet_NaN());
  std::vector<double> alpha(cfg.pmf.size(), 0.0);

  // Complementary slackness along the stripe chain: alpha_m + nu_n = c(m, n)
  // on basic cells, alpha pinned to 0 at the first row of the walk.
  int prev_row = cells.front().row;
  alpha[static_cast<std::size_t>(prev_row)] = 0.0;
  nu[static_cast<std::size_t>(cells.front().col)] =
      pows.at(prev_row + cells.front().col - b);
  int last_row = prev_row;
  int min_col = cells.front().col;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int m = cells[i].row;
    const int n = cells[i].col;
    const double c = pows.at(m + n - b);
    if (m == prev_row) {
      nu[static_cast<std::size_t>(n)] = c - alpha[static_cast<std::size_t>(m)];
    } else {
      // The walk only moves row-wise through a shared column (zero-probability
      // rows are skipped, which keeps the column in common).
      alpha[static_cast<std::size_t>(m)] = c - nu[static_cast<std::size_t>(n)];
    }
    prev_row = m;
    last_row = std::max(last_row, m);
    min_col = std::min(min_col, n);
  }
  // Columns never entered (zero trailing demand): extend the chain through
  // the last basic row, which preserves dual feasibility.
  for (int n = min_col - 1; n >= 0; --n)
    nu[static_cast<std::size_t>(n)] =
        pows.at(last_row + n - b) - alpha[static_cast<std::size_t>(last_row)];
  return nu;
}

bool is_generalized_monotone(const Mat& d, double tol) {
  // Violation iff some row has support strictly right of an earlier row's
  // leftmost support.
  int min_support = d.cols;  // leftmost support column seen so far
  for (int m = 0; m < d.rows; ++m) {
    int lo = d.cols, hi = -1;
    for (int n = 0; n < d.cols; ++n) {
      if (d(m, n) > tol) {
        lo = std::min(lo, n);
        hi = n;
      }
    }
    if (hi > min_support && m > 0 && min_support < d.cols) return false;
    min_support = std::min(min_support, lo);
  }
  return true;
}

std::vector<double> hall_caps(int b, std::span<const double> p) {
  const int X = static_cast<int>(p.size()) - 1;
  std::vector<double> caps(static_cast<std::size_t>(std::max(0, b)));
  for (int k = 0; k < b; ++k) {
    double tail = 0.0;
    for (int x = std::max(0, b - k); x <= X; ++x) tail += p[static_cast<std::size_t>(x)];
    caps[static_cast<std::size_t>(k)] = (b - k > X) ? 0.0 : tail;
  }
  return caps;
}

bool marginal_feasible(int b, std::span<const double> p, std::span<const double> a) {
  const auto caps = hall_caps(b, p);
  double prefix = 0.0;
  for (int k = 0; k < b; ++k) {
    prefix += a[static_cast<std::size_t>(k)];
    if (prefix > caps[static_cast<std::size_t>(k)] + 1e-12) return false;
  }
  return true;
}

}  // namespace jpc
