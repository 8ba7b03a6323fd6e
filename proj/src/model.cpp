#include "jpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jpc/kernels.hpp"

namespace jpc {

SystemConfig SystemConfig::make(int B, double eta, std::vector<double> pmf) {
  if (B < 0) throw std::invalid_argument("buffer capacity B must be >= 0");
  if (!(eta > 1.0)) throw std::invalid_argument("energy base eta must exceed 1");
  if (pmf.empty()) throw std::invalid_argument("request pmf must be non-empty");
  for (double v : pmf) {
    if (!(v >= 0.0)) throw std::invalid_argument("request pmf entries must be >= 0");
  }
  const double sum = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  // Rounding-level drift is renormalized; anything larger is a user error.
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("request pmf must sum to 1 (got " + std::to_string(sum) + ")");
  if (sum != 1.0) {
    for (double& v : pmf) v /= sum;
  }
  SystemConfig cfg;
  cfg.B = B;
  cfg.eta = eta;
  cfg.pmf = std::move(pmf);
  return cfg;
}

SystemConfig SystemConfig::uniform(int B, double eta, int X) {
  if (X < 0) throw std::invalid_argument("uniform request bound X must be >= 0");
  return make(B, eta, std::vector<double>(X + 1, 1.0 / (X + 1)));
}

double SystemConfig::mean_request() const {
  double m = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) m += static_cast<double>(x) * pmf[x];
  return m;
}

double pow_int(double eta, int k) {
  double p = 1.0;
  for (int i = 0; i < std::abs(k); ++i) p *= eta;
  return k >= 0 ? p : 1.0 / p;
}

double energy_cost(int items, double eta) {
  if (items < 0)
    throw std::domain_error("negative transmission count (policy bug upstream)");
  return pow_int(eta, items) - 1.0;
}

double energy_cost_rate(double rate, double eta) {
  if (rate < -1e-12) throw std::domain_error("negative transmission rate");
  return std::pow(eta, std::max(rate, 0.0)) - 1.0;
}

ActionRange action_bounds(int b, int x, int B) {
  ActionRange r;
  r.y_min = std::max(0, x - b);
  r.y_max = B - b + x;
  r.next_min = std::max(0, b - x);
  r.next_max = B;
  return r;
}

int next_buffer(int b, int x, int y) { return b + y - x; }

double expected_state_cost(State s, std::span<const double> next_dist, double eta) {
  const int floor_n = std::max(0, s.b - s.x);
  for (int n = 0; n < floor_n; ++n) {
    if (next_dist[n] > 1e-12)
      throw infeasible_marginal(
          s.b, "next-buffer mass below the feasible floor at state (b=" +
                   std::to_string(s.b) + ", x=" + std::to_string(s.x) + ")");
  }
  // eta^(x-b) * sum_n eta^n d_n - 1, accumulated with a running power.
  double cur = pow_int(eta, s.x - s.b);
  double acc = 0.0;
  for (std::size_t n = 0; n < next_dist.size(); ++n) {
    acc += next_dist[n] * cur;
    cur *= eta;
  }
  return acc - 1.0;
}

double average_cost(std::span<const double> r, const Mat& omega,
                    std::span<const double> p) {
  if (static_cast<int>(r.size()) != omega.rows ||
      static_cast<int>(p.size()) != omega.cols)
    throw std::invalid_argument("average_cost: dimension mismatch");
  double acc = 0.0;
  for (int b = 0; b < omega.rows; ++b)
    acc += r[b] * kernels::dot(omega.row(b), p.data(), omega.cols);
  return acc;
}

EtaPowers::EtaPowers(double eta_, int lo_, int hi_) : eta(eta_), lo(lo_), hi(hi_) {
  tab.resize(static_cast<std::size_t>(hi - lo + 1));
  double p = 1.0;
  for (int k = 0; k <= hi; ++k) {
    if (k >= lo) tab[static_cast<std::size_t>(k - lo)] = p;
    p *= eta;
  }
  p = 1.0;
  for (int k = 0; k >= lo; --k) {
    if (k <= hi) tab[static_cast<std::size_t>(k - lo)] = 1.0 / p;
    p *= eta;
  }
}

EtaPowers EtaPowers::for_config(const SystemConfig& cfg) {
  return EtaPowers(cfg.eta, -cfg.B, cfg.X() + cfg.B);
}

}  // namespace jpc
