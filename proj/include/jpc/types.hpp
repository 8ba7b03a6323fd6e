#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jpc {

/// Thrown when a marginal vector cannot be realized by any decision matrix
/// that respects the staircase zero pattern of its buffer level.
class infeasible_marginal : public std::runtime_error {
 public:
  infeasible_marginal(int level, std::string what)
      : std::runtime_error(std::move(what)), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

/// Thrown by iterative solvers that fail to certify convergence within their
/// iteration budget. Carries the best iterate seen and the residual gap.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(std::string what, double best_value, double gap,
                    long iterations, std::vector<double> best_iterate = {})
      : std::runtime_error(std::move(what)),
        best_value_(best_value),
        gap_(gap),
        iterations_(iterations),
        best_iterate_(std::move(best_iterate)) {}
  double best_value() const { return best_value_; }
  double gap() const { return gap_; }
  long iterations() const { return iterations_; }
  const std::vector<double>& best_iterate() const { return best_iterate_; }

 private:
  double best_value_;
  double gap_;
  long iterations_;
  std::vector<double> best_iterate_;
};

/// Thrown by the simulator when a sampled transition implies a negative
/// transmission, i.e. the policy violates the buffer recursion.
class policy_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal dense row-major matrix. State spaces here are tiny (tens of
/// rows/columns), so no external linear algebra dependency is warranted.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }
};

/// Problem instance: buffer capacity B, energy base eta, and the request
/// p.m.f. over {0..X}. X is inferred from the p.m.f. length; a trailing-zero
/// p.m.f. is permitted.
struct SystemConfig {
  int B = 0;
  double eta = 2.0;
  std::vector<double> pmf;

  int X() const { return static_cast<int>(pmf.size()) - 1; }

  /// Validates and normalizes. Entries must be >= 0 and sum to 1 within 1e-9
  /// (then renormalized exactly); eta must exceed 1; B must be >= 0.
  static SystemConfig make(int B, double eta, std::vector<double> pmf);

  /// Uniform request distribution over {0..X}.
  static SystemConfig uniform(int B, double eta, int X);

  double mean_request() const;
};

struct State {
  int b = 0;
  int x = 0;
};

struct DegeneratedState {
  int b = 0;
};

}  // namespace jpc
