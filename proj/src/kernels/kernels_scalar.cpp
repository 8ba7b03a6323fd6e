#include "jpc/kernels.hpp"

#include <cassert>

namespace jpc::kernels::scalar {

MinResult argmin_sum(const double* a, const double* b, int n) {
  assert(n >= 1);
  double best = a[0] + b[0];
  int idx = 0;
  for (int i = 1; i < n; ++i) {
    const double s = a[i] + b[i];
    if (s < best) {
      best = s;
      idx = i;
    }
  }
  return {best, idx};
}

double dot(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

MinMax diff_span(const double* a, const double* b, int n) {
  assert(n >= 1);
  double lo = a[0] - b[0];
  double hi = lo;
  for (int i = 1; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  return {lo, hi};
}

void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace jpc::kernels::scalar
