#include "jpc/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace jpc::kernels {

bool avx2_available() {
#ifdef JPC_KERNELS_HAVE_AVX2
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

struct Backend {
  MinResult (*argmin_sum)(const double*, const double*, int);
  double (*dot)(const double*, const double*, int);
  MinMax (*diff_span)(const double*, const double*, int);
  void (*axpy)(double, const double*, double*, int);
  const char* name;
};

Backend select_backend() {
  const char* forced = std::getenv("JPC_KERNELS");
  const bool force_scalar = forced && std::strcmp(forced, "scalar") == 0;
#ifdef JPC_KERNELS_HAVE_AVX2
  if (!force_scalar && avx2_available()) {
    return {&avx2::argmin_sum, &avx2::dot, &avx2::diff_span, &avx2::axpy, "avx2"};
  }
#else
  (void)force_scalar;
#endif
  return {&scalar::argmin_sum, &scalar::dot, &scalar::diff_span, &scalar::axpy,
          "scalar"};
}

const Backend& backend() {
  static const Backend b = select_backend();
  return b;
}

}  // namespace

const char* active_backend() { return backend().name; }

MinResult argmin_sum(const double* a, const double* b, int n) {
  return backend().argmin_sum(a, b, n);
}

double dot(const double* a, const double* b, int n) { return backend().dot(a, b, n); }

MinMax diff_span(const double* a, const double* b, int n) {
  return backend().diff_span(a, b, n);
}

void axpy(double alpha, const double* x, double* y, int n) {
  backend().axpy(alpha, x, y, n);
}

}  // namespace jpc::kernels
