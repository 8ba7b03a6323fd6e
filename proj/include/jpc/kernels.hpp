#pragma once

namespace jpc::kernels {

struct MinResult {
  double value;
  int index;
};

struct MinMax {
  double lo;
  double hi;
};

// Scalar reference kernels. These define the semantics; SIMD variants must
// agree with them (bit-exact for argmin_sum/diff_span/axpy, which use only
// per-element adds/muls; dot may differ by reassociation rounding).
namespace scalar {
MinResult argmin_sum(const double* a, const double* b, int n);
double dot(const double* a, const double* b, int n);
MinMax diff_span(const double* a, const double* b, int n);
void axpy(double alpha, const double* x, double* y, int n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define JPC_KERNELS_HAVE_AVX2 1
namespace avx2 {
MinResult argmin_sum(const double* a, const double* b, int n);
double dot(const double* a, const double* b, int n);
MinMax diff_span(const double* a, const double* b, int n);
void axpy(double alpha, const double* x, double* y, int n);
}  // namespace avx2
#endif

/// True when the running CPU supports the AVX2 variants.
bool avx2_available();

/// Name of the variant the dispatched entry points run ("avx2" or "scalar").
/// Set JPC_KERNELS=scalar in the environment to force the reference path.
const char* active_backend();

// Dispatched entry points (selected once at first use).

/// Index and value of min_i (a[i] + b[i]); ties resolve to the smallest index.
MinResult argmin_sum(const double* a, const double* b, int n);

double dot(const double* a, const double* b, int n);

/// {min, max} of a[i] - b[i].
MinMax diff_span(const double* a, const double* b, int n);

/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, int n);

}  // namespace jpc::kernels
