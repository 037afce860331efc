#include "pcsft/kernels.hpp"

namespace pcsft::kernels::scalar {

// Four interleaved partial sums, combined as (s0 + s1) + (s2 + s3). The AVX2
// variant uses the same lane structure so the two paths differ only by FMA
// contraction.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

double quadratic_form(const double* a, std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t r = 0; r < n; ++r) s += x[r] * dot(a + r * n, x, n);
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace pcsft::kernels::scalar
