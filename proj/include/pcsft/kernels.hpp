// kernels.hpp — dense double-precision inner loops used by the Monte Carlo
// paths (sampling, quadratic-form evaluation, norms).
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at runtime from CPU features;
// setting PCSFT_ISA=scalar in the environment pins the reference path.
//
// Both variants use a fixed accumulation order, so results are reproducible
// for a given ISA. Scalar and AVX2 results agree to rounding, not bitwise.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace pcsft::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// Raw-pointer kernel signatures. Matrices are dense row-major.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  double (*quadratic_form)(const double* a, std::size_t n, const double* x);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double quadratic_form(const double* a, std::size_t n, const double* x);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#ifdef PCSFT_HAVE_AVX2_KERNELS
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double quadratic_form(const double* a, std::size_t n, const double* x);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

bool isa_available(Isa isa);
Isa detected_isa();
Isa active_isa();

/// Overrides the dispatch choice (tests and benchmarks). Throws
/// std::invalid_argument if the ISA is not supported on this CPU.
void force_isa(Isa isa);

const KernelTable& table(Isa isa);
const KernelTable& active_table();

// Span front-ends over the active table. Sizes are checked.

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> x);
/// y = A x for row-major A (rows x cols).
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
/// x^T A x for row-major square A.
double quadratic_form(std::span<const double> a, std::size_t n, std::span<const double> x);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace pcsft::kernels
