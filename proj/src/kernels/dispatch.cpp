#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pcsft/kernels.hpp"

namespace pcsft::kernels {
namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::gemv, &scalar::quadratic_form,
                                   &scalar::axpy};
#ifdef PCSFT_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::gemv, &avx2::quadratic_form, &avx2::axpy};
#endif

bool cpu_has_avx2() {
#if defined(PCSFT_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("PCSFT_ISA")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_sizes(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("kernels: size mismatch in ") + what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::kScalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Isa detected_isa() { return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernels: ISA " + std::string(isa_name(isa)) + " not available");
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#ifdef PCSFT_HAVE_AVX2_KERNELS
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

const KernelTable& active_table() { return table(active_isa()); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size() == b.size(), "dot");
  return active_table().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> x) {
  return active_table().dot(x.data(), x.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  check_sizes(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv");
  active_table().gemv(a.data(), rows, cols, x.data(), y.data());
}

double quadratic_form(std::span<const double> a, std::size_t n, std::span<const double> x) {
  check_sizes(a.size() == n * n && x.size() == n, "quadratic_form");
  return active_table().quadratic_form(a.data(), n, x.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size() == y.size(), "axpy");
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace pcsft::kernels
