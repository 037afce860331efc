#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pcsft/kernels.hpp"
#include "pcsft/rng.hpp"

namespace pcsft::kernels {
namespace {

std::vector<double> normals(std::size_t n, std::uint64_t stream) {
  NormalStream rng(7, stream);
  std::vector<double> v(n);
  rng.fill_normal(v);
  return v;
}

double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

class IsaGuard {
 public:
  IsaGuard() : saved_(active_isa()) {}
  ~IsaGuard() { force_isa(saved_); }

 private:
  Isa saved_;
};

TEST(Kernels, ScalarReferenceMatchesNaiveLoops) {
  for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u}) {
    const auto a = normals(n * n, 1), x = normals(n, 2);
    double naive_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) naive_dot += x[i] * x[i];
    EXPECT_NEAR(scalar::dot(x.data(), x.data(), n), naive_dot, 1e-13 * naive_dot);

    std::vector<double> y(n);
    scalar::gemv(a.data(), n, n, x.data(), y.data());
    double naive_q = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < n; ++c) row += a[r * n + c] * x[c];
      EXPECT_NEAR(y[r], row, 1e-12 * (1.0 + std::abs(row)));
      naive_q += x[r] * row;
    }
    EXPECT_NEAR(scalar::quadratic_form(a.data(), n, x.data()), naive_q, 1e-12 * (1.0 + std::abs(naive_q)));
  }
}

#ifdef PCSFT_HAVE_AVX2_KERNELS
TEST(Kernels, Avx2MatchesScalarAcrossLengths) {
  if (!isa_available(Isa::kAvx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  for (std::size_t n = 1; n <= 67; ++n) {
    const auto a = normals(n, 10 + n), b = normals(n, 100 + n);
    const double tol = 1e-14 * (1.0 + abs_dot(a, b));
    EXPECT_NEAR(avx2::dot(a.data(), b.data(), n), scalar::dot(a.data(), b.data(), n), tol) << "n=" << n;

    std::vector<double> y1 = b, y2 = b;
    scalar::axpy(0.37, a.data(), y1.data(), n);
    avx2::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1.0 + std::abs(y1[i])));
  }
  for (std::size_t rows : {1u, 2u, 5u, 8u}) {
    for (std::size_t cols : {1u, 3u, 4u, 9u, 64u}) {
      const auto m = normals(rows * cols, rows * 100 + cols), x = normals(cols, 999);
      std::vector<double> y1(rows), y2(rows);
      scalar::gemv(m.data(), rows, cols, x.data(), y1.data());
      avx2::gemv(m.data(), rows, cols, x.data(), y2.data());
      for (std::size_t r = 0; r < rows; ++r) EXPECT_NEAR(y1[r], y2[r], 1e-13 * (1.0 + std::abs(y1[r])));
    }
  }
  for (std::size_t n : {2u, 6u, 8u, 13u, 32u}) {
    const auto m = normals(n * n, 500 + n), x = normals(n, 600 + n);
    const double ref = scalar::quadratic_form(m.data(), n, x.data());
    EXPECT_NEAR(avx2::quadratic_form(m.data(), n, x.data()), ref, 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST(Kernels, Avx2IsBitwiseReproducible) {
  if (!isa_available(Isa::kAvx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  const auto a = normals(1001, 3), b = normals(1001, 4);
  const double first = avx2::dot(a.data(), b.data(), a.size());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(avx2::dot(a.data(), b.data(), a.size()), first);
}
#endif

TEST(Kernels, ForcingScalarRoutesThroughReference) {
  IsaGuard guard;
  force_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  const auto a = normals(50, 5), b = normals(50, 6);
  EXPECT_EQ(dot(a, b), scalar::dot(a.data(), b.data(), a.size()));
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
}

TEST(Kernels, ForcingUnavailableIsaThrows) {
  IsaGuard guard;
  if (isa_available(Isa::kAvx2)) GTEST_SKIP() << "AVX2 present; nothing unavailable to force";
  EXPECT_THROW(force_isa(Isa::kAvx2), std::invalid_argument);
}

TEST(Kernels, SpanFrontEndsCheckSizes) {
  std::vector<double> a(4, 1.0), b(3, 1.0), y(2);
  EXPECT_THROW(dot(a, b), std::invalid_argument);
  EXPECT_THROW(gemv(a, 2, 3, b, y), std::invalid_argument);
  EXPECT_THROW(quadratic_form(a, 3, b), std::invalid_argument);
  EXPECT_THROW(axpy(1.0, a, b), std::invalid_argument);
  EXPECT_DOUBLE_EQ(sum_squares(a), 4.0);
}

}  // namespace
}  // namespace pcsft::kernels
