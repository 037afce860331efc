// bridge.hpp — the classical -> quantum correspondence.
//
// Conventions (also written into every report):
//   T(rho) = cov^c(rho) / alpha                 for J-invariant Gaussian rho
//   T(f)   = real_to_complex(f''(0)) / 2        for f in the symplectic class
//   f_alpha = f / alpha
// With these, <f_alpha>_rho = Tr T(rho) T(f) exactly for quadratic f and up to
// O(alpha) otherwise.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcsft/gaussian.hpp"
#include "pcsft/variable.hpp"

namespace pcsft {

inline constexpr const char* kConventions =
    "T(rho)=cov_c(rho)/alpha; cov_c=(B11+B22)-i(B12-B21); T(f)=real_to_complex(f''(0))/2; "
    "f_alpha=f/alpha; f_A(psi)=1/2(A psi,psi)";

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// cov^c(rho) / alpha. Requires rho J-invariant and |dispersion/alpha - 1| <=
/// 1e-9.
DensityOperator project_state(const GaussianState& rho, double alpha);

/// real_to_complex(f''(0)) / 2. Throws PreconditionError if f''(0) is not
/// J-commuting.
ComplexOperator project_variable(const ClassicalVariable& f, double tol = 1e-6);

/// Plain Monte Carlo mean and standard error over `count` draws from rho.
Estimate classical_average(const ClassicalVariable& f, const GaussianState& rho, std::uint64_t seed,
                           std::int64_t count, unsigned workers = 1);

/// Re Tr(D A). Throws PreconditionError unless A is hermitian.
double quantum_average(const DensityOperator& d, const ComplexOperator& a);

/// e^{-iMt} D e^{iMt}.
DensityOperator von_neumann_evolve(const DensityOperator& d, const ComplexOperator& m, double t);

/// |T(sum l_j f_j) - sum l_j T(f_j)|_max.
double check_linearity(const std::vector<ClassicalVariable>& fs, const std::vector<double>& lambdas);

struct ScanPoint {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Estimate classical;  // <f_alpha>, plain estimator
  /// <f_alpha> - Tr D T(f), estimated with the second-order Taylor term of f
  /// as a control variate (its Gaussian mean is known in closed form).
  Estimate remainder;
};

struct PowerFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double log_prefactor = 0.0;
  bool conclusive = false;
};

struct LinearFit {
  double intercept = 0.0;
  double intercept_se = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

struct CorrespondenceReport {
  std::string variable;
  std::vector<ScanPoint> points;
  double quantum = 0.0;
  PowerFit power_fit;          // log|remainder| vs log alpha
  LinearFit extrapolation;     // <f_alpha> = a + b alpha, a -> quantum average
  std::string conventions = kConventions;
  std::string note;

  nlohmann::json to_json() const;
  /// One row per alpha.
  void write_csv(std::ostream& os) const;
};

inline const std::vector<double> kDefaultAlphas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
inline constexpr std::int64_t kDefaultScanSamples = 200000;

/// For each alpha, the J-invariant state with complex covariance alpha * shape
/// is sampled and <f_alpha> compared with quantum_average(shape, T(f)).
/// Points are evaluated with seeds derived from (seed, index); the report
/// is identical for any worker count.
CorrespondenceReport alpha_scan(const ClassicalVariable& f, const DensityOperator& shape,
                                const std::vector<double>& alphas, std::uint64_t seed,
                                std::int64_t count = kDefaultScanSamples, unsigned workers = 1);

/// Weighted least squares of log|r| on log alpha, weights from the relative
/// standard errors. Conclusive when every |r| exceeds 3 standard errors.
PowerFit fit_power_law(const std::vector<double>& alphas, const std::vector<Estimate>& values);

/// Weighted least squares y = a + b x.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<Estimate>& y);

struct TwoTermFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double chi2 = 0.0;  // weighted residual sum of squares
  int dof = 0;
};

/// Weighted least squares r = c1 alpha + c2 alpha^2.
TwoTermFit fit_two_term(const std::vector<double>& alphas, const std::vector<Estimate>& values);

}  // namespace pcsft
