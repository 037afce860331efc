// gaussian.hpp — zero-mean Gaussian measures on phase space and their
// complex (quantum-side) covariances.
//
// A state is stored by its real covariance B (2n x 2n, symmetric PSD). The
// complex covariance is cov^c = D - iS with D = B11 + B22, S = B12 - B21,
// which is E[z z*] for z = q + ip. For J-invariant B this is exactly 2B under
// the real/complex identification; for other states the map loses
// information.

#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "json.hpp"
#include "pcsft/symplectic.hpp"

namespace pcsft {

class GaussianState {
 public:
  /// Validates symmetry (1e-12 relative) and eigenvalues >= -1e-12 trace;
  /// throws NumericalError otherwise. Computes the sampling factor.
  explicit GaussianState(RealMatrix covariance);

  /// (alpha / 2n) I, dispersion alpha.
  static GaussianState isotropic(Eigen::Index n, double alpha);

  Eigen::Index dim() const { return cov_.rows() / 2; }
  const RealMatrix& covariance() const { return cov_; }
  double alpha() const { return alpha_; }
  /// L with L L^T = B, row-major 2n x rank; columns for eigenvalues at
  /// round-off level are dropped so degenerate states sample exactly on
  /// their support.
  const RowMajorMatrix& factor() const { return *factor_; }
  Eigen::Index rank() const { return factor_->cols(); }

 private:
  RealMatrix cov_;
  double alpha_ = 0.0;
  std::shared_ptr<const RowMajorMatrix> factor_;
};

/// Complex n x n hermitian PSD operator with unit trace.
class DensityOperator {
 public:
  /// Validates hermiticity, trace 1 and eigenvalues >= -tol.
  explicit DensityOperator(ComplexOperator m, double tol = 1e-12);

  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator maximally_mixed(Eigen::Index n);

  Eigen::Index dim() const { return m_.dim(); }
  const ComplexOperator& op() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

 private:
  ComplexOperator m_;
};

/// Batch of phase vectors, one per column of a 2n x count matrix.
class PhaseBatch {
 public:
  PhaseBatch(Eigen::Index n, Eigen::Index count) : data_(2 * n, count) {}
  Eigen::Index dim() const { return data_.rows() / 2; }
  Eigen::Index size() const { return data_.cols(); }
  PhaseVector operator[](Eigen::Index i) const { return PhaseVector::from_stacked(data_.col(i)); }
  std::span<const double> column(Eigen::Index i) const {
    return {data_.col(i).data(), static_cast<std::size_t>(data_.rows())};
  }
  std::span<double> column(Eigen::Index i) {
    return {data_.col(i).data(), static_cast<std::size_t>(data_.rows())};
  }
  const RealMatrix& matrix() const { return data_; }

 private:
  RealMatrix data_;
};

double dispersion(const GaussianState& rho);

Check is_j_invariant(const GaussianState& rho, double tol = kIdentityTol);

/// cov^c rho = (B11 + B22) - i (B12 - B21). Lossy when rho is not J-invariant.
ComplexOperator complex_covariance(const GaussianState& rho);

/// The J-invariant state with complex covariance m, B = complex_to_real(m)/2.
/// Throws PreconditionError unless m is hermitian PSD.
GaussianState from_complex_covariance(const ComplexOperator& m, double tol = 1e-12);

/// i.i.d. draws; draw i uses normal stream (seed, first_index + i).
PhaseBatch sample(const GaussianState& rho, std::uint64_t seed, Eigen::Index count,
                  std::uint64_t first_index = 0);

/// Writes draw `index` into out (stacked layout, length 2n). `normals` is
/// scratch of length rho.rank().
void sample_one(const GaussianState& rho, std::uint64_t seed, std::uint64_t index, std::span<double> normals,
                std::span<double> out);

/// (alpha/2)(e1 e1^T + e2 e2^T) with e1 = (u, v), e2 = (-v, u) for psi = u + iv.
GaussianState pure_state_measure(const ComplexVector& psi, double alpha);

/// Covariance U B U^T.
GaussianState pushforward(const GaussianState& rho, const BlockOperator& u);

/// Integral of <A psi, psi> = Re Tr(cov^c rho . A). A must be J-commuting and
/// symmetric (block form) or hermitian (complex form).
double quadratic_average(const GaussianState& rho, const BlockOperator& a);
double quadratic_average(const GaussianState& rho, const ComplexOperator& a);

/// {"n", "covariance" (row-major), "alpha"}.
nlohmann::json to_json(const GaussianState& rho);
GaussianState gaussian_state_from_json(const nlohmann::json& j);

}  // namespace pcsft
