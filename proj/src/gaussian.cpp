#include "pcsft/gaussian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pcsft/errors.hpp"
#include "pcsft/kernels.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

std::shared_ptr<const RowMajorMatrix> sampling_factor(const RealMatrix& cov, double trace) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("GaussianState: eigendecomposition failed");
  const RealVector& lambda = es.eigenvalues();
  const double lmax = std::max(0.0, lambda.maxCoeff());
  if (lambda.minCoeff() < -1e-12 * std::max(trace, std::numeric_limits<double>::min())) {
    throw NumericalError("GaussianState: covariance is not positive semidefinite (min eigenvalue " +
                         std::to_string(lambda.minCoeff()) + ")");
  }
  // Eigenvalues at the eigensolver's round-off level are treated as exact
  // zeros; otherwise rank-deficient states would leak mass off their support.
  const double cutoff = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(cov.rows()) * lmax;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = lambda.size() - 1; i >= 0; --i) {
    if (lambda[i] > cutoff) kept.push_back(i);
  }
  auto f = std::make_shared<RowMajorMatrix>(cov.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    f->col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(kept[c]) * std::sqrt(lambda[kept[c]]);
  }
  return f;
}

}  // namespace

GaussianState::GaussianState(RealMatrix covariance) : cov_(std::move(covariance)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() < 2 || cov_.rows() % 2 != 0) {
    throw DimensionError("GaussianState: covariance must be square with even size >= 2");
  }
  if (!cov_.allFinite()) throw NumericalError("GaussianState: covariance has non-finite entries");
  const double asym = max_abs(RealMatrix(cov_ - cov_.transpose()));
  if (asym > 1e-12 * std::max(1.0, max_abs(cov_))) {
    throw NumericalError("GaussianState: covariance is not symmetric (defect " + std::to_string(asym) + ")");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  alpha_ = cov_.trace();
  factor_ = sampling_factor(cov_, alpha_);
}

GaussianState GaussianState::isotropic(Eigen::Index n, double alpha) {
  if (!(alpha >= 0.0)) throw PreconditionError("GaussianState::isotropic: alpha must be >= 0");
  return GaussianState(RealMatrix::Identity(2 * n, 2 * n) * (alpha / static_cast<double>(2 * n)));
}

DensityOperator::DensityOperator(ComplexOperator m, double tol) : m_(std::move(m)) {
  const Check h = m_.hermitian(tol);
  if (!h) throw PreconditionError("DensityOperator: not hermitian (defect " + std::to_string(h.defect) + ")");
  const Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > tol) {
    throw PreconditionError("DensityOperator: trace " + std::to_string(tr.real()) + " != 1");
  }
  const ComplexMatrix sym = 0.5 * (m_.matrix() + m_.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw PreconditionError("DensityOperator: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  }
  m_ = ComplexOperator(sym);
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw PreconditionError("DensityOperator::pure: psi must be a unit vector");
  return DensityOperator(ComplexOperator::projector(psi));
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index n) {
  return DensityOperator(ComplexOperator(ComplexMatrix::Identity(n, n) / static_cast<double>(n)));
}

double dispersion(const GaussianState& rho) { return rho.alpha(); }

Check is_j_invariant(const GaussianState& rho, double tol) {
  return is_j_commuting(BlockOperator(rho.covariance()), tol);
}

ComplexOperator complex_covariance(const GaussianState& rho) {
  const Eigen::Index n = rho.dim();
  const RealMatrix& b = rho.covariance();
  ComplexMatrix m(n, n);
  m.real() = b.topLeftCorner(n, n) + b.bottomRightCorner(n, n);
  m.imag() = -(b.topRightCorner(n, n) - b.bottomLeftCorner(n, n));
  return ComplexOperator(std::move(m));
}

GaussianState from_complex_covariance(const ComplexOperator& m, double tol) {
  const Check h = m.hermitian(tol);
  if (!h) throw PreconditionError("from_complex_covariance: operator is not hermitian");
  const ComplexMatrix sym = 0.5 * (m.matrix() + m.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, max_abs(sym));
  if (es.eigenvalues().minCoeff() < -tol * scale) {
    throw PreconditionError("from_complex_covariance: operator is not positive semidefinite");
  }
  return GaussianState(0.5 * complex_to_real(ComplexOperator(sym)).matrix());
}

void sample_one(const GaussianState& rho, std::uint64_t seed, std::uint64_t index, std::span<double> normals,
                std::span<double> out) {
  const RowMajorMatrix& l = rho.factor();
  NormalStream rng(seed, index);
  rng.fill_normal(normals);
  kernels::gemv({l.data(), static_cast<std::size_t>(l.size())}, static_cast<std::size_t>(l.rows()),
                static_cast<std::size_t>(l.cols()), normals, out);
}

PhaseBatch sample(const GaussianState& rho, std::uint64_t seed, Eigen::Index count, std::uint64_t first_index) {
  if (count < 1) throw PreconditionError("sample: count must be >= 1");
  PhaseBatch batch(rho.dim(), count);
  std::vector<double> z(static_cast<std::size_t>(rho.rank()));
  for (Eigen::Index i = 0; i < count; ++i) {
    sample_one(rho, seed, first_index + static_cast<std::uint64_t>(i), z, batch.column(i));
  }
  return batch;
}

GaussianState pure_state_measure(const ComplexVector& psi, double alpha) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw PreconditionError("pure_state_measure: psi must have unit norm");
  }
  if (!(alpha > 0.0)) throw PreconditionError("pure_state_measure: alpha must be > 0");
  const Eigen::Index n = psi.size();
  RealVector e1(2 * n), e2(2 * n);
  e1 << psi.real(), psi.imag();
  e2 << -psi.imag(), psi.real();
  return GaussianState(0.5 * alpha * (e1 * e1.transpose() + e2 * e2.transpose()));
}

GaussianState pushforward(const GaussianState& rho, const BlockOperator& u) {
  require_same_dim(rho.dim(), u.dim(), "pushforward");
  const RealMatrix b = u.matrix() * rho.covariance() * u.matrix().transpose();
  return GaussianState(0.5 * (b + b.transpose()));
}

double quadratic_average(const GaussianState& rho, const ComplexOperator& a) {
  require_same_dim(rho.dim(), a.dim(), "quadratic_average");
  if (!a.hermitian(kIdentityTol)) throw PreconditionError("quadratic_average: operator is not hermitian");
  return (complex_covariance(rho).matrix() * a.matrix()).trace().real();
}

double quadratic_average(const GaussianState& rho, const BlockOperator& a) {
  if (!a.symmetric(kIdentityTol)) throw PreconditionError("quadratic_average: operator is not symmetric");
  return quadratic_average(rho, real_to_complex(a));
}

nlohmann::json to_json(const GaussianState& rho) {
  const RealMatrix& b = rho.covariance();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) flat.push_back(b(i, j));
  }
  return {{"n", rho.dim()}, {"covariance", flat}, {"alpha", rho.alpha()}};
}

GaussianState gaussian_state_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<Eigen::Index>();
  const auto flat = j.at("covariance").get<std::vector<double>>();
  if (n < 1 || static_cast<Eigen::Index>(flat.size()) != 4 * n * n) {
    throw DimensionError("gaussian_state_from_json: covariance length does not match n");
  }
  RealMatrix b(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    for (Eigen::Index k = 0; k < 2 * n; ++k) b(i, k) = flat[static_cast<std::size_t>(i * 2 * n + k)];
  }
  GaussianState rho(std::move(b));
  const double alpha = j.at("alpha").get<double>();
  if (std::abs(alpha - rho.alpha()) > 1e-12 * std::max(1.0, std::abs(alpha))) {
    throw PreconditionError("gaussian_state_from_json: alpha does not match the covariance trace");
  }
  return rho;
}

}  // namespace pcsft
