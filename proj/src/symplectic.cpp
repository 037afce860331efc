#include "pcsft/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcsft/errors.hpp"

namespace pcsft {

double max_abs(const RealMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

// PhaseVector

PhaseVector::PhaseVector(Eigen::Index n) : data_(RealVector::Zero(2 * n)) {
  if (n < 1) throw DimensionError("PhaseVector: n must be >= 1");
}

PhaseVector::PhaseVector(const RealVector& q, const RealVector& p) : data_(2 * q.size()) {
  require_same_dim(q.size(), p.size(), "PhaseVector");
  if (q.size() < 1) throw DimensionError("PhaseVector: n must be >= 1");
  data_ << q, p;
}

PhaseVector PhaseVector::from_stacked(RealVector qp) {
  if (qp.size() < 2 || qp.size() % 2 != 0) {
    throw DimensionError("PhaseVector: stacked length must be even and >= 2");
  }
  PhaseVector v(qp.size() / 2);
  v.data_ = std::move(qp);
  return v;
}

PhaseVector PhaseVector::from_complex(const ComplexVector& z) {
  return PhaseVector(z.real(), z.imag());
}

ComplexVector PhaseVector::to_complex() const {
  ComplexVector z(dim());
  z.real() = q();
  z.imag() = p();
  return z;
}

double PhaseVector::squared_norm() const { return data_.squaredNorm(); }
double PhaseVector::norm() const { return data_.norm(); }

PhaseVector PhaseVector::operator-() const { return from_stacked(-data_); }

PhaseVector operator+(const PhaseVector& a, const PhaseVector& b) {
  require_same_dim(a.dim(), b.dim(), "PhaseVector +");
  return PhaseVector::from_stacked(a.data_ + b.data_);
}

PhaseVector operator-(const PhaseVector& a, const PhaseVector& b) {
  require_same_dim(a.dim(), b.dim(), "PhaseVector -");
  return PhaseVector::from_stacked(a.data_ - b.data_);
}

PhaseVector operator*(double s, const PhaseVector& a) { return PhaseVector::from_stacked(s * a.data_); }

double dot(const PhaseVector& a, const PhaseVector& b) {
  require_same_dim(a.dim(), b.dim(), "dot");
  return a.data_.dot(b.data_);
}

// BlockOperator

BlockOperator::BlockOperator(RealMatrix full) : m_(std::move(full)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2 || m_.rows() % 2 != 0) {
    throw DimensionError("BlockOperator: matrix must be square with even size >= 2");
  }
}

BlockOperator BlockOperator::from_blocks(const RealMatrix& a11, const RealMatrix& a12,
                                         const RealMatrix& a21, const RealMatrix& a22) {
  const Eigen::Index n = a11.rows();
  for (const RealMatrix* b : {&a11, &a12, &a21, &a22}) {
    if (b->rows() != n || b->cols() != n) throw DimensionError("BlockOperator: block shape mismatch");
  }
  RealMatrix m(2 * n, 2 * n);
  m << a11, a12, a21, a22;
  return BlockOperator(std::move(m));
}

BlockOperator BlockOperator::j_commuting(const RealMatrix& d, const RealMatrix& s) {
  return from_blocks(d, s, -s, d);
}

BlockOperator BlockOperator::identity(Eigen::Index n) {
  return BlockOperator(RealMatrix::Identity(2 * n, 2 * n));
}

BlockOperator BlockOperator::zero(Eigen::Index n) { return BlockOperator(RealMatrix::Zero(2 * n, 2 * n)); }

BlockOperator BlockOperator::symplectic_j(Eigen::Index n) {
  const RealMatrix id = RealMatrix::Identity(n, n);
  const RealMatrix z = RealMatrix::Zero(n, n);
  return from_blocks(z, id, -id, z);
}

PhaseVector BlockOperator::apply(const PhaseVector& v) const {
  require_same_dim(dim(), v.dim(), "BlockOperator::apply");
  return PhaseVector::from_stacked(m_ * v.stacked());
}

BlockOperator BlockOperator::transpose() const { return BlockOperator(m_.transpose()); }

Check BlockOperator::symmetric(double tol) const {
  const double defect = max_abs(RealMatrix(m_ - m_.transpose()));
  return {defect <= tol * std::max(1.0, max_abs(m_)), defect};
}

BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) {
  require_same_dim(a.dim(), b.dim(), "BlockOperator +");
  return BlockOperator(a.m_ + b.m_);
}

BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) {
  require_same_dim(a.dim(), b.dim(), "BlockOperator -");
  return BlockOperator(a.m_ - b.m_);
}

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
  require_same_dim(a.dim(), b.dim(), "BlockOperator *");
  return BlockOperator(a.m_ * b.m_);
}

BlockOperator operator*(double s, const BlockOperator& a) { return BlockOperator(s * a.m_); }

// ComplexOperator

ComplexOperator::ComplexOperator(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw DimensionError("ComplexOperator: matrix must be square and non-empty");
  }
}

ComplexOperator ComplexOperator::identity(Eigen::Index n) {
  return ComplexOperator(ComplexMatrix::Identity(n, n));
}

ComplexOperator ComplexOperator::zero(Eigen::Index n) { return ComplexOperator(ComplexMatrix::Zero(n, n)); }

ComplexOperator ComplexOperator::projector(const ComplexVector& psi) {
  return ComplexOperator(psi * psi.adjoint());
}

Check ComplexOperator::hermitian(double tol) const {
  const double defect = max_abs(ComplexMatrix(m_ - m_.adjoint()));
  return {defect <= tol * std::max(1.0, max_abs(m_)), defect};
}

ComplexOperator operator+(const ComplexOperator& a, const ComplexOperator& b) {
  require_same_dim(a.dim(), b.dim(), "ComplexOperator +");
  return ComplexOperator(a.m_ + b.m_);
}

ComplexOperator operator-(const ComplexOperator& a, const ComplexOperator& b) {
  require_same_dim(a.dim(), b.dim(), "ComplexOperator -");
  return ComplexOperator(a.m_ - b.m_);
}

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
  require_same_dim(a.dim(), b.dim(), "ComplexOperator *");
  return ComplexOperator(a.m_ * b.m_);
}

ComplexOperator operator*(Complex s, const ComplexOperator& a) { return ComplexOperator(s * a.m_); }

// Structure maps

double SymplecticForm::operator()(const PhaseVector& a, const PhaseVector& b) const {
  require_same_dim(n_, a.dim(), "SymplecticForm");
  return symplectic_form(a, b);
}

PhaseVector apply_j(const PhaseVector& v) { return PhaseVector(v.p(), -v.q()); }

Check is_j_commuting(const BlockOperator& a, double tol) {
  const double diag = max_abs(RealMatrix(a.block(0, 0) - a.block(1, 1)));
  const double off = max_abs(RealMatrix(a.block(0, 1) + a.block(1, 0)));
  const double defect = std::max(diag, off);
  return {defect <= tol * std::max(1.0, max_abs(a.matrix())), defect};
}

double symplectic_form(const PhaseVector& a, const PhaseVector& b) {
  require_same_dim(a.dim(), b.dim(), "symplectic_form");
  return b.p().dot(a.q()) - a.p().dot(b.q());
}

Complex hermitian_product(const PhaseVector& a, const PhaseVector& b) {
  require_same_dim(a.dim(), b.dim(), "hermitian_product");
  return {dot(a, b), -symplectic_form(a, b)};
}

ComplexOperator real_to_complex(const BlockOperator& a, double tol) {
  const Check jc = is_j_commuting(a, tol);
  if (!jc) {
    throw PreconditionError("real_to_complex: operator is not J-commuting (defect " +
                            std::to_string(jc.defect) + ")");
  }
  const RealMatrix d = 0.5 * (a.block(0, 0) + a.block(1, 1));
  const RealMatrix s = 0.5 * (a.block(0, 1) - a.block(1, 0));
  ComplexMatrix m(a.dim(), a.dim());
  m.real() = d;
  m.imag() = -s;
  return ComplexOperator(std::move(m));
}

BlockOperator complex_to_real(const ComplexOperator& m) {
  return BlockOperator::j_commuting(m.matrix().real(), -m.matrix().imag());
}

}  // namespace pcsft
