// symplectic.hpp — the phase space R^n x R^n with its canonical structure.
//
// A point is psi = (q, p). The symplectic operator is J(q, p) = (p, -q), the
// symplectic form is w(a, b) = (a, J b) = (p_b, q_a) - (p_a, q_b) and the
// hermitian product is <a, b> = (a, b) - i w(a, b), which is the complex dot
// product of q_a + i p_a with the conjugate of q_b + i p_b.
//
// Under psi <-> q + i p, an operator [[D, S], [-S, D]] acts as D - iS; J acts
// as -i.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pcsft {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Default tolerance for algebraic identity checks (max norm, scaled by
/// max(1, operand max norm)).
inline constexpr double kIdentityTol = 1e-10;

/// Outcome of a tolerance predicate: the verdict and the measured defect.
struct Check {
  bool ok = false;
  double defect = 0.0;
  explicit operator bool() const { return ok; }
};

double max_abs(const RealMatrix& m);
double max_abs(const ComplexMatrix& m);

class PhaseVector {
 public:
  /// Zero vector with n degrees of freedom.
  explicit PhaseVector(Eigen::Index n);
  PhaseVector(const RealVector& q, const RealVector& p);

  /// From the stacked layout (q_0..q_{n-1}, p_0..p_{n-1}).
  static PhaseVector from_stacked(RealVector qp);
  /// From z = q + i p.
  static PhaseVector from_complex(const ComplexVector& z);

  Eigen::Index dim() const { return data_.size() / 2; }
  auto q() const { return data_.head(dim()); }
  auto p() const { return data_.tail(dim()); }
  const RealVector& stacked() const { return data_; }
  ComplexVector to_complex() const;

  double squared_norm() const;
  double norm() const;

  PhaseVector operator-() const;
  friend PhaseVector operator+(const PhaseVector& a, const PhaseVector& b);
  friend PhaseVector operator-(const PhaseVector& a, const PhaseVector& b);
  friend PhaseVector operator*(double s, const PhaseVector& a);

  /// Euclidean scalar product (a, b).
  friend double dot(const PhaseVector& a, const PhaseVector& b);

 private:
  RealVector data_;
};

/// Real linear operator on the 2n-dimensional phase space with named n x n
/// blocks [[A11, A12], [A21, A22]].
class BlockOperator {
 public:
  explicit BlockOperator(RealMatrix full);

  static BlockOperator from_blocks(const RealMatrix& a11, const RealMatrix& a12,
                                   const RealMatrix& a21, const RealMatrix& a22);
  /// [[d, s], [-s, d]], the general J-commuting operator.
  static BlockOperator j_commuting(const RealMatrix& d, const RealMatrix& s);
  static BlockOperator identity(Eigen::Index n);
  static BlockOperator zero(Eigen::Index n);
  /// J = [[0, I], [-I, 0]]. Only for tests and reference paths; hot paths use
  /// apply_j.
  static BlockOperator symplectic_j(Eigen::Index n);

  Eigen::Index dim() const { return m_.rows() / 2; }
  const RealMatrix& matrix() const { return m_; }
  auto block(int i, int j) const { return m_.block(i * dim(), j * dim(), dim(), dim()); }

  PhaseVector apply(const PhaseVector& v) const;
  BlockOperator transpose() const;

  /// max |A - A^T|, ok when within tol * max(1, |A|_max).
  Check symmetric(double tol = 1e-12) const;

  friend BlockOperator operator+(const BlockOperator& a, const BlockOperator& b);
  friend BlockOperator operator-(const BlockOperator& a, const BlockOperator& b);
  friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
  friend BlockOperator operator*(double s, const BlockOperator& a);

 private:
  RealMatrix m_;
};

/// C-linear operator on C^n.
class ComplexOperator {
 public:
  explicit ComplexOperator(ComplexMatrix m);

  static ComplexOperator identity(Eigen::Index n);
  static ComplexOperator zero(Eigen::Index n);
  /// |psi><psi|, i.e. y -> <y, psi> psi.
  static ComplexOperator projector(const ComplexVector& psi);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  ComplexVector apply(const ComplexVector& v) const { return m_ * v; }
  ComplexOperator adjoint() const { return ComplexOperator(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }

  /// max |M - M*|, ok when within tol * max(1, |M|_max).
  Check hermitian(double tol = 1e-12) const;

  friend ComplexOperator operator+(const ComplexOperator& a, const ComplexOperator& b);
  friend ComplexOperator operator-(const ComplexOperator& a, const ComplexOperator& b);
  friend ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b);
  friend ComplexOperator operator*(Complex s, const ComplexOperator& a);

 private:
  ComplexMatrix m_;
};

/// The canonical symplectic form on a phase space of fixed dimension.
class SymplecticForm {
 public:
  explicit SymplecticForm(Eigen::Index n) : n_(n) {}
  Eigen::Index dim() const { return n_; }
  double operator()(const PhaseVector& a, const PhaseVector& b) const;

 private:
  Eigen::Index n_;
};

PhaseVector apply_j(const PhaseVector& v);

/// Block test A11 = A22, A12 = -A21; the defect equals |AJ - JA|_max.
Check is_j_commuting(const BlockOperator& a, double tol = kIdentityTol);

double symplectic_form(const PhaseVector& a, const PhaseVector& b);
Complex hermitian_product(const PhaseVector& a, const PhaseVector& b);

/// [[D, S], [-S, D]] -> D - iS. Throws PreconditionError unless A is
/// J-commuting within tol.
ComplexOperator real_to_complex(const BlockOperator& a, double tol = kIdentityTol);
/// D - iS -> [[D, S], [-S, D]].
BlockOperator complex_to_real(const ComplexOperator& m);

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace pcsft
