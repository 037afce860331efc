// variable.hpp — classical physical variables f : phase space -> R.
//
// Two representations:
//   * polynomial in quadratic forms, f(psi) = sum_k a_k (H_k psi, psi)^{p_k}
//     with every H_k symmetric and J-commuting. These are J-invariant, even
//     and vanish at the vacuum by construction;
//   * black box: value callback plus optional gradient and Hessian-at-zero
//     callbacks. Membership in the symplectic class is screened on probes.
//
// Every variable carries a scale factor so amplification f / alpha is cheap.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pcsft/symplectic.hpp"

namespace pcsft {

class ClassicalVariable {
 public:
  struct Term {
    double coefficient;
    BlockOperator op;
    int power;
  };

  struct Callbacks {
    std::function<double(const PhaseVector&)> value;
    std::function<PhaseVector(const PhaseVector&)> gradient;  // optional
    std::function<BlockOperator()> hessian_at_zero;            // optional
    /// The user vouches for the exponential growth bound.
    bool growth_attested = false;
  };

  /// Throws PreconditionError if an operator is not symmetric and
  /// J-commuting, or a power is < 1.
  static ClassicalVariable polynomial(std::vector<Term> terms, double tol = kIdentityTol);
  /// sum_k a_k (H psi, psi)^k with coefficients a_1, a_2, ...
  static ClassicalVariable power_series(const BlockOperator& h, const std::vector<double>& coefficients);
  /// coefficient * (A psi, psi) for any symmetric A. Polynomial when A is
  /// J-commuting, black box (with analytic derivatives) otherwise.
  static ClassicalVariable quadratic_form(const BlockOperator& a, double coefficient = 0.5);
  /// Asserts f(0) = 0.
  static ClassicalVariable black_box(Eigen::Index n, Callbacks callbacks);

  Eigen::Index dim() const;
  double operator()(const PhaseVector& psi) const;
  /// Stacked-layout evaluation (hot path for Monte Carlo).
  double evaluate(std::span<const double> stacked) const;

  bool has_gradient() const;
  /// Throws PreconditionError when no gradient is available.
  PhaseVector gradient(const PhaseVector& psi) const;
  /// f''(0): analytic for polynomials, otherwise the callback, otherwise
  /// symmetrized central differences.
  BlockOperator hessian_at_zero() const;

  bool is_polynomial() const;
  /// Terms of the polynomial representation (empty for black boxes).
  const std::vector<Term>& terms() const;
  bool growth_attested() const;
  double scale() const { return scale_; }

  ClassicalVariable scaled(double factor) const;
  /// Same variable with a central-difference gradient attached if it had none.
  ClassicalVariable with_numerical_gradient() const;

 private:
  struct Impl;
  ClassicalVariable(std::shared_ptr<const Impl> impl, double scale) : impl_(std::move(impl)), scale_(scale) {}

  std::shared_ptr<const Impl> impl_;
  double scale_ = 1.0;
};

/// f_alpha = f / alpha. Requires alpha > 0.
ClassicalVariable amplify(const ClassicalVariable& f, double alpha);

/// {f1, f2}(psi) = (d_q f1, d_p f2) - (d_q f2, d_p f1).
double poisson_bracket(const ClassicalVariable& f1, const ClassicalVariable& f2, const PhaseVector& psi);

/// Central-difference gradient, step h * (1 + |psi|).
PhaseVector numerical_gradient(const std::function<double(const PhaseVector&)>& f, const PhaseVector& psi,
                               double h = 1e-6);

/// Symmetrized central-difference Hessian of a gradient field at psi, step
/// h * (1 + |psi|) along each unit direction.
BlockOperator numerical_hessian(const std::function<PhaseVector(const PhaseVector&)>& gradient,
                                const PhaseVector& psi, double h = 1e-4);

/// Full 2n x 2n four-point stencil on the values, symmetrized.
BlockOperator numerical_hessian_from_values(const std::function<double(const PhaseVector&)>& f,
                                            const PhaseVector& psi, double h = 1e-4);

struct ScreeningReport {
  double vacuum_value = 0.0;      // |f(0)|
  double j_invariance_defect = 0.0;  // max |f(J psi) - f(psi)| / max(1, |f(psi)|)
  double evenness_defect = 0.0;      // max |f(-psi) - f(psi)| / max(1, |f(psi)|)
  bool vacuum = false;
  bool j_invariant = false;
  bool even = false;
  bool in_symplectic_class() const { return vacuum && j_invariant && even; }
};

/// Screens f on `probes` standard-normal phase points.
ScreeningReport screen_variable(const ClassicalVariable& f, std::uint64_t seed, int probes = 100,
                                double tol = kIdentityTol);

}  // namespace pcsft
