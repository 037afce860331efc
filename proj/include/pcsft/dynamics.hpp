// dynamics.hpp — Hamiltonian flows on phase space.
//
// Quadratic Hamilton functions H(psi) = 1/2 (H psi, psi) generate the linear
// flow U_t = exp(J H t). The flow is always symplectic; it is orthogonal
// exactly when H commutes with J, in which case its complex form is the
// Schrodinger propagator exp(-iMt) with M = real_to_complex(H).
//
// General Hamilton functions are integrated with the implicit midpoint rule.

#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <shared_mutex>
#include <vector>

#include "pcsft/symplectic.hpp"
#include "pcsft/variable.hpp"

namespace pcsft {

class QuadraticHamiltonian {
 public:
  /// Throws PreconditionError unless h is symmetric within 1e-12.
  explicit QuadraticHamiltonian(BlockOperator h);

  Eigen::Index dim() const { return h_.dim(); }
  const BlockOperator& op() const { return h_; }
  bool j_invariant() const { return j_invariant_; }

  double value(const PhaseVector& psi) const { return 0.5 * dot(h_.apply(psi), psi); }
  PhaseVector gradient(const PhaseVector& psi) const { return h_.apply(psi); }

 private:
  BlockOperator h_;
  bool j_invariant_;
};

class NonquadraticHamiltonian {
 public:
  using Value = std::function<double(const PhaseVector&)>;
  using Gradient = std::function<PhaseVector(const PhaseVector&)>;
  using Hessian = std::function<BlockOperator(const PhaseVector&)>;

  NonquadraticHamiltonian(Eigen::Index n, Value value, Gradient gradient, Hessian hessian = {});

  static NonquadraticHamiltonian quadratic(const QuadraticHamiltonian& h);
  /// Uses the variable's value and gradient (throws if it has none).
  static NonquadraticHamiltonian from_variable(const ClassicalVariable& f);
  /// q_0^2 p_0.
  static NonquadraticHamiltonian cubic_q2p(Eigen::Index n = 1);
  /// (c, psi); its flow is a translation.
  static NonquadraticHamiltonian linear(const PhaseVector& c);

  Eigen::Index dim() const { return n_; }
  double value(const PhaseVector& psi) const { return value_(psi); }
  PhaseVector gradient(const PhaseVector& psi) const { return gradient_(psi); }
  bool has_hessian() const { return static_cast<bool>(hessian_); }
  /// Analytic if supplied, otherwise central differences of the gradient.
  BlockOperator hessian_at(const PhaseVector& psi, double h = 1e-4) const;

  /// Central-difference check of the gradient against the value at psi;
  /// returns max relative error.
  double gradient_consistency(const PhaseVector& psi, double h = 1e-6) const;

 private:
  Eigen::Index n_;
  Value value_;
  Gradient gradient_;
  Hessian hessian_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseVector> states;
  std::vector<double> energy;
  std::vector<double> norm;

  const PhaseVector& final_state() const { return states.back(); }
  /// Columns t, q_0..q_{n-1}, p_0..p_{n-1}, energy, norm.
  void write_csv(std::ostream& os) const;
};

struct IntegratorOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  bool record = true;  // keep every step; otherwise only the endpoints
};

/// exp(J H t), computed by scaling and squaring with a Pade approximant on
/// the real 2n x 2n generator.
BlockOperator linear_flow(const QuadraticHamiltonian& h, double t);

/// exp(-iMt) from the spectral decomposition of hermitian M.
ComplexOperator schrodinger_flow(const ComplexOperator& m, double t);

/// Implicit midpoint psi' = psi + dt J H'((psi + psi')/2), solved by
/// fixed-point iteration. The last step is shortened to land on t_final.
/// Throws IntegrationError on non-convergence.
Trajectory integrate(const NonquadraticHamiltonian& h, const PhaseVector& psi0, double t_final, double dt,
                     const IntegratorOptions& options = {});

/// (J H'(psi), psi). Zero everywhere iff the flow preserves the norm.
double norm_preservation_defect(const NonquadraticHamiltonian& h, const PhaseVector& psi);

/// U_t^T A U_t.
BlockOperator heisenberg_evolve(const BlockOperator& a, const QuadraticHamiltonian& h, double t);

/// psi -> f0(U_t psi), with gradient U_t^T f0'(U_t psi).
ClassicalVariable lift_variable(const QuadraticHamiltonian& h, const ClassicalVariable& f0, double t);
/// psi -> f0(U_t psi) along the integrated flow; gradient by central
/// differences.
ClassicalVariable lift_variable(const NonquadraticHamiltonian& h, const ClassicalVariable& f0, double t,
                                double dt);

/// |U_t(-psi) + U_t(psi)| from two integrations.
double flow_oddness_defect(const NonquadraticHamiltonian& h, const PhaseVector& psi, double t, double dt);

/// Flow matrices keyed by (H, t). Lookups take a shared lock; inserts take
/// the exclusive lock, so any number of readers may run alongside one writer
/// at a time.
class FlowCache {
 public:
  BlockOperator get(const QuadraticHamiltonian& h, double t);
  std::size_t size() const;
  std::size_t misses() const;

 private:
  struct Key {
    std::uint64_t digest;
    double t;
    auto operator<=>(const Key&) const = default;
  };
  mutable std::shared_mutex mutex_;
  std::map<Key, std::pair<RealMatrix, BlockOperator>> entries_;
  std::size_t misses_ = 0;
};

}  // namespace pcsft
