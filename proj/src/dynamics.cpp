#include "pcsft/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <ostream>
#include <unsupported/Eigen/MatrixFunctions>

#include "pcsft/errors.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

RealMatrix j_times(const RealMatrix& h) {
  const Eigen::Index n = h.rows() / 2;
  RealMatrix jh(h.rows(), h.cols());
  jh.topRows(n) = h.bottomRows(n);
  jh.bottomRows(n) = -h.topRows(n);
  return jh;
}

PhaseVector midpoint_step(const NonquadraticHamiltonian& h, const PhaseVector& psi, double dt,
                          const IntegratorOptions& opt, std::size_t step) {
  PhaseVector next = psi + dt * apply_j(h.gradient(psi));
  for (int it = 0; it < opt.max_iterations; ++it) {
    const PhaseVector mid = 0.5 * (psi + next);
    PhaseVector updated = psi + dt * apply_j(h.gradient(mid));
    const double change = (updated.stacked() - next.stacked()).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, updated.stacked().lpNorm<Eigen::Infinity>());
    next = std::move(updated);
    if (!std::isfinite(change)) break;
    if (change <= opt.tolerance * scale) return next;
  }
  throw IntegrationError(step, "implicit midpoint: fixed-point iteration did not converge");
}

std::uint64_t digest(const RealMatrix& m) {
  return fnv1a(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

}  // namespace

QuadraticHamiltonian::QuadraticHamiltonian(BlockOperator h) : h_(std::move(h)), j_invariant_(false) {
  if (!h_.symmetric(1e-12)) throw PreconditionError("QuadraticHamiltonian: operator is not symmetric");
  j_invariant_ = static_cast<bool>(is_j_commuting(h_));
}

NonquadraticHamiltonian::NonquadraticHamiltonian(Eigen::Index n, Value value, Gradient gradient, Hessian hessian)
    : n_(n), value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
  if (!value_ || !gradient_) throw PreconditionError("NonquadraticHamiltonian: value and gradient are required");
}

NonquadraticHamiltonian NonquadraticHamiltonian::quadratic(const QuadraticHamiltonian& h) {
  return NonquadraticHamiltonian(
      h.dim(), [h](const PhaseVector& psi) { return h.value(psi); },
      [h](const PhaseVector& psi) { return h.gradient(psi); }, [h](const PhaseVector&) { return h.op(); });
}

NonquadraticHamiltonian NonquadraticHamiltonian::from_variable(const ClassicalVariable& f) {
  if (!f.has_gradient()) throw PreconditionError("NonquadraticHamiltonian::from_variable: gradient unavailable");
  return NonquadraticHamiltonian(
      f.dim(), [f](const PhaseVector& psi) { return f(psi); },
      [f](const PhaseVector& psi) { return f.gradient(psi); });
}

NonquadraticHamiltonian NonquadraticHamiltonian::cubic_q2p(Eigen::Index n) {
  return NonquadraticHamiltonian(
      n, [](const PhaseVector& psi) { return psi.q()[0] * psi.q()[0] * psi.p()[0]; },
      [n](const PhaseVector& psi) {
        RealVector g = RealVector::Zero(2 * n);
        const double q = psi.q()[0], p = psi.p()[0];
        g[0] = 2.0 * q * p;
        g[n] = q * q;
        return PhaseVector::from_stacked(std::move(g));
      },
      [n](const PhaseVector& psi) {
        RealMatrix m = RealMatrix::Zero(2 * n, 2 * n);
        const double q = psi.q()[0], p = psi.p()[0];
        m(0, 0) = 2.0 * p;
        m(0, n) = m(n, 0) = 2.0 * q;
        return BlockOperator(std::move(m));
      });
}

NonquadraticHamiltonian NonquadraticHamiltonian::linear(const PhaseVector& c) {
  const Eigen::Index n = c.dim();
  return NonquadraticHamiltonian(
      n, [c](const PhaseVector& psi) { return dot(c, psi); }, [c](const PhaseVector&) { return c; },
      [n](const PhaseVector&) { return BlockOperator::zero(n); });
}

BlockOperator NonquadraticHamiltonian::hessian_at(const PhaseVector& psi, double h) const {
  if (hessian_) return hessian_(psi);
  return numerical_hessian(gradient_, psi, h);
}

double NonquadraticHamiltonian::gradient_consistency(const PhaseVector& psi, double h) const {
  const RealVector fd = numerical_gradient(value_, psi, h).stacked();
  const RealVector g = gradient_(psi).stacked();
  return (fd - g).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
}

void Trajectory::write_csv(std::ostream& os) const {
  const Eigen::Index n = states.empty() ? 0 : states.front().dim();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",q_" << i;
  for (Eigen::Index i = 0; i < n; ++i) os << ",p_" << i;
  os << ",energy,norm\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < states.size(); ++k) {
    put(times[k]);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      os << ',';
      put(states[k].stacked()[i]);
    }
    os << ',';
    put(energy[k]);
    os << ',';
    put(norm[k]);
    os << '\n';
  }
}

BlockOperator linear_flow(const QuadraticHamiltonian& h, double t) {
  const RealMatrix generator = j_times(h.op().matrix()) * t;
  return BlockOperator(generator.exp());
}

ComplexOperator schrodinger_flow(const ComplexOperator& m, double t) {
  if (!m.hermitian(kIdentityTol)) throw PreconditionError("schrodinger_flow: operator is not hermitian");
  const ComplexMatrix sym = 0.5 * (m.matrix() + m.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  const ComplexVector phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return ComplexOperator(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

Trajectory integrate(const NonquadraticHamiltonian& h, const PhaseVector& psi0, double t_final, double dt,
                     const IntegratorOptions& options) {
  require_same_dim(h.dim(), psi0.dim(), "integrate");
  if (!(dt > 0.0)) throw PreconditionError("integrate: dt must be > 0");
  if (!(t_final >= 0.0)) throw PreconditionError("integrate: t_final must be >= 0");
  Trajectory traj;
  auto record = [&](double t, const PhaseVector& psi) {
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.energy.push_back(h.value(psi));
    traj.norm.push_back(psi.norm());
  };
  record(0.0, psi0);
  PhaseVector psi = psi0;
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-12));
  double t = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = (k + 1 == steps) ? t_final : static_cast<double>(k + 1) * dt;
    psi = midpoint_step(h, psi, t_next - t, options, k);
    t = t_next;
    if (options.record || k + 1 == steps) record(t, psi);
  }
  return traj;
}

double norm_preservation_defect(const NonquadraticHamiltonian& h, const PhaseVector& psi) {
  return dot(apply_j(h.gradient(psi)), psi);
}

BlockOperator heisenberg_evolve(const BlockOperator& a, const QuadraticHamiltonian& h, double t) {
  require_same_dim(a.dim(), h.dim(), "heisenberg_evolve");
  if (!a.symmetric(kIdentityTol)) throw PreconditionError("heisenberg_evolve: observable is not symmetric");
  const BlockOperator u = linear_flow(h, t);
  return u.transpose() * a * u;
}

ClassicalVariable lift_variable(const QuadraticHamiltonian& h, const ClassicalVariable& f0, double t) {
  require_same_dim(h.dim(), f0.dim(), "lift_variable");
  if (t == 0.0) return f0;
  const BlockOperator u = linear_flow(h, t);
  ClassicalVariable::Callbacks cb;
  cb.value = [u, f0](const PhaseVector& psi) { return f0(u.apply(psi)); };
  if (f0.has_gradient()) {
    const BlockOperator ut = u.transpose();
    cb.gradient = [u, ut, f0](const PhaseVector& psi) { return ut.apply(f0.gradient(u.apply(psi))); };
  }
  // The flow is linear, so (f0 o U)''(0) = U^T f0''(0) U.
  cb.hessian_at_zero = [u, f0]() { return u.transpose() * f0.hessian_at_zero() * u; };
  cb.growth_attested = f0.growth_attested();
  return ClassicalVariable::black_box(f0.dim(), std::move(cb));
}

ClassicalVariable lift_variable(const NonquadraticHamiltonian& h, const ClassicalVariable& f0, double t,
                                double dt) {
  require_same_dim(h.dim(), f0.dim(), "lift_variable");
  if (t == 0.0) return f0;
  IntegratorOptions opt;
  opt.record = false;
  ClassicalVariable::Callbacks cb;
  cb.value = [h, f0, t, dt, opt](const PhaseVector& psi) {
    return f0(integrate(h, psi, t, dt, opt).final_state());
  };
  return ClassicalVariable::black_box(f0.dim(), std::move(cb)).with_numerical_gradient();
}

double flow_oddness_defect(const NonquadraticHamiltonian& h, const PhaseVector& psi, double t, double dt) {
  IntegratorOptions opt;
  opt.record = false;
  const PhaseVector plus = integrate(h, psi, t, dt, opt).final_state();
  const PhaseVector minus = integrate(h, -psi, t, dt, opt).final_state();
  return (plus + minus).norm();
}

BlockOperator FlowCache::get(const QuadraticHamiltonian& h, double t) {
  const Key key{digest(h.op().matrix()), t};
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.first == h.op().matrix()) return it->second.second;
  }
  BlockOperator u = linear_flow(h, t);
  std::unique_lock lock(mutex_);
  ++misses_;
  auto it = entries_.find(key);
  if (it == entries_.end()) entries_.emplace(key, std::make_pair(h.op().matrix(), u));
  return u;
}

std::size_t FlowCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t FlowCache::misses() const {
  std::shared_lock lock(mutex_);
  return misses_;
}

}  // namespace pcsft
