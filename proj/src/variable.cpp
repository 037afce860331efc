#include "pcsft/variable.hpp"

#include <cmath>
#include <string>

#include "pcsft/errors.hpp"
#include "pcsft/kernels.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {

struct ClassicalVariable::Impl {
  Eigen::Index n = 0;
  bool polynomial = false;
  std::vector<Term> terms;
  // Distinct operators in row-major layout; term_form[i] indexes into it.
  std::vector<RowMajorMatrix> forms;
  std::vector<std::size_t> term_form;
  Callbacks callbacks;
};

namespace {

double power(double s, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= s;
  return r;
}

}  // namespace

ClassicalVariable ClassicalVariable::polynomial(std::vector<Term> terms, double tol) {
  if (terms.empty()) throw PreconditionError("ClassicalVariable::polynomial: no terms");
  auto impl = std::make_shared<Impl>();
  impl->n = terms.front().op.dim();
  impl->polynomial = true;
  for (const Term& t : terms) {
    require_same_dim(impl->n, t.op.dim(), "ClassicalVariable::polynomial");
    if (t.power < 1) throw PreconditionError("ClassicalVariable::polynomial: power must be >= 1");
    if (!t.op.symmetric(tol)) throw PreconditionError("ClassicalVariable::polynomial: operator not symmetric");
    if (!is_j_commuting(t.op, tol)) {
      throw PreconditionError("ClassicalVariable::polynomial: operator not J-commuting");
    }
    std::size_t found = impl->forms.size();
    for (std::size_t i = 0; i < impl->forms.size(); ++i) {
      if (impl->forms[i] == RowMajorMatrix(t.op.matrix())) {
        found = i;
        break;
      }
    }
    if (found == impl->forms.size()) impl->forms.emplace_back(t.op.matrix());
    impl->term_form.push_back(found);
  }
  impl->terms = std::move(terms);
  return ClassicalVariable(std::move(impl), 1.0);
}

ClassicalVariable ClassicalVariable::power_series(const BlockOperator& h, const std::vector<double>& coefficients) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k] != 0.0) terms.push_back({coefficients[k], h, static_cast<int>(k + 1)});
  }
  if (terms.empty()) terms.push_back({0.0, h, 1});
  return polynomial(std::move(terms));
}

ClassicalVariable ClassicalVariable::quadratic_form(const BlockOperator& a, double coefficient) {
  if (!a.symmetric(kIdentityTol)) throw PreconditionError("quadratic_form: operator not symmetric");
  if (is_j_commuting(a)) return polynomial({{coefficient, a, 1}});
  const RowMajorMatrix rm = a.matrix();
  Callbacks cb;
  cb.value = [rm, coefficient](const PhaseVector& psi) {
    const RealVector& x = psi.stacked();
    return coefficient * kernels::quadratic_form({rm.data(), static_cast<std::size_t>(rm.size())},
                                                 static_cast<std::size_t>(x.size()), {x.data(), static_cast<std::size_t>(x.size())});
  };
  cb.gradient = [a, coefficient](const PhaseVector& psi) { return (2.0 * coefficient) * a.apply(psi); };
  cb.hessian_at_zero = [a, coefficient]() { return (2.0 * coefficient) * a; };
  cb.growth_attested = true;
  return black_box(a.dim(), std::move(cb));
}

ClassicalVariable ClassicalVariable::black_box(Eigen::Index n, Callbacks callbacks) {
  if (!callbacks.value) throw PreconditionError("ClassicalVariable::black_box: value callback required");
  const double at_zero = callbacks.value(PhaseVector(n));
  if (std::abs(at_zero) > 1e-12) {
    throw PreconditionError("ClassicalVariable::black_box: f(0) = " + std::to_string(at_zero) + " != 0");
  }
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->callbacks = std::move(callbacks);
  return ClassicalVariable(std::move(impl), 1.0);
}

Eigen::Index ClassicalVariable::dim() const { return impl_->n; }

double ClassicalVariable::evaluate(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != 2 * impl_->n) {
    throw DimensionError("ClassicalVariable: dimension mismatch");
  }
  if (!impl_->polynomial) {
    const RealVector v = Eigen::Map<const RealVector>(x.data(), static_cast<Eigen::Index>(x.size()));
    return scale_ * impl_->callbacks.value(PhaseVector::from_stacked(v));
  }
  // Quadratic forms are evaluated once per distinct operator.
  double forms_buf[8];
  std::vector<double> forms_vec;
  double* forms = forms_buf;
  if (impl_->forms.size() > 8) {
    forms_vec.resize(impl_->forms.size());
    forms = forms_vec.data();
  }
  for (std::size_t i = 0; i < impl_->forms.size(); ++i) {
    const RowMajorMatrix& m = impl_->forms[i];
    forms[i] = kernels::quadratic_form({m.data(), static_cast<std::size_t>(m.size())}, x.size(), x);
  }
  double total = 0.0;
  for (std::size_t t = 0; t < impl_->terms.size(); ++t) {
    total += impl_->terms[t].coefficient * power(forms[impl_->term_form[t]], impl_->terms[t].power);
  }
  return scale_ * total;
}

double ClassicalVariable::operator()(const PhaseVector& psi) const {
  const RealVector& x = psi.stacked();
  return evaluate({x.data(), static_cast<std::size_t>(x.size())});
}

bool ClassicalVariable::has_gradient() const {
  return impl_->polynomial || static_cast<bool>(impl_->callbacks.gradient);
}

PhaseVector ClassicalVariable::gradient(const PhaseVector& psi) const {
  require_same_dim(impl_->n, psi.dim(), "ClassicalVariable::gradient");
  if (!impl_->polynomial) {
    if (!impl_->callbacks.gradient) throw PreconditionError("ClassicalVariable: gradient unavailable");
    return scale_ * impl_->callbacks.gradient(psi);
  }
  // d/dpsi a (H psi, psi)^k = 2 a k (H psi, psi)^{k-1} H psi
  RealVector g = RealVector::Zero(2 * impl_->n);
  for (const Term& t : impl_->terms) {
    const RealVector hpsi = t.op.matrix() * psi.stacked();
    const double s = hpsi.dot(psi.stacked());
    g += (2.0 * t.coefficient * t.power * power(s, t.power - 1)) * hpsi;
  }
  return PhaseVector::from_stacked(scale_ * g);
}

BlockOperator ClassicalVariable::hessian_at_zero() const {
  const Eigen::Index n = impl_->n;
  if (impl_->polynomial) {
    // Only the k = 1 terms survive at the origin.
    BlockOperator h = BlockOperator::zero(n);
    for (const Term& t : impl_->terms) {
      if (t.power == 1) h = h + (2.0 * t.coefficient) * t.op;
    }
    return scale_ * h;
  }
  const Callbacks& cb = impl_->callbacks;
  if (cb.hessian_at_zero) return scale_ * cb.hessian_at_zero();
  if (cb.gradient) return scale_ * numerical_hessian(cb.gradient, PhaseVector(n));
  return scale_ * numerical_hessian_from_values(cb.value, PhaseVector(n));
}

bool ClassicalVariable::is_polynomial() const { return impl_->polynomial; }

const std::vector<ClassicalVariable::Term>& ClassicalVariable::terms() const { return impl_->terms; }

bool ClassicalVariable::growth_attested() const {
  return impl_->polynomial || impl_->callbacks.growth_attested;
}

ClassicalVariable ClassicalVariable::scaled(double factor) const {
  return ClassicalVariable(impl_, scale_ * factor);
}

ClassicalVariable ClassicalVariable::with_numerical_gradient() const {
  if (has_gradient()) return *this;
  auto impl = std::make_shared<Impl>(*impl_);
  auto value = impl->callbacks.value;
  impl->callbacks.gradient = [value](const PhaseVector& psi) { return numerical_gradient(value, psi); };
  return ClassicalVariable(std::move(impl), scale_);
}

ClassicalVariable amplify(const ClassicalVariable& f, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("amplify: alpha must be > 0");
  return f.scaled(1.0 / alpha);
}

double poisson_bracket(const ClassicalVariable& f1, const ClassicalVariable& f2, const PhaseVector& psi) {
  const PhaseVector g1 = f1.gradient(psi);
  const PhaseVector g2 = f2.gradient(psi);
  return g1.q().dot(g2.p()) - g2.q().dot(g1.p());
}

PhaseVector numerical_gradient(const std::function<double(const PhaseVector&)>& f, const PhaseVector& psi,
                               double h) {
  const double step = h * (1.0 + psi.norm());
  RealVector g(2 * psi.dim());
  RealVector x = psi.stacked();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + step;
    const double fp = f(PhaseVector::from_stacked(x));
    x[i] = xi - step;
    const double fm = f(PhaseVector::from_stacked(x));
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return PhaseVector::from_stacked(std::move(g));
}

BlockOperator numerical_hessian(const std::function<PhaseVector(const PhaseVector&)>& gradient,
                                const PhaseVector& psi, double h) {
  const double step = h * (1.0 + psi.norm());
  const Eigen::Index d = 2 * psi.dim();
  RealMatrix m(d, d);
  RealVector x = psi.stacked();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double xj = x[j];
    x[j] = xj + step;
    const RealVector gp = gradient(PhaseVector::from_stacked(x)).stacked();
    x[j] = xj - step;
    const RealVector gm = gradient(PhaseVector::from_stacked(x)).stacked();
    x[j] = xj;
    m.col(j) = (gp - gm) / (2.0 * step);
  }
  return BlockOperator(0.5 * (m + m.transpose()));
}

BlockOperator numerical_hessian_from_values(const std::function<double(const PhaseVector&)>& f,
                                            const PhaseVector& psi, double h) {
  const double step = h * (1.0 + psi.norm());
  const Eigen::Index d = 2 * psi.dim();
  RealMatrix m(d, d);
  RealVector x = psi.stacked();
  auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    RealVector y = x;
    y[i] += di;
    y[j] += dj;
    return f(PhaseVector::from_stacked(std::move(y)));
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const double v = (at(i, step, j, step) - at(i, step, j, -step) - at(i, -step, j, step) +
                        at(i, -step, j, -step)) /
                       (4.0 * step * step);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return BlockOperator(std::move(m));
}

ScreeningReport screen_variable(const ClassicalVariable& f, std::uint64_t seed, int probes, double tol) {
  ScreeningReport r;
  const Eigen::Index n = f.dim();
  r.vacuum_value = std::abs(f(PhaseVector(n)));
  for (int k = 0; k < probes; ++k) {
    NormalStream rng(seed, static_cast<std::uint64_t>(k));
    RealVector x(2 * n);
    rng.fill_normal({x.data(), static_cast<std::size_t>(x.size())});
    const PhaseVector psi = PhaseVector::from_stacked(std::move(x));
    const double v = f(psi);
    const double s = std::max(1.0, std::abs(v));
    r.j_invariance_defect = std::max(r.j_invariance_defect, std::abs(f(apply_j(psi)) - v) / s);
    r.evenness_defect = std::max(r.evenness_defect, std::abs(f(-psi) - v) / s);
  }
  r.vacuum = r.vacuum_value <= tol;
  r.j_invariant = r.j_invariance_defect <= tol;
  r.even = r.evenness_defect <= tol;
  return r;
}

}  // namespace pcsft
