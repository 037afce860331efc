#include "pcsft/bridge.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "pcsft/dynamics.hpp"
#include "pcsft/errors.hpp"
#include "pcsft/kernels.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

struct PairedMoments {
  Moments plain;
  Moments residual;
};

// Solves the weighted normal equations for y ~ X c; returns coefficients and
// their covariance.
void weighted_least_squares(const RealMatrix& x, const RealVector& y, const RealVector& sigma, RealVector& coef,
                            RealMatrix& cov) {
  const RealVector w = sigma.array().square().inverse();
  const RealMatrix xtw = x.transpose() * w.asDiagonal();
  const RealMatrix normal = xtw * x;
  cov = normal.inverse();
  coef = cov * (xtw * y);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DensityOperator project_state(const GaussianState& rho, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("project_state: alpha must be > 0");
  const Check jc = is_j_invariant(rho);
  if (!jc) throw PreconditionError("project_state: state is not J-invariant");
  if (std::abs(dispersion(rho) / alpha - 1.0) > 1e-9) {
    throw PreconditionError("project_state: dispersion " + std::to_string(dispersion(rho)) +
                            " does not match alpha " + std::to_string(alpha));
  }
  return DensityOperator(ComplexOperator(complex_covariance(rho).matrix() / alpha), 1e-9);
}

ComplexOperator project_variable(const ClassicalVariable& f, double tol) {
  const BlockOperator h = f.hessian_at_zero();
  const Check jc = is_j_commuting(h, tol);
  if (!jc) {
    throw PreconditionError("project_variable: f''(0) is not J-commuting (defect " + std::to_string(jc.defect) +
                            "); variable is outside the symplectic class");
  }
  return ComplexOperator(real_to_complex(h, tol).matrix() * 0.5);
}

Estimate classical_average(const ClassicalVariable& f, const GaussianState& rho, std::uint64_t seed,
                           std::int64_t count, unsigned workers) {
  require_same_dim(f.dim(), rho.dim(), "classical_average");
  if (count < 2) throw PreconditionError("classical_average: count must be >= 2");
  const auto total = static_cast<std::size_t>(count);
  std::vector<Moments> parts(chunk_count(total));
  for_each_chunk(total, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> z(static_cast<std::size_t>(rho.rank()));
    std::vector<double> psi(static_cast<std::size_t>(2 * rho.dim()));
    Moments m;
    for (std::size_t i = begin; i < end; ++i) {
      sample_one(rho, seed, i, z, psi);
      m.add(f.evaluate(psi));
    }
    parts[c] = m;
  });
  const Moments all = pairwise_merge(parts);
  return {all.mean, all.standard_error()};
}

double quantum_average(const DensityOperator& d, const ComplexOperator& a) {
  require_same_dim(d.dim(), a.dim(), "quantum_average");
  if (!a.hermitian(kIdentityTol)) throw PreconditionError("quantum_average: observable is not hermitian");
  return (d.matrix() * a.matrix()).trace().real();
}

DensityOperator von_neumann_evolve(const DensityOperator& d, const ComplexOperator& m, double t) {
  require_same_dim(d.dim(), m.dim(), "von_neumann_evolve");
  const ComplexOperator u = schrodinger_flow(m, t);
  return DensityOperator(u * d.op() * u.adjoint(), 1e-10);
}

double check_linearity(const std::vector<ClassicalVariable>& fs, const std::vector<double>& lambdas) {
  if (fs.empty() || fs.size() != lambdas.size()) {
    throw PreconditionError("check_linearity: need matching non-empty lists");
  }
  const Eigen::Index n = fs.front().dim();
  // The combination is built as a variable in its own right and its Hessian
  // taken through the ordinary path: analytic when every f_j is a polynomial,
  // central differences of the combined gradient (or values) otherwise.
  bool all_polynomial = true;
  bool all_gradient = true;
  for (const auto& f : fs) {
    require_same_dim(n, f.dim(), "check_linearity");
    all_polynomial = all_polynomial && f.is_polynomial();
    all_gradient = all_gradient && f.has_gradient();
  }
  std::optional<ClassicalVariable> combo;
  if (all_polynomial) {
    std::vector<ClassicalVariable::Term> terms;
    for (std::size_t j = 0; j < fs.size(); ++j) {
      for (const auto& t : fs[j].terms()) {
        terms.push_back({lambdas[j] * fs[j].scale() * t.coefficient, t.op, t.power});
      }
    }
    combo = ClassicalVariable::polynomial(std::move(terms));
  } else {
    std::vector<ClassicalVariable> copies = fs;
    std::vector<double> ls = lambdas;
    ClassicalVariable::Callbacks cb;
    cb.value = [copies, ls](const PhaseVector& psi) {
      double s = 0.0;
      for (std::size_t j = 0; j < copies.size(); ++j) s += ls[j] * copies[j](psi);
      return s;
    };
    if (all_gradient) {
      cb.gradient = [copies, ls, n](const PhaseVector& psi) {
        RealVector g = RealVector::Zero(2 * n);
        for (std::size_t j = 0; j < copies.size(); ++j) g += ls[j] * copies[j].gradient(psi).stacked();
        return PhaseVector::from_stacked(std::move(g));
      };
    }
    combo = ClassicalVariable::black_box(n, std::move(cb));
  }
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < fs.size(); ++j) sum += lambdas[j] * project_variable(fs[j]).matrix();
  return max_abs(ComplexMatrix(project_variable(*combo).matrix() - sum));
}

CorrespondenceReport alpha_scan(const ClassicalVariable& f, const DensityOperator& shape,
                                const std::vector<double>& alphas, std::uint64_t seed, std::int64_t count,
                                unsigned workers) {
  require_same_dim(f.dim(), shape.dim(), "alpha_scan");
  if (alphas.empty()) throw PreconditionError("alpha_scan: empty alpha list");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || (i > 0 && !(alphas[i] < alphas[i - 1]))) {
      throw PreconditionError("alpha_scan: alphas must be positive and strictly decreasing");
    }
  }
  if (count < 2) throw PreconditionError("alpha_scan: count must be >= 2");

  CorrespondenceReport report;
  const BlockOperator hessian = f.hessian_at_zero();
  report.quantum = quantum_average(shape, project_variable(f));
  const RowMajorMatrix taylor = 0.5 * hessian.matrix();

  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double alpha = alphas[k];
    const GaussianState rho = from_complex_covariance(ComplexOperator(alpha * shape.matrix()));
    const ClassicalVariable fa = amplify(f, alpha);
    ScanPoint pt;
    pt.alpha = alpha;
    pt.seed = mix64(seed ^ (0x5851f42d4c957f2dULL * (k + 1)));

    const auto total = static_cast<std::size_t>(count);
    std::vector<PairedMoments> parts(chunk_count(total));
    for_each_chunk(total, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      std::vector<double> z(static_cast<std::size_t>(rho.rank()));
      std::vector<double> psi(static_cast<std::size_t>(2 * rho.dim()));
      PairedMoments m;
      for (std::size_t i = begin; i < end; ++i) {
        sample_one(rho, pt.seed, i, z, psi);
        const double v = fa.evaluate(psi);
        const double quad =
            kernels::quadratic_form({taylor.data(), static_cast<std::size_t>(taylor.size())}, psi.size(), psi) /
            alpha;
        m.plain.add(v);
        m.residual.add(v - quad);
      }
      parts[c] = m;
    });
    std::vector<Moments> plain, residual;
    for (const auto& p : parts) {
      plain.push_back(p.plain);
      residual.push_back(p.residual);
    }
    const Moments mp = pairwise_merge(plain);
    const Moments mr = pairwise_merge(residual);
    // E[1/2 (f''(0) psi, psi)] = 1/2 Tr_R(B f''(0)), real-side trace.
    const double taylor_mean = 0.5 * (rho.covariance() * hessian.matrix()).trace() / alpha;
    pt.classical = {mp.mean, mp.standard_error()};
    pt.remainder = {mr.mean + (taylor_mean - report.quantum), mr.standard_error()};
    report.points.push_back(pt);
  }

  std::vector<Estimate> remainders, classical;
  for (const auto& p : report.points) {
    remainders.push_back(p.remainder);
    classical.push_back(p.classical);
  }
  report.power_fit = fit_power_law(alphas, remainders);
  if (alphas.size() >= 2) report.extrapolation = fit_linear(alphas, classical);
  // A remainder at round-off level (quadratic f: the control variate is the
  // whole variable) has no power law to fit, whatever its standard error.
  const double floor = 1e-12 * std::max(1.0, std::abs(report.quantum));
  for (const auto& r : remainders) {
    if (std::abs(r.value) <= floor) report.power_fit.conclusive = false;
  }
  if (!report.power_fit.conclusive) {
    report.note = "remainder within Monte Carlo noise at some alpha; power-law fit inconclusive";
  }
  return report;
}

PowerFit fit_power_law(const std::vector<double>& alphas, const std::vector<Estimate>& values) {
  PowerFit fit;
  const auto m = static_cast<Eigen::Index>(alphas.size());
  if (m < 2 || values.size() != alphas.size()) return fit;
  RealMatrix x(m, 2);
  RealVector y(m), sigma(m);
  fit.conclusive = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = std::abs(values[static_cast<std::size_t>(i)].value);
    const double se = values[static_cast<std::size_t>(i)].standard_error;
    if (!(r > 3.0 * se) || r == 0.0) fit.conclusive = false;
    x(i, 0) = 1.0;
    x(i, 1) = std::log(alphas[static_cast<std::size_t>(i)]);
    y[i] = std::log(std::max(r, 1e-300));
    sigma[i] = std::max(se / std::max(r, 1e-300), 1e-12);
  }
  RealVector coef;
  RealMatrix cov;
  weighted_least_squares(x, y, sigma, coef, cov);
  fit.log_prefactor = coef[0];
  fit.slope = coef[1];
  fit.slope_se = std::sqrt(cov(1, 1));
  return fit;
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<Estimate>& ys) {
  LinearFit fit;
  const auto m = static_cast<Eigen::Index>(xs.size());
  if (m < 2 || ys.size() != xs.size()) throw PreconditionError("fit_linear: need at least two matching points");
  RealMatrix x(m, 2);
  RealVector y(m), sigma(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = xs[static_cast<std::size_t>(i)];
    y[i] = ys[static_cast<std::size_t>(i)].value;
    sigma[i] = std::max(ys[static_cast<std::size_t>(i)].standard_error, 1e-300);
  }
  RealVector coef;
  RealMatrix cov;
  weighted_least_squares(x, y, sigma, coef, cov);
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.intercept_se = std::sqrt(cov(0, 0));
  fit.slope_se = std::sqrt(cov(1, 1));
  return fit;
}

TwoTermFit fit_two_term(const std::vector<double>& alphas, const std::vector<Estimate>& values) {
  TwoTermFit fit;
  const auto m = static_cast<Eigen::Index>(alphas.size());
  if (m < 2 || values.size() != alphas.size()) throw PreconditionError("fit_two_term: need at least two points");
  RealMatrix x(m, 2);
  RealVector y(m), sigma(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = alphas[static_cast<std::size_t>(i)];
    x(i, 0) = a;
    x(i, 1) = a * a;
    y[i] = values[static_cast<std::size_t>(i)].value;
    sigma[i] = std::max(values[static_cast<std::size_t>(i)].standard_error, 1e-300);
  }
  RealVector coef;
  RealMatrix cov;
  weighted_least_squares(x, y, sigma, coef, cov);
  fit.c1 = coef[0];
  fit.c2 = coef[1];
  fit.chi2 = ((y - x * coef).array() / sigma.array()).square().sum();
  fit.dof = static_cast<int>(m) - 2;
  return fit;
}

nlohmann::json CorrespondenceReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"alpha", p.alpha},
                   {"seed", p.seed},
                   {"classical_average", p.classical.value},
                   {"classical_standard_error", p.classical.standard_error},
                   {"remainder", p.remainder.value},
                   {"remainder_standard_error", p.remainder.standard_error}});
  }
  return {{"schema_version", 1},
          {"variable", variable},
          {"quantum_average", quantum},
          {"points", pts},
          {"power_fit",
           {{"slope", power_fit.slope},
            {"slope_standard_error", power_fit.slope_se},
            {"log_prefactor", power_fit.log_prefactor},
            {"conclusive", power_fit.conclusive}}},
          {"extrapolation",
           {{"intercept", extrapolation.intercept},
            {"intercept_standard_error", extrapolation.intercept_se},
            {"slope", extrapolation.slope},
            {"slope_standard_error", extrapolation.slope_se}}},
          {"conventions", conventions},
          {"note", note}};
}

void CorrespondenceReport::write_csv(std::ostream& os) const {
  os << "schema_version,variable,alpha,seed,classical_average,classical_standard_error,quantum_average,"
        "remainder,remainder_standard_error\n";
  for (const auto& p : points) {
    os << 1 << ',' << variable << ',' << fmt(p.alpha) << ',' << p.seed << ',' << fmt(p.classical.value) << ','
       << fmt(p.classical.standard_error) << ',' << fmt(quantum) << ',' << fmt(p.remainder.value) << ','
       << fmt(p.remainder.standard_error) << '\n';
  }
}

}  // namespace pcsft
