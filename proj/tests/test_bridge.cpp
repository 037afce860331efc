#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pcsft/bridge.hpp"
#include "pcsft/dynamics.hpp"
#include "pcsft/errors.hpp"
#include "pcsft/random.hpp"

namespace pcsft {
namespace {

PhaseVector random_vector(Eigen::Index n, NormalStream& rng) {
  RealVector v(2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) v[i] = rng.next_normal();
  return PhaseVector::from_stacked(v);
}

ComplexMatrix random_hermitian(Eigen::Index n, NormalStream& rng) {
  const ComplexMatrix g = random_gaussian_matrix(n, n, rng) + Complex(0, 1) * random_gaussian_matrix(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

// 1/2 [ r^2 + r^4 ] with r^2 = q^2 + p^2 on a single degree of freedom.
ClassicalVariable planar_quartic() { return ClassicalVariable::power_series(BlockOperator::identity(1), {0.5, 0.5}); }

DensityOperator unit_shape() { return DensityOperator::pure(ComplexVector::Ones(1)); }

TEST(ProjectState, PureStateMapsToProjector) {
  NormalStream rng(1, 1);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector psi = random_unit_vector(4, rng);
    const double alpha = 0.05 + rng.next_uniform();
    const ComplexMatrix d = project_state(pure_state_measure(psi, alpha), alpha).matrix();
    EXPECT_LE(max_abs(ComplexMatrix(d - psi * psi.adjoint())), 1e-10);
  }
}

TEST(ProjectState, IsotropicMapsToMaximallyMixed) {
  const ComplexMatrix d = project_state(GaussianState::isotropic(5, 0.2), 0.2).matrix();
  EXPECT_LE(max_abs(ComplexMatrix(d - ComplexMatrix::Identity(5, 5) / 5.0)), 1e-15);
}

TEST(ProjectState, ConvexCombinationsAreRespected) {
  NormalStream rng(2, 2);
  const double alpha = 0.3, w = 0.35;
  const ComplexVector a = random_unit_vector(3, rng), b = random_unit_vector(3, rng);
  const GaussianState mix(w * pure_state_measure(a, alpha).covariance() +
                          (1 - w) * pure_state_measure(b, alpha).covariance());
  const ComplexMatrix expected = w * a * a.adjoint() + (1 - w) * b * b.adjoint();
  EXPECT_LE(max_abs(ComplexMatrix(project_state(mix, alpha).matrix() - expected)), 1e-12);
}

TEST(ProjectState, ValidOutputAndRejections) {
  NormalStream rng(3, 3);
  for (int i = 0; i < 10; ++i) {
    const DensityOperator shape = random_density(3, rng);
    const double alpha = 0.01 + rng.next_uniform();
    const GaussianState rho = from_complex_covariance(ComplexOperator(alpha * shape.matrix()));
    const DensityOperator d = project_state(rho, alpha);
    EXPECT_NEAR(d.matrix().trace().real(), 1.0, 1e-10);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(d.matrix()).eigenvalues().minCoeff(), -1e-10);
  }
  RealMatrix d = RealMatrix::Zero(2, 2);
  d(0, 0) = 1;
  EXPECT_THROW(project_state(GaussianState(d), 1.0), PreconditionError);
  EXPECT_THROW(project_state(GaussianState::isotropic(2, 0.5), 0.4), PreconditionError);
}

TEST(ProjectVariable, Examples) {
  NormalStream rng(4, 4);
  const BlockOperator a = random_j_commuting_symmetric(3, rng);
  const ComplexMatrix half = real_to_complex(a).matrix() / 2.0;
  EXPECT_LE(max_abs(ComplexMatrix(project_variable(ClassicalVariable::quadratic_form(a)).matrix() - half)), 1e-14);

  const auto quartic = ClassicalVariable::polynomial({{1.0, a, 2}});
  EXPECT_EQ(max_abs(project_variable(quartic).matrix()), 0.0);

  const ComplexMatrix t = project_variable(planar_quartic()).matrix();
  EXPECT_NEAR(t(0, 0).real(), 0.5, 1e-15);
  EXPECT_EQ(t(0, 0).imag(), 0.0);

  EXPECT_THROW(project_variable(ClassicalVariable::quadratic_form(random_symmetric(2, rng))), PreconditionError);
}

TEST(ProjectVariable, BlackBoxUsesNumericalHessian) {
  NormalStream rng(5, 5);
  const BlockOperator a = random_j_commuting_symmetric(2, rng);
  ClassicalVariable::Callbacks cb;
  cb.value = [a](const PhaseVector& psi) {
    const double s = dot(a.apply(psi), psi);
    return 0.5 * s + 0.1 * s * s;
  };
  const auto f = ClassicalVariable::black_box(2, cb);
  const ComplexMatrix expected = real_to_complex(a).matrix() / 2.0;
  EXPECT_LE(max_abs(ComplexMatrix(project_variable(f).matrix() - expected)), 1e-6);
}

TEST(ProjectVariable, QuadraticSectionIsInvertible) {
  NormalStream rng(6, 6);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix a = random_hermitian(3, rng);
    const auto f = ClassicalVariable::quadratic_form(complex_to_real(ComplexOperator(a)));
    EXPECT_LE(max_abs(ComplexMatrix(project_variable(f).matrix() - a / 2.0)), 1e-10);
  }
}

TEST(ProjectVariable, DistinctVariablesShareAnImage) {
  NormalStream rng(7, 7);
  const BlockOperator h = random_j_commuting_symmetric(2, rng);
  const auto quad = ClassicalVariable::power_series(h, {0.5});
  const auto with_quartic = ClassicalVariable::power_series(h, {0.5, 0.25});
  EXPECT_LE(max_abs(ComplexMatrix(project_variable(quad).matrix() - project_variable(with_quartic).matrix())), 1e-12);
  const PhaseVector psi = random_vector(2, rng);
  EXPECT_GT(std::abs(quad(psi) - with_quartic(psi)), 1e-3);
}

TEST(Amplify, ScalingGroup) {
  NormalStream rng(8, 8);
  const auto f = planar_quartic();
  const PhaseVector psi = random_vector(1, rng);
  EXPECT_EQ(amplify(f, 1.0)(psi), f(psi));
  EXPECT_NEAR(amplify(amplify(f, 0.03), 1.0 / 0.03)(psi), f(psi), 1e-14 * std::abs(f(psi)));
  EXPECT_NEAR(amplify(f, 0.25)(psi), 4.0 * f(psi), 1e-14 * std::abs(f(psi)));
  EXPECT_THROW(amplify(f, 0.0), PreconditionError);
}

TEST(ClassicalAverage, QuadraticTraceOracle) {
  NormalStream rng(9, 9);
  const RealMatrix g = random_gaussian_matrix(4, 4, rng);
  const GaussianState rho(g * g.transpose() / 4.0);
  const BlockOperator a = random_symmetric(2, rng);
  const Estimate e = classical_average(ClassicalVariable::quadratic_form(a), rho, 3, 100000);
  EXPECT_NEAR(e.value, 0.5 * (rho.covariance() * a.matrix()).trace(), 3.0 * e.standard_error);
  EXPECT_GT(e.standard_error, 0.0);
}

TEST(ClassicalAverage, SquaredNormGivesDispersion) {
  const GaussianState rho = GaussianState::isotropic(3, 0.07);
  const Estimate e = classical_average(ClassicalVariable::quadratic_form(BlockOperator::identity(3), 1.0), rho, 5,
                                       100000);
  EXPECT_NEAR(e.value, 0.07, 3.0 * e.standard_error);
}

TEST(ClassicalAverage, OddProbeAveragesToZero) {
  ClassicalVariable::Callbacks cb;
  cb.value = [](const PhaseVector& psi) { return psi.q()[0] * psi.q()[0] * psi.q()[0]; };
  const auto odd = ClassicalVariable::black_box(2, cb);
  const Estimate e = classical_average(odd, GaussianState::isotropic(2, 1.0), 6, 100000);
  EXPECT_NEAR(e.value, 0.0, 3.0 * e.standard_error);
}

TEST(ClassicalAverage, DeterministicAcrossWorkers) {
  const auto f = planar_quartic();
  const GaussianState rho = GaussianState::isotropic(1, 0.1);
  const Estimate one = classical_average(f, rho, 9, 30000, 1);
  for (unsigned w : {2u, 5u}) {
    const Estimate many = classical_average(f, rho, 9, 30000, w);
    EXPECT_EQ(many.value, one.value);
    EXPECT_EQ(many.standard_error, one.standard_error);
  }
}

TEST(QuantumAverage, Examples) {
  NormalStream rng(10, 10);
  const ComplexVector psi = random_unit_vector(4, rng);
  const ComplexOperator a(random_hermitian(4, rng));
  EXPECT_NEAR(quantum_average(DensityOperator::pure(psi), a), psi.dot(a.apply(psi)).real(), 1e-13);
  EXPECT_NEAR(quantum_average(DensityOperator::maximally_mixed(4), a), a.trace().real() / 4.0, 1e-14);
  ComplexMatrix bad = ComplexMatrix::Zero(4, 4);
  bad(0, 1) = 1;
  EXPECT_THROW(quantum_average(DensityOperator::maximally_mixed(4), ComplexOperator(bad)), PreconditionError);
}

TEST(QuantumAverage, ExactForQuadraticVariablesAtAnyAlpha) {
  NormalStream rng(11, 11);
  const DensityOperator shape = random_density(3, rng);
  const BlockOperator a = random_j_commuting_symmetric(3, rng);
  const auto f = ClassicalVariable::quadratic_form(a);
  const double target = quantum_average(shape, project_variable(f));
  for (double alpha : {0.5, 0.01}) {
    const GaussianState rho = from_complex_covariance(ComplexOperator(alpha * shape.matrix()));
    const Estimate e = classical_average(amplify(f, alpha), rho, 12, 100000);
    EXPECT_NEAR(e.value, target, 3.0 * e.standard_error) << "alpha=" << alpha;
  }
}

TEST(VonNeumann, CommutingStateIsStationary) {
  NormalStream rng(12, 12);
  const ComplexOperator m(random_hermitian(3, rng));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix());
  RealVector weights(3);
  weights << 0.5, 0.3, 0.2;
  const ComplexMatrix d = es.eigenvectors() * weights.asDiagonal() * es.eigenvectors().adjoint();
  const DensityOperator rho{ComplexOperator(d)};
  EXPECT_LE(max_abs(ComplexMatrix(von_neumann_evolve(rho, m, 2.5).matrix() - d)), 1e-12);
}

TEST(VonNeumann, DerivativeAtZeroIsCommutator) {
  NormalStream rng(13, 13);
  const DensityOperator d = random_density(3, rng);
  const ComplexOperator m(random_hermitian(3, rng));
  const double h = 1e-4;
  const ComplexMatrix fd =
      (von_neumann_evolve(d, m, h).matrix() - von_neumann_evolve(d, m, -h).matrix()) / (2.0 * h);
  const ComplexMatrix expected = Complex(0, 1) * (d.matrix() * m.matrix() - m.matrix() * d.matrix());
  EXPECT_LE(max_abs(ComplexMatrix(fd - expected)), 1e-6);
}

TEST(VonNeumann, CommutingSquareCloses) {
  NormalStream rng(14, 14);
  const double alpha = 0.2, t = 1.3;
  const DensityOperator shape = random_density(3, rng);
  const GaussianState rho = from_complex_covariance(ComplexOperator(alpha * shape.matrix()));
  const BlockOperator h = random_j_commuting_symmetric(3, rng);
  const DensityOperator pushed = project_state(pushforward(rho, linear_flow(QuadraticHamiltonian(h), t)), alpha);
  const DensityOperator evolved = von_neumann_evolve(project_state(rho, alpha), real_to_complex(h), t);
  EXPECT_LE(max_abs(ComplexMatrix(pushed.matrix() - evolved.matrix())), 1e-9);
  EXPECT_NEAR(evolved.matrix().trace().real(), 1.0, 1e-12);
}

TEST(CheckLinearity, Examples) {
  NormalStream rng(15, 15);
  const BlockOperator a = random_j_commuting_symmetric(3, rng), b = random_j_commuting_symmetric(3, rng);
  const ComplexMatrix ta = real_to_complex(a).matrix(), tb = real_to_complex(b).matrix();
  ASSERT_GT(max_abs(ComplexMatrix(ta * tb - tb * ta)), 1e-3);  // incompatible observables
  const std::vector<ClassicalVariable> pair{ClassicalVariable::quadratic_form(a),
                                            ClassicalVariable::quadratic_form(b)};
  EXPECT_LE(check_linearity(pair, {0.7, -1.3}), 1e-10);
  EXPECT_EQ(check_linearity(pair, {1.0, 0.0}), 0.0);

  for (int i = 0; i < 5; ++i) {
    const std::vector<ClassicalVariable> three{
        ClassicalVariable::power_series(random_j_commuting_symmetric(2, rng), {0.5, 0.2}),
        ClassicalVariable::quadratic_form(random_j_commuting_symmetric(2, rng)),
        ClassicalVariable::power_series(random_j_commuting_symmetric(2, rng), {1.0, 0.0, 0.3})};
    EXPECT_LE(check_linearity(three, {rng.next_normal(), rng.next_normal(), rng.next_normal()}), 1e-10);
  }
  EXPECT_THROW(check_linearity(pair, {1.0}), PreconditionError);
}

TEST(Screening, PolynomialVariablesAreInClass) {
  NormalStream rng(16, 16);
  const auto f = ClassicalVariable::power_series(random_j_commuting_symmetric(2, rng), {0.5, 0.5});
  const ScreeningReport r = screen_variable(f, 3);
  EXPECT_TRUE(r.in_symplectic_class());
  EXPECT_LE(r.j_invariance_defect, 1e-12);
  EXPECT_LE(r.evenness_defect, 1e-12);

  ClassicalVariable::Callbacks cb;
  cb.value = [](const PhaseVector& psi) { return psi.q()[0] * psi.q()[0] * psi.p()[0]; };
  const ScreeningReport odd = screen_variable(ClassicalVariable::black_box(1, cb), 3);
  EXPECT_TRUE(odd.vacuum);
  EXPECT_FALSE(odd.even);
  EXPECT_FALSE(odd.in_symplectic_class());
}

TEST(AlphaScan, PlanarQuarticMatchesPolarOracle) {
  const std::vector<double> alphas{0.1, 0.03, 0.01};
  const CorrespondenceReport r = alpha_scan(planar_quartic(), unit_shape(), alphas, 42, 50000);
  ASSERT_EQ(r.points.size(), alphas.size());
  EXPECT_NEAR(r.quantum, 0.5, 1e-15);
  for (const auto& p : r.points) {
    EXPECT_NEAR(p.classical.value, 0.5 + p.alpha, 3.0 * p.classical.standard_error) << "alpha=" << p.alpha;
    EXPECT_NEAR(p.remainder.value, p.alpha, 3.0 * p.remainder.standard_error) << "alpha=" << p.alpha;
  }
  EXPECT_TRUE(r.power_fit.conclusive);
  EXPECT_NEAR(r.power_fit.slope, 1.0, 0.15);
  EXPECT_NEAR(r.extrapolation.intercept, 0.5, 3.0 * r.extrapolation.intercept_se + 1e-3);
}

TEST(AlphaScan, QuadraticVariableHasNoRemainder) {
  NormalStream rng(17, 17);
  const DensityOperator shape = random_density(2, rng);
  const auto f = ClassicalVariable::quadratic_form(random_j_commuting_symmetric(2, rng));
  const CorrespondenceReport r = alpha_scan(f, shape, {0.1, 0.01, 0.001}, 7, 20000);
  for (const auto& p : r.points) {
    EXPECT_NEAR(p.classical.value, r.quantum, 3.0 * p.classical.standard_error);
    EXPECT_NEAR(p.remainder.value, 0.0, 1e-12);
  }
  EXPECT_FALSE(r.power_fit.conclusive);
  EXPECT_FALSE(r.note.empty());
}

TEST(AlphaScan, IdenticalForAnyWorkerCount) {
  const std::vector<double> alphas{0.1, 0.01};
  const auto one = alpha_scan(planar_quartic(), unit_shape(), alphas, 3, 20000, 1).to_json().dump();
  EXPECT_EQ(alpha_scan(planar_quartic(), unit_shape(), alphas, 3, 20000, 4).to_json().dump(), one);
  EXPECT_NE(alpha_scan(planar_quartic(), unit_shape(), alphas, 4, 20000, 1).to_json().dump(), one);
}

TEST(AlphaScan, RejectsBadAlphaLists) {
  EXPECT_THROW(alpha_scan(planar_quartic(), unit_shape(), {}, 1, 100), PreconditionError);
  EXPECT_THROW(alpha_scan(planar_quartic(), unit_shape(), {0.01, 0.1}, 1, 100), PreconditionError);
  EXPECT_THROW(alpha_scan(planar_quartic(), unit_shape(), {0.1, -0.1}, 1, 100), PreconditionError);
}

TEST(AlphaScan, CsvHasOneRowPerAlpha) {
  const auto r = alpha_scan(planar_quartic(), unit_shape(), {0.1, 0.05, 0.02}, 1, 1000);
  std::ostringstream os;
  r.write_csv(os);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.rfind("schema_version,", 0), 0u);
}

TEST(Fits, RecoverKnownModels) {
  const std::vector<double> alphas{0.1, 0.03, 0.01, 0.003};
  std::vector<Estimate> power, line, two;
  for (double a : alphas) {
    power.push_back({2.5 * std::pow(a, 1.5), 1e-6 * a});
    line.push_back({0.5 + 3.0 * a, 1e-3});
    two.push_back({0.4 * a + 7.0 * a * a, 1e-6});
  }
  const PowerFit p = fit_power_law(alphas, power);
  EXPECT_NEAR(p.slope, 1.5, 1e-10);
  EXPECT_NEAR(std::exp(p.log_prefactor), 2.5, 1e-9);
  EXPECT_TRUE(p.conclusive);
  const LinearFit l = fit_linear(alphas, line);
  EXPECT_NEAR(l.intercept, 0.5, 1e-12);
  EXPECT_NEAR(l.slope, 3.0, 1e-10);
  const TwoTermFit t = fit_two_term(alphas, two);
  EXPECT_NEAR(t.c1, 0.4, 1e-9);
  EXPECT_NEAR(t.c2, 7.0, 1e-7);
  EXPECT_EQ(t.dof, 2);

  power[1].value = 0.0;
  EXPECT_FALSE(fit_power_law(alphas, power).conclusive);
}

TEST(Fits, SexticRemainderFollowsTwoTermModel) {
  // f = 1/2 r^2 + 1/4 r^4 + 1/6 r^6 on the planar state: the amplified
  // remainder is exactly alpha/2 + alpha^2 since E r^{2k} = k! alpha^k.
  const auto f = ClassicalVariable::power_series(BlockOperator::identity(1), {0.5, 0.25, 1.0 / 6.0});
  const std::vector<double> alphas{0.2, 0.1, 0.05, 0.02};
  const auto r = alpha_scan(f, unit_shape(), alphas, 11, 50000);
  std::vector<Estimate> rem;
  for (const auto& p : r.points) rem.push_back(p.remainder);
  const TwoTermFit fit = fit_two_term(alphas, rem);
  EXPECT_LE(fit.chi2, 13.8);  // 0.1% tail of chi-squared with two degrees of freedom
  EXPECT_NEAR(fit.c1, 0.5, 0.05);
  EXPECT_NEAR(fit.c2, 1.0, 0.5);
}

}  // namespace
}  // namespace pcsft
