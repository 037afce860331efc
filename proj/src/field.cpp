#include "pcsft/field.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>
#include <unsupported/Eigen/FFT>

#include "pcsft/errors.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

const char* boundary_name(Boundary b) { return b == Boundary::kPeriodic ? "periodic" : "dirichlet"; }

// Spectral decompositions of grid kernels. Readers share the lock; a miss
// computes outside the lock and inserts under the exclusive lock.
struct Spectrum {
  RealMatrix matrix;
  RealVector eigenvalues;
  RealMatrix eigenvectors;
};

class SpectrumCache {
 public:
  std::shared_ptr<const Spectrum> get(const RealMatrix& r) {
    const std::uint64_t key = fnv1a(r.data(), static_cast<std::size_t>(r.size()) * sizeof(double));
    {
      std::shared_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end() && it->second->matrix == r) return it->second;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(r);
    if (es.info() != Eigen::Success) throw NumericalError("kernel eigendecomposition failed");
    auto entry = std::make_shared<const Spectrum>(Spectrum{r, es.eigenvalues(), es.eigenvectors()});
    std::unique_lock lock(mutex_);
    entries_[key] = entry;
    return entry;
  }

 private:
  std::shared_mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const Spectrum>> entries_;
};

SpectrumCache& spectrum_cache() {
  static SpectrumCache cache;
  return cache;
}

RealMatrix laplacian_kernel(const FieldGrid& grid, double m) {
  const Eigen::Index n = grid.points;
  const double c = 1.0 / (2.0 * m * grid.dx * grid.dx);
  RealMatrix k = RealMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 2.0 * c;
    if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -c;
  }
  if (grid.boundary == Boundary::kPeriodic) k(0, n - 1) = k(n - 1, 0) = -c;
  return k;
}

void require_grid_dim(const FieldGrid& grid, Eigen::Index n, const char* what) {
  if (n != grid.points) throw DimensionError(std::string(what) + ": size does not match the grid");
}

// Unitary DFT matrix F with F_{mj} = exp(-2 pi i m j / N) / sqrt(N).
ComplexMatrix dft_matrix(Eigen::Index n) {
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((m * j) % n) / static_cast<double>(n);
      f(m, j) = std::polar(scale, phase);
    }
  }
  return f;
}

}  // namespace

FieldGrid::FieldGrid(Eigen::Index points_, double dx_, double x0_, Boundary boundary_)
    : points(points_), dx(dx_), x0(x0_), boundary(boundary_) {
  if (points < 4) throw PreconditionError("FieldGrid: at least 4 points are required");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw PreconditionError("FieldGrid: dx must be > 0");
}

FieldGrid FieldGrid::centered(Eigen::Index points, double length, Boundary boundary) {
  if (points < 4) throw PreconditionError("FieldGrid: at least 4 points are required");
  if (!(length > 0.0)) throw PreconditionError("FieldGrid: length must be > 0");
  const double dx = boundary == Boundary::kPeriodic ? length / static_cast<double>(points)
                                                    : length / static_cast<double>(points + 1);
  return FieldGrid(points, dx, -0.5 * static_cast<double>(points - 1) * dx, boundary);
}

RealVector FieldGrid::coordinates() const {
  RealVector x(points);
  for (Eigen::Index j = 0; j < points; ++j) x[j] = this->x(j);
  return x;
}

RealVector FieldGrid::wavenumbers() const {
  RealVector k(points);
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(points) * dx);
  for (Eigen::Index m = 0; m < points; ++m) {
    Eigen::Index signed_m = m < (points + 1) / 2 ? m : m - points;
    if (points % 2 == 0 && m == points / 2) signed_m = 0;  // unpaired Nyquist bin
    k[m] = base * static_cast<double>(signed_m);
  }
  return k;
}

FieldState::FieldState(FieldGrid grid, ComplexVector values) : grid_(grid), values_(std::move(values)) {
  require_grid_dim(grid_, values_.size(), "FieldState");
}

FieldState FieldState::from_phase_vector(const FieldGrid& grid, const PhaseVector& v) {
  require_grid_dim(grid, v.dim(), "FieldState::from_phase_vector");
  return FieldState(grid, v.to_complex() / std::sqrt(grid.dx));
}

PhaseVector FieldState::to_phase_vector() const {
  return PhaseVector::from_complex(values_ * std::sqrt(grid_.dx));
}

double FieldState::squared_norm() const { return values_.squaredNorm() * grid_.dx; }

double FieldState::norm() const { return std::sqrt(squared_norm()); }

void FieldState::write_csv(std::ostream& os) const {
  os << "x,re,im,abs2\n";
  char buf[128];
  for (Eigen::Index j = 0; j < grid_.points; ++j) {
    const Complex z = values_[j];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", grid_.x(j), z.real(), z.imag(), std::norm(z));
    os << buf;
  }
}

nlohmann::json FieldState::to_json() const {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index j = 0; j < grid_.points; ++j) {
    re.push_back(values_[j].real());
    im.push_back(values_[j].imag());
  }
  return {{"schema_version", 1},
          {"grid",
           {{"points", grid_.points}, {"dx", grid_.dx}, {"x0", grid_.x0}, {"boundary", boundary_name(grid_.boundary)}}},
          {"re", re},
          {"im", im},
          {"squared_norm", squared_norm()}};
}

KernelOperator KernelOperator::mass(double m) {
  if (!(m > 0.0)) throw PreconditionError("KernelOperator::mass: m must be > 0");
  KernelOperator k;
  k.parts_.emplace_back(Mass{m});
  return k;
}

KernelOperator KernelOperator::potential(RealVector v) {
  KernelOperator k;
  k.parts_.emplace_back(Potential{std::move(v)});
  return k;
}

KernelOperator KernelOperator::dense(RealMatrix r) {
  if (r.rows() != r.cols()) throw DimensionError("KernelOperator::dense: matrix is not square");
  if (max_abs(RealMatrix(r - r.transpose())) > 1e-12 * std::max(1.0, max_abs(r))) {
    throw PreconditionError("KernelOperator::dense: kernel is not symmetric");
  }
  KernelOperator k;
  k.parts_.emplace_back(Dense{0.5 * (r + r.transpose())});
  return k;
}

KernelOperator KernelOperator::identity(Eigen::Index points) { return potential(RealVector::Ones(points)); }

KernelOperator operator+(const KernelOperator& a, const KernelOperator& b) {
  KernelOperator sum = a;
  sum.parts_.insert(sum.parts_.end(), b.parts_.begin(), b.parts_.end());
  return sum;
}

RealMatrix KernelOperator::matrix(const FieldGrid& grid) const {
  RealMatrix r = RealMatrix::Zero(grid.points, grid.points);
  for (const Component& part : parts_) {
    if (const auto* mass = std::get_if<Mass>(&part)) {
      r += laplacian_kernel(grid, mass->m);
    } else if (const auto* pot = std::get_if<Potential>(&part)) {
      require_grid_dim(grid, pot->v.size(), "KernelOperator: potential");
      r.diagonal() += pot->v;
    } else {
      const auto& dense = std::get<Dense>(part);
      require_grid_dim(grid, dense.r.rows(), "KernelOperator: dense kernel");
      r += dense.r;
    }
  }
  return r;
}

ComplexOperator build_hamiltonian(const FieldGrid& grid, double m, const RealVector& v) {
  if (!(m > 0.0)) throw PreconditionError("build_hamiltonian: m must be > 0");
  require_grid_dim(grid, v.size(), "build_hamiltonian");
  const RealMatrix r = (KernelOperator::mass(m) + KernelOperator::potential(v)).matrix(grid);
  return ComplexOperator(r.cast<Complex>());
}

FieldState free_field_evolve(const FieldState& psi0, double t) {
  return FieldState(psi0.grid(), psi0.values() * std::polar(1.0, -t));
}

FieldState interacting_evolve(const FieldState& psi0, const KernelOperator& r, double t) {
  const auto spec = spectrum_cache().get(r.matrix(psi0.grid()));
  const ComplexVector phases = (spec->eigenvalues.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  const ComplexMatrix v = spec->eigenvectors.cast<Complex>();
  const ComplexVector coeffs = v.transpose() * psi0.values();
  return FieldState(psi0.grid(), v * phases.cwiseProduct(coeffs));
}

double position_variable_average(const FieldState& psi, int coordinate) {
  if (coordinate != 0) throw PreconditionError("position_variable_average: the grid is one-dimensional");
  const RealVector abs2 = psi.values().cwiseAbs2();
  return 0.5 * psi.grid().coordinates().dot(abs2) * psi.grid().dx;
}

ComplexVector fourier_transform(const FieldState& psi) {
  Eigen::FFT<double> fft;
  ComplexVector in = psi.values();
  ComplexVector out(in.size());
  fft.fwd(out, in);
  return out / std::sqrt(static_cast<double>(in.size()));
}

double momentum_variable_average(const FieldState& psi) {
  if (psi.grid().boundary != Boundary::kPeriodic) {
    throw PreconditionError("momentum_variable_average: requires a periodic grid");
  }
  const RealVector abs2 = fourier_transform(psi).cwiseAbs2();
  return 0.5 * psi.grid().wavenumbers().dot(abs2) * psi.grid().dx;
}

double field_energy(const FieldState& psi, const KernelOperator& r) {
  const RealMatrix m = r.matrix(psi.grid());
  const Complex e = psi.values().dot(m * psi.values());  // conj(psi)^T R psi
  return 0.5 * e.real() * psi.grid().dx;
}

double nonquadratic_field_energy(const FieldState& psi, const KernelOperator& r, double g) {
  const double quartic = psi.values().cwiseAbs2().cwiseAbs2().sum() * psi.grid().dx;
  return field_energy(psi, r) + g * quartic;
}

ClassicalVariable field_energy_variable(const FieldGrid& grid, const KernelOperator& r) {
  const RealMatrix m = r.matrix(grid);
  return ClassicalVariable::quadratic_form(BlockOperator::j_commuting(m, RealMatrix::Zero(m.rows(), m.cols())));
}

ClassicalVariable position_variable(const FieldGrid& grid) {
  const RealMatrix x = grid.coordinates().asDiagonal();
  return ClassicalVariable::quadratic_form(BlockOperator::j_commuting(x, RealMatrix::Zero(x.rows(), x.cols())));
}

ClassicalVariable momentum_variable(const FieldGrid& grid) {
  if (grid.boundary != Boundary::kPeriodic) throw PreconditionError("momentum_variable: requires a periodic grid");
  const ComplexMatrix f = dft_matrix(grid.points);
  const ComplexMatrix p = f.adjoint() * grid.wavenumbers().cast<Complex>().asDiagonal() * f;
  return ClassicalVariable::quadratic_form(complex_to_real(ComplexOperator(0.5 * (p + p.adjoint()))));
}

Estimate gaussian_field_average(const KernelOperator& r, const FieldGrid& grid, const GaussianState& rho,
                                std::uint64_t seed, std::int64_t count, unsigned workers) {
  require_grid_dim(grid, rho.dim(), "gaussian_field_average");
  return classical_average(field_energy_variable(grid, r), rho, seed, count, workers);
}

}  // namespace pcsft
