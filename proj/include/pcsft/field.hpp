// field.hpp — classical fields psi(x) = q(x) + i p(x) on a uniform 1-D grid.
//
// Field values psi_j live at x_j = x0 + j dx; the discrete L2 product is
// <a, b> = sum_j a_j conj(b_j) dx. The corresponding phase-space coordinates
// are c_j = sqrt(dx) psi_j, which are orthonormal, so Gaussian states and
// classical variables on the grid use the ordinary machinery unchanged.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pcsft/bridge.hpp"
#include "pcsft/gaussian.hpp"
#include "pcsft/variable.hpp"

namespace pcsft {

enum class Boundary { kPeriodic, kDirichlet };

struct FieldGrid {
  Eigen::Index points = 0;
  double dx = 0.0;
  double x0 = 0.0;
  Boundary boundary = Boundary::kPeriodic;

  /// Throws PreconditionError unless points >= 4 and dx > 0.
  FieldGrid(Eigen::Index points, double dx, double x0, Boundary boundary);
  /// Nodes symmetric about x = 0, x0 = -(points - 1) dx / 2. Periodic grids
  /// use dx = length / points (one period); Dirichlet grids use
  /// dx = length / (points + 1) so the walls sit at +-length/2.
  static FieldGrid centered(Eigen::Index points, double length, Boundary boundary = Boundary::kPeriodic);

  double x(Eigen::Index j) const { return x0 + static_cast<double>(j) * dx; }
  RealVector coordinates() const;
  /// Discrete wavenumbers 2 pi m / (N dx), m in [-N/2, N/2); the unpaired
  /// Nyquist bin of an even grid is assigned k = 0.
  RealVector wavenumbers() const;
  double length() const { return static_cast<double>(points) * dx; }
};

class FieldState {
 public:
  FieldState(FieldGrid grid, ComplexVector values);

  /// psi_j = c_j / sqrt(dx) for phase vector c = (q, p).
  static FieldState from_phase_vector(const FieldGrid& grid, const PhaseVector& v);
  PhaseVector to_phase_vector() const;

  const FieldGrid& grid() const { return grid_; }
  const ComplexVector& values() const { return values_; }
  double squared_norm() const;  // sum |psi_j|^2 dx
  double norm() const;

  /// Columns x, re, im, abs2.
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;

 private:
  FieldGrid grid_;
  ComplexVector values_;
};

/// Sum of kernel components acting on field values.
class KernelOperator {
 public:
  struct Mass {
    double m;
  };
  struct Potential {
    RealVector v;
  };
  struct Dense {
    RealMatrix r;
  };
  using Component = std::variant<Mass, Potential, Dense>;

  /// -Laplacian / 2m, three-point stencil. Requires m > 0.
  static KernelOperator mass(double m);
  static KernelOperator potential(RealVector v);
  /// Requires r symmetric.
  static KernelOperator dense(RealMatrix r);
  static KernelOperator identity(Eigen::Index points);

  friend KernelOperator operator+(const KernelOperator& a, const KernelOperator& b);

  const std::vector<Component>& components() const { return parts_; }
  /// Real symmetric N x N matrix of the operator on `grid`.
  RealMatrix matrix(const FieldGrid& grid) const;

 private:
  std::vector<Component> parts_;
};

/// -Laplacian/2m + diag(V) as a (real symmetric) hermitian operator.
ComplexOperator build_hamiltonian(const FieldGrid& grid, double m, const RealVector& v);

/// e^{-it} psi0, the solution of q' = p, p' = -q.
FieldState free_field_evolve(const FieldState& psi0, double t);

/// e^{-iRt} psi0 from the eigendecomposition of R (cached per matrix).
FieldState interacting_evolve(const FieldState& psi0, const KernelOperator& r, double t);

/// 1/2 sum_j x_j |psi_j|^2 dx. Only coordinate 0 exists on a 1-D grid.
double position_variable_average(const FieldState& psi, int coordinate = 0);

/// Unitary DFT in the same ordering as FieldGrid::wavenumbers, normalized so
/// sum |psi~_k|^2 dx = sum |psi_j|^2 dx.
ComplexVector fourier_transform(const FieldState& psi);

/// 1/2 sum_k k |psi~_k|^2 dx. Requires a periodic grid.
double momentum_variable_average(const FieldState& psi);

/// 1/2 <R psi, psi>.
double field_energy(const FieldState& psi, const KernelOperator& r);

/// field_energy + g sum |psi_j|^4 dx.
double nonquadratic_field_energy(const FieldState& psi, const KernelOperator& r, double g);

// The same quantities as classical variables on the grid phase space
// (coordinates c = sqrt(dx) psi), with analytic Hessians at zero.
ClassicalVariable field_energy_variable(const FieldGrid& grid, const KernelOperator& r);
ClassicalVariable position_variable(const FieldGrid& grid);
ClassicalVariable momentum_variable(const FieldGrid& grid);

/// Monte Carlo average of field_energy over rho (not amplified).
Estimate gaussian_field_average(const KernelOperator& r, const FieldGrid& grid, const GaussianState& rho,
                                std::uint64_t seed, std::int64_t count, unsigned workers = 1);

}  // namespace pcsft
