#include "pcsft/random.hpp"

#include <cmath>

namespace pcsft {

RealMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, NormalStream& rng) {
  RealMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.next_normal();
  }
  return g;
}

BlockOperator random_j_commuting_symmetric(Eigen::Index n, NormalStream& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const RealMatrix a = random_gaussian_matrix(n, n, rng);
  const RealMatrix b = random_gaussian_matrix(n, n, rng);
  const RealMatrix d = 0.5 * scale * (a + a.transpose());
  const RealMatrix s = 0.5 * scale * (b - b.transpose());
  return BlockOperator::j_commuting(d, s);
}

BlockOperator random_symmetric(Eigen::Index n, NormalStream& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const RealMatrix a = random_gaussian_matrix(2 * n, 2 * n, rng);
  return BlockOperator(0.5 * scale * (a + a.transpose()));
}

ComplexVector random_unit_vector(Eigen::Index n, NormalStream& rng) {
  ComplexVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.next_normal();
    z[i] = Complex(re, rng.next_normal());
  }
  return z / z.norm();
}

DensityOperator random_density(Eigen::Index n, NormalStream& rng) {
  ComplexMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = rng.next_normal();
      g(i, j) = Complex(re, rng.next_normal());
    }
  }
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  return DensityOperator(ComplexOperator(0.5 * (w + w.adjoint())));
}

}  // namespace pcsft
