// random.hpp — random operators and states for property checks and
// experiments, all drawn from a caller-supplied NormalStream.

#pragma once

#include "pcsft/gaussian.hpp"
#include "pcsft/rng.hpp"
#include "pcsft/symplectic.hpp"

namespace pcsft {

/// i.i.d. standard normal entries.
RealMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, NormalStream& rng);

/// [[D, S], [-S, D]] with D symmetric, S antisymmetric, entries scaled by
/// 1/sqrt(n) so the spectrum stays O(1) as n grows.
BlockOperator random_j_commuting_symmetric(Eigen::Index n, NormalStream& rng);

/// Symmetric 2n x 2n operator with all blocks independent; almost surely not
/// J-commuting.
BlockOperator random_symmetric(Eigen::Index n, NormalStream& rng);

/// Uniform on the unit sphere of C^n.
ComplexVector random_unit_vector(Eigen::Index n, NormalStream& rng);

/// G G* / Tr(G G*) for complex Gaussian G (full rank almost surely).
DensityOperator random_density(Eigen::Index n, NormalStream& rng);

}  // namespace pcsft
