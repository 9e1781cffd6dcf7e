#pragma once

#include <vector>

#include "upm/matrix.hpp"

namespace upm {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
/// Throws NotSymmetric when |a_ij − a_ji| exceeds 1e-9 (scaled by the largest
/// entry when that is above 1) and NoConvergence after 100 sweeps.
EigenDecomposition sym_eigen(const Matrix& a);

}  // namespace upm
