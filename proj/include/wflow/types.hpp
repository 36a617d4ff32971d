#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace wflow {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;
using SparseRealMatrix = Eigen::SparseMatrix<double>;

/// Voltage magnitudes below this floor (pu) are treated as a short circuit;
/// element-wise divisions by v or conj(v) are guarded against it.
inline constexpr double kShortCircuitFloor = 1e-9;

}  // namespace wflow
