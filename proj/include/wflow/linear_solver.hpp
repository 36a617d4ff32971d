#pragma once

#include <memory>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "wflow/errors.hpp"
#include "wflow/types.hpp"

namespace wflow {

/// The structured system A*dV + diag(B)*conj(dV) = r, i.e. the 2n block form
/// [[A, B], [conj(B), conj(A)]] * [dV; conj(dV)] = [r; conj(r)].
struct ConjugateBlockSystem {
    SparseComplexMatrix A;
    ComplexVector B;  // diagonal entries
    ComplexVector r;
};

/// Real 2n x 2n equivalent in the unknowns (x, y) with dV = x + jy:
///   M = [[Re A + Re B,  Im B - Im A],
///        [Im A + Im B,  Re A - Re B]],  b = [Re r; Im r].
struct RealifiedSystem {
    SparseRealMatrix M;
    Eigen::VectorXd b;
};

[[nodiscard]] RealifiedSystem realify(const ConjugateBlockSystem& sys);

/// Sparse LU handle with the symbolic analysis split out so the Newton loop
/// can reorder once and refactorize per iteration (the pattern is fixed,
/// the values are not). COLAMD ordering, partial pivoting.
class Factorization {
  public:
    Factorization();

    void analyze_pattern(const SparseRealMatrix& M);

    /// Numeric factorization; throws SingularMatrixError on a bad pivot.
    /// Calls analyze_pattern first if it has not been done yet.
    void factorize(const SparseRealMatrix& M);

    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    [[nodiscard]] bool analyzed() const { return analyzed_; }

  private:
    std::unique_ptr<Eigen::SparseLU<SparseRealMatrix, Eigen::COLAMDOrdering<int>>> lu_;
    bool analyzed_ = false;
    bool factorized_ = false;
};

[[nodiscard]] Factorization factorize(const RealifiedSystem& sys);

/// Residual r - (A*dV + B.*conj(dV)) of a candidate step.
[[nodiscard]] ComplexVector block_residual(const ConjugateBlockSystem& sys,
                                           const ComplexVector& dV);

/// Solve the conjugate-block system through realification. Every solve is
/// residual-checked: relative inf-norm residual above `residual_tol` throws
/// NumericalQualityError. An existing Factorization may be reused (its
/// pattern must match); pass nullptr for a one-shot solve.
[[nodiscard]] ComplexVector solve_conjugate_block(const ConjugateBlockSystem& sys,
                                                  Factorization* reuse = nullptr,
                                                  double residual_tol = 1e-10);

}  // namespace wflow
