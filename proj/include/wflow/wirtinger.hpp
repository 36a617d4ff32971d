#pragma once

#include <cmath>
#include <utility>

#include "wflow/errors.hpp"
#include "wflow/grid_model.hpp"
#include "wflow/types.hpp"

namespace wflow {

/// Derivative pair (df/dz, df/dz*) of a complex function at a point.
struct WirtingerPair {
    Complex d_z;
    Complex d_zconj;
};

/// Linearized residual in normalized form: A*dV + diag(B)*conj(dV) = rhs.
/// B is strictly diagonal (the conjugate-derivative coupling never spreads
/// off the diagonal); A's off-diagonal pattern is Y_NN's.
struct JacobianBlocks {
    SparseComplexMatrix A;
    ComplexVector B;  // diagonal entries
    ComplexVector rhs;
};

/// I_N = Y_N0 * v0 + Y_NN * V_N
[[nodiscard]] ComplexVector nodal_currents(const GridModel& grid, const ComplexVector& V_N);

/// dS[k] = s_k - v_k * conj(i_k)
[[nodiscard]] ComplexVector power_mismatch(const ComplexVector& S_N, const ComplexVector& V_N,
                                           const ComplexVector& I_N);

/// F[k] = conj(v_k) * i_k - conj(s_k) * |v_k|^alpha_k
[[nodiscard]] ComplexVector zip_residual(const GridModel& grid, const ComplexVector& V_N,
                                         const ComplexVector& I_N);

/// Constant-power blocks, rows scaled by 1/conj(v_k):
///   A = Y_NN,  B = diag(i ./ conj(v)),  rhs = conj(dS ./ v).
/// Newton update is V <- V + dV.
[[nodiscard]] JacobianBlocks assemble_jacobian_cp(const GridModel& grid, const ComplexVector& V_N,
                                                  const ComplexVector& I_N,
                                                  const ComplexVector& dS_N);

/// Exponential-model blocks, rows scaled by 1/conj(v_k). With
/// g_k = (alpha_k/2) conj(s_k) |v_k|^(alpha_k-2):
///   A = Y_NN - diag(g),  B = diag(i ./ conj(v) - g .* v ./ conj(v)),
///   rhs = F ./ conj(v).
/// Newton update is V <- V - dV.
[[nodiscard]] JacobianBlocks assemble_jacobian_zip(const GridModel& grid, const ComplexVector& V_N,
                                                   const ComplexVector& I_N,
                                                   const ComplexVector& F_N);

/// Central-difference estimate of the Wirtinger derivative pair at z.
/// With f = u + jv and steps along the real and imaginary axes:
///   df/dz  = (df/dx - j df/dy) / 2,   df/dz* = (df/dx + j df/dy) / 2.
template <class Fn>
[[nodiscard]] WirtingerPair wirtinger_fd(Fn&& f, Complex z, double h = 1e-7) {
    const Complex jh{0.0, h};
    const Complex fxp = f(z + h), fxm = f(z - h);
    const Complex fyp = f(z + jh), fym = f(z - jh);
    for (const Complex& v : {fxp, fxm, fyp, fym}) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteError("wirtinger_fd: non-finite function evaluation");
    }
    const Complex fx = (fxp - fxm) / (2.0 * h);
    const Complex fy = (fyp - fym) / (2.0 * h);
    const Complex j{0.0, 1.0};
    return {0.5 * (fx - j * fy), 0.5 * (fx + j * fy)};
}

}  // namespace wflow
