#include "wflow/wirtinger.hpp"

#include <cmath>
#include <string>

namespace wflow {

namespace {

void check_length(const ComplexVector& v, int n, const char* what) {
    if (v.size() != n)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                             ", got " + std::to_string(v.size()));
}

void check_no_short_circuit(const ComplexVector& V) {
    for (int k = 0; k < V.size(); ++k)
        if (std::abs(V[k]) < kShortCircuitFloor)
            throw ShortCircuitError(k, "|v| below short-circuit floor at node " +
                                           std::to_string(k + 1));
}

}  // namespace

ComplexVector nodal_currents(const GridModel& grid, const ComplexVector& V_N) {
    check_length(V_N, grid.n, "nodal_currents");
    return grid.Y_N0 * grid.v0 + grid.Y_NN * V_N;
}

ComplexVector power_mismatch(const ComplexVector& S_N, const ComplexVector& V_N,
                             const ComplexVector& I_N) {
    if (S_N.size() != V_N.size() || V_N.size() != I_N.size())
        throw DimensionError("power_mismatch: S, V, I lengths differ");
    return S_N.array() - V_N.array() * I_N.array().conjugate();
}

ComplexVector zip_residual(const GridModel& grid, const ComplexVector& V_N,
                           const ComplexVector& I_N) {
    check_length(V_N, grid.n, "zip_residual");
    check_length(I_N, grid.n, "zip_residual");
    ComplexVector F(grid.n);
    for (int k = 0; k < grid.n; ++k) {
        const double vm = std::abs(V_N[k]);
        if (vm < kShortCircuitFloor && grid.alpha[k] < 2.0)
            throw ShortCircuitError(k, "zip residual singular: |v|=0 with exponent < 2 at node " +
                                           std::to_string(k + 1));
        F[k] = std::conj(V_N[k]) * I_N[k] -
               std::conj(grid.S_N[k]) * std::pow(vm, grid.alpha[k]);
    }
    return F;
}

JacobianBlocks assemble_jacobian_cp(const GridModel& grid, const ComplexVector& V_N,
                                    const ComplexVector& I_N, const ComplexVector& dS_N) {
    check_length(V_N, grid.n, "assemble_jacobian_cp");
    check_length(I_N, grid.n, "assemble_jacobian_cp");
    check_length(dS_N, grid.n, "assemble_jacobian_cp");
    check_no_short_circuit(V_N);

    JacobianBlocks jb;
    jb.A = grid.Y_NN;
    jb.B = I_N.array() / V_N.array().conjugate();
    jb.rhs = (dS_N.array() / V_N.array()).conjugate();
    return jb;
}

JacobianBlocks assemble_jacobian_zip(const GridModel& grid, const ComplexVector& V_N,
                                     const ComplexVector& I_N, const ComplexVector& F_N) {
    check_length(V_N, grid.n, "assemble_jacobian_zip");
    check_length(I_N, grid.n, "assemble_jacobian_zip");
    check_length(F_N, grid.n, "assemble_jacobian_zip");
    check_no_short_circuit(V_N);

    JacobianBlocks jb;
    jb.A = grid.Y_NN;
    jb.B.resize(grid.n);
    jb.rhs.resize(grid.n);
    for (int k = 0; k < grid.n; ++k) {
        const Complex v = V_N[k];
        const Complex vc = std::conj(v);
        const double vm = std::abs(v);
        // g_k = (alpha/2) conj(s) |v|^(alpha-2); vanishes identically at alpha = 0
        const double a = grid.alpha[k];
        const Complex g = a == 0.0
                              ? Complex{0.0, 0.0}
                              : 0.5 * a * std::conj(grid.S_N[k]) * std::pow(vm, a - 2.0);
        jb.A.coeffRef(k, k) -= g;
        jb.B[k] = I_N[k] / vc - g * v / vc;
        jb.rhs[k] = F_N[k] / vc;
    }
    return jb;
}

}  // namespace wflow
