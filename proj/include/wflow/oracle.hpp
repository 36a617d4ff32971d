#pragma once

#include <cstdint>

#include "wflow/grid_model.hpp"
#include "wflow/newton.hpp"
#include "wflow/types.hpp"

namespace wflow::oracle {

/// Configuration of the fixed-point reference solver. Tolerance applies to
/// the successive-iterate inf-norm, not a residual.
struct OracleConfig {
    double tolerance = 1e-10;
    int max_iterations = 500;
    LoadModel model = LoadModel::ConstantPower;
};

/// Z-bus style fixed point: factorize Y_NN once and iterate
///   V <- Y_NN^-1 (conj(S ./ V) .* |V|.^alpha - Y_N0 * v0)
/// (alpha treated as zero for the constant-power model). Deliberately shares
/// no Jacobian or Wirtinger code with the Newton path. Sustained step-norm
/// growth over 10 iterations throws OracleDivergenceError.
[[nodiscard]] SolveResult fixed_point_solve(const GridModel& grid, const OracleConfig& cfg);

/// Both roots of the scalar constant-power equation conj(v)*y*(v - v0) = conj(s),
/// via the quadratic in u = |v|^2:
///   |y|^2 u^2 - (2 Re(y s) + |y v0|^2) u + |s|^2 = 0,  v = (conj(y) u - s) / (conj(y) conj(v0)).
/// Entry [0] is the high-voltage (operational) root, [1] the low-voltage one.
/// Negative discriminant (load beyond maximum transfer) throws InfeasibleLoadError.
[[nodiscard]] ComplexVector two_bus_closed_form(Complex v0, Complex y, Complex s);

/// Inf-norm of the model residual recomputed from first principles (raw
/// admittance arithmetic only): the certificate a converged result must pass.
[[nodiscard]] double residual_certificate(const GridModel& grid, const ComplexVector& V_N,
                                          LoadModel model, const RealVector& alpha);
[[nodiscard]] double residual_certificate(const GridModel& grid, const ComplexVector& V_N,
                                          LoadModel model);

struct RandomGridOptions {
    int min_nodes = 5;
    int max_nodes = 15;  // non-slack nodes
    double dg_probability = 0.3;  // chance of flipping one load into generation
    bool random_alpha = true;     // exponents drawn from {0,1,2}; zeros otherwise
};

/// Seed-deterministic radial tree: impedances r in [0.01,0.1], x in [0.02,0.2] pu,
/// loads scaled so the total stays well inside the feasibility region
/// (sum |s| <= 0.5 pu).
[[nodiscard]] GridInputs random_radial_inputs(std::uint64_t seed,
                                              const RandomGridOptions& opts = {});
[[nodiscard]] GridModel random_radial_grid(std::uint64_t seed,
                                           const RandomGridOptions& opts = {});

}  // namespace wflow::oracle
