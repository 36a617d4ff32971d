#include "wflow/newton.hpp"

#include <cmath>
#include <string>

#include "wflow/linear_solver.hpp"
#include "wflow/wirtinger.hpp"

namespace wflow {

const char* to_string(LoadModel m) {
    return m == LoadModel::ConstantPower ? "constant-power" : "zip";
}

const char* to_string(MismatchNorm n) {
    return n == MismatchNorm::Euclidean ? "l2" : "inf";
}

namespace {

double vector_norm(const ComplexVector& v, MismatchNorm which) {
    return which == MismatchNorm::Euclidean ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

void validate(const GridModel& grid, const SolverConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw Error("tolerance must be positive");
    if (cfg.max_iterations < 1) throw Error("max_iterations must be at least 1");
    if (cfg.warm_start && cfg.warm_start->size() != grid.n)
        throw DimensionError("warm start vector length mismatch");
}

ComplexVector start_voltage(const GridModel& grid, const SolverConfig& cfg) {
    if (cfg.warm_start) return *cfg.warm_start;
    const Complex v = cfg.flat_start_voltage.value_or(grid.v0);
    return ComplexVector::Constant(grid.n, v);
}

// One code path for both models; they differ in the residual, the block
// assembly and the update sign.
SolveResult newton_loop(const GridModel& grid, const SolverConfig& cfg, LoadModel model) {
    validate(grid, cfg);

    ComplexVector V = start_voltage(grid, cfg);
    ComplexVector I = nodal_currents(grid, V);

    const auto residual = [&](const ComplexVector& Vv, const ComplexVector& Iv) {
        return model == LoadModel::ConstantPower ? power_mismatch(grid.S_N, Vv, Iv)
                                                 : zip_residual(grid, Vv, Iv);
    };
    const double sign = model == LoadModel::ConstantPower ? +1.0 : -1.0;

    ComplexVector R = residual(V, I);
    double eps = vector_norm(R, cfg.norm);

    SolveResult out;
    out.iterations.push_back({0, eps, 0.0});

    Factorization lu;  // ordering reused across iterations; values refactorized
    int iter = 0;
    while (eps > cfg.tolerance && iter < cfg.max_iterations) {
        ++iter;
        ConjugateBlockSystem sys;
        try {
            const JacobianBlocks jb = model == LoadModel::ConstantPower
                                          ? assemble_jacobian_cp(grid, V, I, R)
                                          : assemble_jacobian_zip(grid, V, I, R);
            sys = {jb.A, jb.B, jb.rhs};
            ComplexVector dV = solve_conjugate_block(sys, &lu);

            ComplexVector V_next = V + sign * dV;
            ComplexVector I_next = nodal_currents(grid, V_next);
            ComplexVector R_next = residual(V_next, I_next);
            double eps_next = vector_norm(R_next, cfg.norm);

            if (cfg.damping) {
                for (int halvings = 0; eps_next > eps && halvings < 10; ++halvings) {
                    dV *= 0.5;
                    V_next = V + sign * dV;
                    I_next = nodal_currents(grid, V_next);
                    R_next = residual(V_next, I_next);
                    eps_next = vector_norm(R_next, cfg.norm);
                }
            }

            V = std::move(V_next);
            I = std::move(I_next);
            R = std::move(R_next);
            eps = eps_next;
            out.iterations.push_back({iter, eps, dV.norm()});
        } catch (const SingularMatrixError& e) {
            throw SolverError(iter, "singular Jacobian at iteration " + std::to_string(iter) +
                                        ": " + e.what());
        }
    }

    // Convergence certificate: the reported final norm is recomputed from the
    // returned voltages, never taken from the loop variable.
    out.V_N = std::move(V);
    out.I_N = nodal_currents(grid, out.V_N);
    const double final_eps = vector_norm(residual(out.V_N, out.I_N), cfg.norm);
    out.iterations.back().mismatch_norm = final_eps;
    out.converged = final_eps <= cfg.tolerance;
    std::tie(out.S_loss, out.slack_injection) = compute_losses(grid, out.V_N);
    return out;
}

}  // namespace

SolveResult solve_constant_power(const GridModel& grid, const SolverConfig& cfg) {
    return newton_loop(grid, cfg, LoadModel::ConstantPower);
}

SolveResult solve_zip(const GridModel& grid, const SolverConfig& cfg) {
    return newton_loop(grid, cfg, LoadModel::Zip);
}

SolveResult solve(const GridModel& grid, const SolverConfig& cfg) {
    return newton_loop(grid, cfg, cfg.model);
}

std::pair<Complex, Complex> compute_losses(const GridModel& grid, const ComplexVector& V_N) {
    const int n = grid.n;
    ComplexVector V(n + 1);
    V[0] = grid.v0;
    V.tail(n) = V_N;
    const ComplexVector I = grid.Y_full * V;
    const Complex S_loss = (V.array() * I.array().conjugate()).sum();
    const Complex slack_injection = V[0] * std::conj(I[0]);
    return {S_loss, slack_injection};
}

std::vector<BatchOutcome> batch_solve(std::span<const GridModel> grids, const SolverConfig& cfg) {
    std::vector<BatchOutcome> out;
    out.reserve(grids.size());
    for (const GridModel& g : grids) {
        BatchOutcome item;
        try {
            item.result = solve(g, cfg);
        } catch (const std::exception& e) {
            item.error = e.what();
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace wflow
