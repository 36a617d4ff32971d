#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wflow/grid_model.hpp"
#include "wflow/types.hpp"

namespace wflow {

enum class LoadModel { ConstantPower, Zip };
enum class MismatchNorm { Euclidean, Infinity };

[[nodiscard]] const char* to_string(LoadModel m);
[[nodiscard]] const char* to_string(MismatchNorm n);

struct SolverConfig {
    double tolerance = 1e-4;  // pu, on the residual norm
    int max_iterations = 20;
    LoadModel model = LoadModel::ConstantPower;
    MismatchNorm norm = MismatchNorm::Euclidean;
    std::optional<Complex> flat_start_voltage;  // defaults to grid.v0
    std::optional<ComplexVector> warm_start;    // overrides flat start when set
    bool damping = false;  // halve the step while the residual grows (off: pure Newton)
};

struct IterationRecord {
    int index = 0;  // 0 is the initial state, k >= 1 the k-th Newton step
    double mismatch_norm = 0.0;
    double step_norm = 0.0;
};

struct SolveResult {
    ComplexVector V_N;
    ComplexVector I_N;
    bool converged = false;
    std::vector<IterationRecord> iterations;
    Complex S_loss;
    Complex slack_injection;

    [[nodiscard]] int iteration_count() const {
        return iterations.empty() ? 0 : iterations.back().index;
    }
    [[nodiscard]] double final_mismatch() const {
        return iterations.empty() ? 0.0 : iterations.back().mismatch_norm;
    }
};

/// Newton iteration on the power mismatch dS = S - V.*conj(I); update V <- V + dV.
/// Non-convergence within max_iterations is a result state, not an exception.
/// A singular Jacobian throws SolverError with the iteration index.
[[nodiscard]] SolveResult solve_constant_power(const GridModel& grid, const SolverConfig& cfg);

/// Newton iteration on the exponential-model residual F (zip_residual);
/// update V <- V - dV. Same error contract as solve_constant_power.
[[nodiscard]] SolveResult solve_zip(const GridModel& grid, const SolverConfig& cfg);

/// Dispatch on cfg.model.
[[nodiscard]] SolveResult solve(const GridModel& grid, const SolverConfig& cfg);

/// Total complex power entering the network and the slack injection:
/// with V = (v0, V_N) and I = Y_full * V,
///   S_loss = sum_k v_k * conj(i_k),  slack_injection = v_0 * conj(i_0).
[[nodiscard]] std::pair<Complex, Complex> compute_losses(const GridModel& grid,
                                                         const ComplexVector& V_N);

struct BatchOutcome {
    std::optional<SolveResult> result;
    std::string error;
    [[nodiscard]] bool ok() const { return result.has_value(); }
};

/// Independent solves, order-aligned with the inputs. Per-item failures are
/// captured in the outcome instead of aborting the batch.
[[nodiscard]] std::vector<BatchOutcome> batch_solve(std::span<const GridModel> grids,
                                                    const SolverConfig& cfg);

}  // namespace wflow
