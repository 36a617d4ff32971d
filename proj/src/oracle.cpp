#include "wflow/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SparseLU>

#include "wflow/errors.hpp"

namespace wflow::oracle {

namespace {

// Residual evaluation on raw admittance arithmetic; intentionally does not
// call into the Newton-side residual/Jacobian code.
ComplexVector raw_residual(const GridModel& grid, const ComplexVector& V,
                           LoadModel model, const RealVector& alpha) {
    const ComplexVector I = grid.Y_N0 * grid.v0 + grid.Y_NN * V;
    ComplexVector R(grid.n);
    for (int k = 0; k < grid.n; ++k) {
        if (model == LoadModel::ConstantPower) {
            R[k] = grid.S_N[k] - V[k] * std::conj(I[k]);
        } else {
            R[k] = std::conj(V[k]) * I[k] -
                   std::conj(grid.S_N[k]) * std::pow(std::abs(V[k]), alpha[k]);
        }
    }
    return R;
}

}  // namespace

SolveResult fixed_point_solve(const GridModel& grid, const OracleConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw Error("oracle tolerance must be positive");

    Eigen::SparseLU<SparseComplexMatrix> lu;
    SparseComplexMatrix Ynn = grid.Y_NN;
    Ynn.makeCompressed();
    lu.compute(Ynn);
    if (lu.info() != Eigen::Success)
        throw SingularMatrixError(-1, "Y_NN factorization failed (disconnected grid?): " +
                                          std::string(lu.lastErrorMessage()));

    const bool zip = cfg.model == LoadModel::Zip;
    const ComplexVector rhs_slack = grid.Y_N0 * grid.v0;

    SolveResult out;
    ComplexVector V = ComplexVector::Constant(grid.n, grid.v0);
    out.iterations.push_back(
        {0, raw_residual(grid, V, cfg.model, grid.alpha).lpNorm<Eigen::Infinity>(), 0.0});

    double prev_step = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        // load-model current injections: i_k = conj(s_k / v_k) * |v_k|^alpha_k
        ComplexVector inj(grid.n);
        for (int k = 0; k < grid.n; ++k) {
            const double vm = std::abs(V[k]);
            if (vm < kShortCircuitFloor)
                throw OracleDivergenceError("fixed point collapsed to |v|=0 at node " +
                                            std::to_string(k + 1));
            Complex i = std::conj(grid.S_N[k] / V[k]);
            if (zip && grid.alpha[k] != 0.0) i *= std::pow(vm, grid.alpha[k]);
            inj[k] = i;
        }
        const ComplexVector V_next = lu.solve(inj - rhs_slack);
        const double step = (V_next - V).lpNorm<Eigen::Infinity>();
        V = V_next;
        out.iterations.push_back(
            {it, raw_residual(grid, V, cfg.model, grid.alpha).lpNorm<Eigen::Infinity>(), step});

        if (step < cfg.tolerance) {
            out.converged = true;
            break;
        }
        growth_streak = step > prev_step ? growth_streak + 1 : 0;
        if (growth_streak >= 10)
            throw OracleDivergenceError("fixed point diverging: step norm grew over 10 "
                                        "consecutive iterations");
        prev_step = step;
    }

    out.V_N = V;
    out.I_N = grid.Y_N0 * grid.v0 + grid.Y_NN * V;
    std::tie(out.S_loss, out.slack_injection) = compute_losses(grid, out.V_N);
    return out;
}

ComplexVector two_bus_closed_form(Complex v0, Complex y, Complex s) {
    if (y == Complex{0.0, 0.0}) throw Error("two_bus_closed_form: zero admittance");

    // u = |v|^2 satisfies |y|^2 u^2 - (2 Re(y s) + |y v0|^2) u + |s|^2 = 0
    const double a = std::norm(y);
    const double b = -(2.0 * (y * s).real() + std::norm(y * v0));
    const double c = std::norm(s);
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
        throw InfeasibleLoadError("load beyond maximum transfer: discriminant " +
                                  std::to_string(disc));
    const double sq = std::sqrt(disc);
    const double u_high = (-b + sq) / (2.0 * a);
    const double u_low = (-b - sq) / (2.0 * a);

    const Complex denom = std::conj(y) * std::conj(v0);
    ComplexVector roots(2);
    roots[0] = (std::conj(y) * u_high - s) / denom;  // operational root
    roots[1] = (std::conj(y) * u_low - s) / denom;
    return roots;
}

double residual_certificate(const GridModel& grid, const ComplexVector& V_N, LoadModel model,
                            const RealVector& alpha) {
    if (V_N.size() != grid.n || alpha.size() != grid.n)
        throw DimensionError("residual_certificate: length mismatch");
    return raw_residual(grid, V_N, model, alpha).lpNorm<Eigen::Infinity>();
}

double residual_certificate(const GridModel& grid, const ComplexVector& V_N, LoadModel model) {
    return residual_certificate(grid, V_N, model, grid.alpha);
}

namespace {

// Uniform doubles straight off the generator: keeps grids reproducible
// independent of the standard library's distribution implementations.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * canonical(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
    return lo + static_cast<int>(canonical(rng) * (hi - lo + 1));
}

}  // namespace

GridInputs random_radial_inputs(std::uint64_t seed, const RandomGridOptions& opts) {
    std::mt19937_64 rng(seed);
    const int n = uniform_int(rng, opts.min_nodes, opts.max_nodes);

    GridInputs gi;
    gi.node_count = n + 1;
    gi.v0 = Complex{1.0, 0.0};
    for (int k = 1; k <= n; ++k) {
        BranchRecord b;
        b.from_node = uniform_int(rng, 0, k - 1);
        b.to_node = k;
        b.series_impedance = {uniform(rng, 0.01, 0.1), uniform(rng, 0.02, 0.2)};
        b.in_service = true;
        gi.branches.push_back(b);
    }
    for (int k = 1; k <= n; ++k) {
        LoadRecord l;
        l.node = k;
        // sum over nodes of |s| stays below 0.5 pu: comfortably feasible
        l.power = {uniform(rng, 0.0, 0.4) / n, uniform(rng, 0.0, 0.2) / n};
        l.exponent = opts.random_alpha ? static_cast<double>(uniform_int(rng, 0, 2)) : 0.0;
        gi.loads.push_back(l);
    }
    if (canonical(rng) < opts.dg_probability) {
        auto& dg = gi.loads[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        dg.power = -dg.power;
    }
    return gi;
}

GridModel random_radial_grid(std::uint64_t seed, const RandomGridOptions& opts) {
    return build_grid(random_radial_inputs(seed, opts));
}

}  // namespace wflow::oracle
