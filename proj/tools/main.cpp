#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wflow/errors.hpp"
#include "wflow/grid_model.hpp"
#include "wflow/newton.hpp"
#include "wflow/oracle.hpp"
#include "wflow/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitOracleDisagreement = 3;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct SolveArgs {
    std::string grid_dir;
    std::string model = "cp";
    double tol = 1e-4;
    int max_iter = 20;
    std::string ties = "open";
    std::string norm = "l2";
    std::string output;
    bool deterministic = false;
    std::optional<double> alpha_override;
};

wflow::GridModel load_grid(const std::string& dir, const std::string& ties,
                           const std::optional<double>& alpha_override) {
    wflow::GridInputs inputs = wflow::read_grid_dir(dir);
    for (const auto& w : inputs.warnings) std::cerr << "warning: " << w << "\n";
    wflow::GridModel grid = wflow::set_tie_lines(
        inputs, ties == "closed" ? wflow::TieMode::Closed : wflow::TieMode::Open);
    if (alpha_override) grid = wflow::with_uniform_alpha(std::move(grid), *alpha_override);
    return grid;
}

int run_solve(const SolveArgs& args) {
    wflow::GridModel grid;
    try {
        grid = load_grid(args.grid_dir, args.ties, args.alpha_override);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    wflow::SolverConfig cfg;
    cfg.tolerance = args.tol;
    cfg.max_iterations = args.max_iter;
    cfg.model = args.model == "zip" ? wflow::LoadModel::Zip : wflow::LoadModel::ConstantPower;
    cfg.norm = args.norm == "inf" ? wflow::MismatchNorm::Infinity : wflow::MismatchNorm::Euclidean;

    wflow::SolveResult result;
    double elapsed_ms = 0.0;
    try {
        const auto t0 = Clock::now();
        result = wflow::solve(grid, cfg);
        elapsed_ms = ms_since(t0);
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNotConverged;
    }

    const wflow::RunReport report =
        wflow::make_report(grid, cfg, result, args.ties, elapsed_ms, args.deterministic);
    if (args.output.empty()) {
        std::cout << wflow::render_table(report);
    } else {
        std::ofstream out(args.output);
        if (!out) {
            std::cerr << "error: cannot write " << args.output << "\n";
            return kExitInputError;
        }
        out << wflow::to_json_string(report);
        std::cout << wflow::render_table(report);
        std::cout << "report written to " << args.output << "\n";
    }
    return result.converged ? kExitOk : kExitNotConverged;
}

struct CheckArgs {
    std::string grid_dir;
    std::string ties = "open";
    double tol = 1e-10;
    int random_count = 0;
    unsigned long long seed = 1;
    std::optional<double> alpha_override;
};

// One grid through both Newton paths and the fixed-point reference.
// Returns the worst exit code encountered.
int check_one(const wflow::GridModel& grid, double tol, const std::string& label) {
    using wflow::LoadModel;
    wflow::SolverConfig ncfg;
    ncfg.tolerance = tol;
    ncfg.max_iterations = 60;

    wflow::oracle::OracleConfig ocfg;
    ocfg.tolerance = 1e-12;
    ocfg.max_iterations = 2000;

    int code = kExitOk;
    double worst_dev = 0.0;
    for (LoadModel model : {LoadModel::ConstantPower, LoadModel::Zip}) {
        ncfg.model = model;
        ocfg.model = model;
        wflow::SolveResult newton, fixed;
        try {
            newton = wflow::solve(grid, ncfg);
            fixed = wflow::oracle::fixed_point_solve(grid, ocfg);
        } catch (const std::exception& e) {
            std::cout << label << " [" << to_string(model) << "] ERROR: " << e.what() << "\n";
            return kExitNotConverged;
        }
        if (!newton.converged || !fixed.converged) {
            std::cout << label << " [" << to_string(model) << "] FAIL: "
                      << (newton.converged ? "fixed point" : "newton") << " did not converge\n";
            return kExitNotConverged;
        }
        const double cert = wflow::oracle::residual_certificate(grid, newton.V_N, model);
        const double dev = (newton.V_N - fixed.V_N).lpNorm<Eigen::Infinity>();
        worst_dev = std::max(worst_dev, dev);
        const bool agree = dev < 1e-8;
        const bool cert_ok = cert <= tol;
        std::cout << label << " [" << to_string(model) << "] newton " << newton.iteration_count()
                  << " it, fixed-point " << fixed.iteration_count() << " it, certificate "
                  << cert << ", max voltage deviation " << dev << (agree && cert_ok ? "" : "  <-- FAIL")
                  << "\n";
        if (!cert_ok) code = std::max(code, kExitNotConverged);
        if (!agree) code = std::max(code, kExitOracleDisagreement);
    }
    if (code == kExitOracleDisagreement)
        std::cout << label << " oracle disagreement: max per-node deviation " << worst_dev << "\n";
    return code;
}

int run_check(const CheckArgs& args) {
    std::cout.precision(3);
    std::cout << std::scientific;

    int code = kExitOk;
    if (args.random_count > 0) {
        for (int i = 0; i < args.random_count; ++i) {
            const auto seed = static_cast<std::uint64_t>(args.seed) + static_cast<std::uint64_t>(i);
            wflow::GridModel grid;
            try {
                grid = wflow::oracle::random_radial_grid(seed);
            } catch (const std::exception& e) {
                std::cerr << "error generating grid seed " << seed << ": " << e.what() << "\n";
                return kExitInputError;
            }
            code = std::max(code, check_one(grid, args.tol, "seed " + std::to_string(seed)));
        }
    } else {
        wflow::GridModel grid;
        try {
            grid = load_grid(args.grid_dir, args.ties, args.alpha_override);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitInputError;
        }
        code = check_one(grid, args.tol, args.grid_dir);
    }
    std::cout << (code == kExitOk ? "all certificates passed" : "CHECK FAILED") << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex-domain load-flow solver for power distribution grids"};
    app.require_subcommand(1);

    SolveArgs sargs;
    CLI::App* solve = app.add_subcommand("solve", "run a load flow and report the solution");
    solve->add_option("--grid", sargs.grid_dir, "grid directory (branches.csv, loads.csv[, ties.csv])")
        ->required();
    solve->add_option("--model", sargs.model, "load model")->check(CLI::IsMember({"cp", "zip"}));
    solve->add_option("--tol", sargs.tol, "convergence tolerance, pu");
    solve->add_option("--max-iter", sargs.max_iter, "iteration cap");
    solve->add_option("--ties", sargs.ties, "tie-line mode")->check(CLI::IsMember({"open", "closed"}));
    solve->add_option("--norm", sargs.norm, "mismatch norm")->check(CLI::IsMember({"inf", "l2"}));
    solve->add_option("--output", sargs.output, "write a JSON report to this path");
    solve->add_flag("--deterministic", sargs.deterministic,
                    "exclude wall-clock timings from the JSON report");
    solve->add_option("--alpha-override", sargs.alpha_override,
                      "uniform voltage exponent applied to every load");

    CheckArgs cargs;
    CLI::App* check = app.add_subcommand(
        "check", "cross-validate Newton against the fixed-point reference solver");
    check->add_option("--grid", cargs.grid_dir, "grid directory");
    check->add_option("--ties", cargs.ties, "tie-line mode")->check(CLI::IsMember({"open", "closed"}));
    check->add_option("--tol", cargs.tol, "Newton tolerance used for the certificates");
    check->add_option("--random", cargs.random_count, "check N seeded random radial grids");
    check->add_option("--seed", cargs.seed, "base seed for --random");
    check->add_option("--alpha-override", cargs.alpha_override,
                      "uniform voltage exponent applied to every load");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) return run_solve(sargs);
    if (check->parsed()) {
        if (cargs.grid_dir.empty() && cargs.random_count <= 0) {
            std::cerr << "error: check needs --grid or --random\n";
            return kExitInputError;
        }
        return run_check(cargs);
    }
    return kExitInputError;
}
