#pragma once

#include <string>
#include <vector>

#include "wflow/newton.hpp"
#include "wflow/types.hpp"

namespace wflow {

/// Flat, serialization-friendly run summary for the CLI.
struct RunReport {
    struct GridSummary {
        int nodes = 0;  // including slack
        int branches_total = 0;
        int branches_in_service = 0;
        std::string ties;  // "open" | "closed" | "as-given"
    };
    struct ConfigEcho {
        std::string model;
        double tolerance = 0.0;
        int max_iterations = 0;
        std::string norm;
    };
    struct IterationRow {
        int index = 0;
        double mismatch_norm = 0.0;  // in the configured norm
        double step_norm = 0.0;
    };
    struct VoltageRow {
        int node = 0;
        double magnitude_pu = 0.0;
        double angle_deg = 0.0;  // in (-180, 180]
    };

    GridSummary grid;
    ConfigEcho config;
    bool converged = false;
    std::vector<IterationRow> iterations;
    std::vector<VoltageRow> voltages;  // slack first
    Complex s_loss;
    Complex slack_injection;
    double solve_time_ms = 0.0;
    bool deterministic = false;  // excludes wall-clock from serialization
};

[[nodiscard]] RunReport make_report(const GridModel& grid, const SolverConfig& cfg,
                                    const SolveResult& result, const std::string& ties_mode,
                                    double solve_time_ms, bool deterministic);

[[nodiscard]] std::string to_json_string(const RunReport& report, int indent = 2);
[[nodiscard]] RunReport report_from_json(const std::string& text);

/// Human-readable convergence table and voltage profile.
[[nodiscard]] std::string render_table(const RunReport& report);

}  // namespace wflow
