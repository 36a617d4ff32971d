#include "wflow/report.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace wflow {

namespace {

double angle_deg(Complex v) {
    double deg = std::arg(v) * 180.0 / std::numbers::pi;
    if (deg <= -180.0) deg += 360.0;  // keep within (-180, 180]
    return deg;
}

}  // namespace

RunReport make_report(const GridModel& grid, const SolverConfig& cfg, const SolveResult& result,
                      const std::string& ties_mode, double solve_time_ms, bool deterministic) {
    RunReport r;
    r.grid = {grid.n + 1, grid.branches_total, grid.branches_in_service, ties_mode};
    r.config = {to_string(cfg.model), cfg.tolerance, cfg.max_iterations, to_string(cfg.norm)};
    r.converged = result.converged;
    for (const auto& it : result.iterations)
        r.iterations.push_back({it.index, it.mismatch_norm, it.step_norm});
    r.voltages.push_back({0, std::abs(grid.v0), angle_deg(grid.v0)});
    for (int k = 0; k < grid.n; ++k)
        r.voltages.push_back({k + 1, std::abs(result.V_N[k]), angle_deg(result.V_N[k])});
    r.s_loss = result.S_loss;
    r.slack_injection = result.slack_injection;
    r.solve_time_ms = solve_time_ms;
    r.deterministic = deterministic;
    return r;
}

std::string to_json_string(const RunReport& report, int indent) {
    nlohmann::json j;
    j["grid"] = {{"nodes", report.grid.nodes},
                 {"branches_total", report.grid.branches_total},
                 {"branches_in_service", report.grid.branches_in_service},
                 {"ties", report.grid.ties}};
    j["config"] = {{"model", report.config.model},
                   {"tolerance", report.config.tolerance},
                   {"max_iterations", report.config.max_iterations},
                   {"norm", report.config.norm}};
    j["converged"] = report.converged;
    j["iterations"] = nlohmann::json::array();
    for (const auto& it : report.iterations)
        j["iterations"].push_back({{"index", it.index},
                                   {"mismatch_norm", it.mismatch_norm},
                                   {"step_norm", it.step_norm}});
    j["voltages"] = nlohmann::json::array();
    for (const auto& v : report.voltages)
        j["voltages"].push_back(
            {{"node", v.node}, {"magnitude_pu", v.magnitude_pu}, {"angle_deg", v.angle_deg}});
    j["s_loss"] = {{"p", report.s_loss.real()}, {"q", report.s_loss.imag()}};
    j["slack_injection"] = {{"p", report.slack_injection.real()},
                            {"q", report.slack_injection.imag()}};
    if (!report.deterministic) j["solve_time_ms"] = report.solve_time_ms;
    return j.dump(indent) + "\n";
}

RunReport report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunReport r;
    r.grid = {j.at("grid").at("nodes"), j.at("grid").at("branches_total"),
              j.at("grid").at("branches_in_service"), j.at("grid").at("ties")};
    r.config = {j.at("config").at("model"), j.at("config").at("tolerance"),
                j.at("config").at("max_iterations"), j.at("config").at("norm")};
    r.converged = j.at("converged");
    for (const auto& it : j.at("iterations"))
        r.iterations.push_back({it.at("index"), it.at("mismatch_norm"), it.at("step_norm")});
    for (const auto& v : j.at("voltages"))
        r.voltages.push_back({v.at("node"), v.at("magnitude_pu"), v.at("angle_deg")});
    r.s_loss = {j.at("s_loss").at("p"), j.at("s_loss").at("q")};
    r.slack_injection = {j.at("slack_injection").at("p"), j.at("slack_injection").at("q")};
    if (j.contains("solve_time_ms")) {
        r.solve_time_ms = j.at("solve_time_ms");
    } else {
        r.deterministic = true;
    }
    return r;
}

std::string render_table(const RunReport& report) {
    std::ostringstream os;
    os << "grid: " << report.grid.nodes << " nodes, " << report.grid.branches_in_service << "/"
       << report.grid.branches_total << " branches in service, ties " << report.grid.ties << "\n";
    os << "model " << report.config.model << ", tol " << report.config.tolerance << ", norm "
       << report.config.norm << "\n\n";

    os << "  it   " << std::setw(14) << "mismatch" << std::setw(14) << "step\n";
    os << std::scientific << std::setprecision(4);
    for (const auto& it : report.iterations)
        os << std::setw(4) << it.index << "   " << std::setw(14) << it.mismatch_norm
           << std::setw(14) << it.step_norm << "\n";
    os << "\n"
       << (report.converged ? "converged" : "NOT converged, iteration cap reached") << " after "
       << (report.iterations.empty() ? 0 : report.iterations.back().index) << " iterations\n\n";

    os << std::fixed << std::setprecision(6);
    os << "  node   |v| (pu)   angle (deg)\n";
    bool flagged = false;
    for (const auto& v : report.voltages) {
        os << std::setw(6) << v.node << "   " << std::setw(8) << v.magnitude_pu << "   "
           << std::setw(11) << std::setprecision(4) << v.angle_deg << std::setprecision(6);
        if (report.converged && (v.magnitude_pu < 0.0 || v.magnitude_pu > 2.0)) {
            os << "   ** outside [0,2] pu sanity bound";
            flagged = true;
        }
        os << "\n";
    }
    os << "\n";
    if (flagged) os << "WARNING: voltage magnitudes outside the [0,2] pu sanity bound\n";
    os << std::setprecision(6) << "S_loss          = " << report.s_loss.real() << " + j"
       << report.s_loss.imag() << " pu\n";
    os << "slack injection = " << report.slack_injection.real() << " + j"
       << report.slack_injection.imag() << " pu\n";
    if (!report.deterministic)
        os << "solve time      = " << std::setprecision(3) << report.solve_time_ms << " ms\n";
    return os.str();
}

}  // namespace wflow
