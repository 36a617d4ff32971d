#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wflow/types.hpp"

namespace wflow {

/// One series branch of the network, per-unit. Shunt admittance is the total
/// for the branch and is split half-half between the terminals (pi model).
struct BranchRecord {
    int from_node = 0;  // 0 = slack by file convention
    int to_node = 0;
    Complex series_impedance;
    Complex shunt_admittance_total;
    bool in_service = true;
};

/// Scheduled load at a node. Power is consumption-positive: a negative real
/// part models distributed generation. exponent is the voltage exponent of
/// the load magnitude (0 constant power, 1 constant current, 2 constant impedance).
struct LoadRecord {
    int node = 0;
    Complex power;
    double exponent = 0.0;
};

struct TiePair {
    int from_node = 0;
    int to_node = 0;
};

struct IngestionOptions {
    int slack_id = 0;            // file id of the slack node; remapped to 0 internally
    Complex slack_voltage{1.0, 0.0};
};

/// Raw parsed grid description, before admittance assembly. Mutable precursor
/// of GridModel: tie toggling and alpha overrides operate here.
struct GridInputs {
    int node_count = 0;  // including slack
    Complex v0{1.0, 0.0};
    std::vector<BranchRecord> branches;
    std::vector<LoadRecord> loads;
    std::vector<TiePair> ties;
    std::vector<std::string> warnings;
};

/// Immutable network model. S_N holds net complex power *injections* at the
/// non-slack nodes (loads.csv rows are consumption-positive, so a load p+jq
/// enters as -(p+jq)). Safe to share across threads after construction.
struct GridModel {
    int n = 0;  // non-slack node count
    Complex v0{1.0, 0.0};
    SparseComplexMatrix Y_NN;   // n x n, slack row/column removed
    ComplexVector Y_N0;         // slack column restricted to non-slack rows
    SparseComplexMatrix Y_full; // (n+1) x (n+1)
    ComplexVector S_N;          // injections, pu
    RealVector alpha;           // per-node voltage exponent
    int branches_total = 0;
    int branches_in_service = 0;
};

enum class TieMode { Open, Closed };

/// Standard bus admittance assembly over the in-service branches.
/// Y[k][k] = sum of incident series admittances plus half-shunts,
/// Y[k][m] = -(series admittance of branch k-m).
[[nodiscard]] SparseComplexMatrix build_ybus(const std::vector<BranchRecord>& branches,
                                             int node_count);

/// Split Y_full against the slack row/column: returns (Y_NN, Y_N0).
[[nodiscard]] std::pair<SparseComplexMatrix, ComplexVector> partition(
    const SparseComplexMatrix& Y_full, int slack);

[[nodiscard]] std::vector<BranchRecord> read_branches(const std::filesystem::path& file);
[[nodiscard]] std::vector<LoadRecord> read_loads(const std::filesystem::path& file,
                                                 std::vector<std::string>* warnings = nullptr);
[[nodiscard]] std::vector<TiePair> read_ties(const std::filesystem::path& file);

/// Parse branch/load files (plus an optional tie list) into a GridInputs.
/// Validates ids, duplicates and slack remapping; does not assemble admittances.
[[nodiscard]] GridInputs read_grid_inputs(const std::filesystem::path& branch_file,
                                          const std::filesystem::path& load_file,
                                          const std::optional<std::filesystem::path>& tie_file,
                                          const IngestionOptions& options = {});

/// Assemble the full model from inputs: Ybus, slack partition, load vector,
/// connectivity check. Throws ConnectivityError if an in-service island
/// excludes some node.
[[nodiscard]] GridModel build_grid(const GridInputs& inputs);

/// One-call ingestion: files -> GridModel, as-given service states.
[[nodiscard]] GridModel parse_grid(const std::filesystem::path& branch_file,
                                   const std::filesystem::path& load_file,
                                   const IngestionOptions& options = {});

/// Rebuild with every listed tie branch forced open or closed.
/// Unknown tie pairs (not present among the branches) throw UnknownTieError.
[[nodiscard]] GridModel set_tie_lines(const GridInputs& inputs, TieMode mode);

/// Directory convention: branches.csv + loads.csv + optional ties.csv.
[[nodiscard]] GridInputs read_grid_dir(const std::filesystem::path& dir,
                                       const IngestionOptions& options = {});

/// Copy of `grid` with every node's exponent replaced by `alpha`.
[[nodiscard]] GridModel with_uniform_alpha(GridModel grid, double alpha);

}  // namespace wflow
