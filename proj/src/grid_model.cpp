#include "wflow/grid_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "wflow/errors.hpp"

namespace wflow {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding blanks
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& file, int line) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(file, line, "expected a number, got '" + s + "'");
    return value;
}

int parse_int(const std::string& s, const std::string& file, int line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(file, line, "expected an integer, got '" + s + "'");
    return value;
}

void expect_header(const std::string& got, const std::string& want,
                   const std::string& file) {
    auto fields = split_csv_line(got);
    auto wanted = split_csv_line(want);
    if (fields != wanted)
        throw ParseError(file, 1, "bad header, expected '" + want + "'");
}

std::ifstream open_or_throw(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    return in;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::vector<BranchRecord> read_branches(const std::filesystem::path& file) {
    auto in = open_or_throw(file);
    const std::string fname = file.string();
    std::string line;
    std::getline(in, line);
    expect_header(line, "from,to,r_pu,x_pu,b_pu,in_service", fname);

    std::vector<BranchRecord> branches;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto f = split_csv_line(line);
        if (f.size() != 6) throw ParseError(fname, lineno, "expected 6 fields");
        BranchRecord b;
        b.from_node = parse_int(f[0], fname, lineno);
        b.to_node = parse_int(f[1], fname, lineno);
        b.series_impedance = {parse_double(f[2], fname, lineno), parse_double(f[3], fname, lineno)};
        b.shunt_admittance_total = {0.0, parse_double(f[4], fname, lineno)};
        const int svc = parse_int(f[5], fname, lineno);
        if (svc != 0 && svc != 1) throw ParseError(fname, lineno, "in_service must be 0 or 1");
        b.in_service = svc == 1;
        if (b.from_node == b.to_node)
            throw ParseError(fname, lineno, "branch endpoints coincide");
        if (b.from_node < 0 || b.to_node < 0)
            throw ParseError(fname, lineno, "negative node id");
        if (b.series_impedance == Complex{0.0, 0.0})
            throw ParseError(fname, lineno, "zero series impedance");
        branches.push_back(b);
    }
    return branches;
}

std::vector<LoadRecord> read_loads(const std::filesystem::path& file,
                                   std::vector<std::string>* warnings) {
    auto in = open_or_throw(file);
    const std::string fname = file.string();
    std::string line;
    std::getline(in, line);
    expect_header(line, "node,p_pu,q_pu,alpha", fname);

    std::vector<LoadRecord> loads;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4) throw ParseError(fname, lineno, "expected 4 fields");
        LoadRecord l;
        l.node = parse_int(f[0], fname, lineno);
        l.power = {parse_double(f[1], fname, lineno), parse_double(f[2], fname, lineno)};
        l.exponent = parse_double(f[3], fname, lineno);
        if (l.node < 0) throw ParseError(fname, lineno, "negative node id");
        if ((l.exponent < 0.0 || l.exponent > 2.0) && warnings)
            warnings->push_back(fname + ":" + std::to_string(lineno) +
                                ": exponent " + f[3] + " outside [0, 2]");
        loads.push_back(l);
    }
    return loads;
}

std::vector<TiePair> read_ties(const std::filesystem::path& file) {
    auto in = open_or_throw(file);
    const std::string fname = file.string();
    std::string line;
    std::getline(in, line);
    expect_header(line, "from,to", fname);

    std::vector<TiePair> ties;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto f = split_csv_line(line);
        if (f.size() != 2) throw ParseError(fname, lineno, "expected 2 fields");
        ties.push_back({parse_int(f[0], fname, lineno), parse_int(f[1], fname, lineno)});
    }
    return ties;
}

namespace {

// File ids -> internal ids with the slack at 0: the slack swaps toward the
// front, every id below it shifts up by one, the rest stay put.
int remap_id(int id, int slack_id) {
    if (id == slack_id) return 0;
    return id < slack_id ? id + 1 : id;
}

}  // namespace

GridInputs read_grid_inputs(const std::filesystem::path& branch_file,
                            const std::filesystem::path& load_file,
                            const std::optional<std::filesystem::path>& tie_file,
                            const IngestionOptions& options) {
    GridInputs gi;
    gi.v0 = options.slack_voltage;
    gi.branches = read_branches(branch_file);
    gi.loads = read_loads(load_file, &gi.warnings);
    if (tie_file) gi.ties = read_ties(*tie_file);

    if (options.slack_id != 0) {
        for (auto& b : gi.branches) {
            b.from_node = remap_id(b.from_node, options.slack_id);
            b.to_node = remap_id(b.to_node, options.slack_id);
        }
        for (auto& l : gi.loads) l.node = remap_id(l.node, options.slack_id);
        for (auto& t : gi.ties) {
            t.from_node = remap_id(t.from_node, options.slack_id);
            t.to_node = remap_id(t.to_node, options.slack_id);
        }
    }

    int max_id = 0;
    for (const auto& b : gi.branches) max_id = std::max({max_id, b.from_node, b.to_node});
    gi.node_count = max_id + 1;

    std::set<std::pair<int, int>> seen;
    for (const auto& b : gi.branches) {
        auto key = std::minmax(b.from_node, b.to_node);
        if (!seen.insert(key).second)
            throw Error(branch_file.string() + ": duplicate branch " +
                        std::to_string(b.from_node) + "-" + std::to_string(b.to_node));
    }

    std::set<int> load_nodes;
    for (const auto& l : gi.loads) {
        if (l.node == 0)
            throw Error(load_file.string() + ": load assigned to the slack node");
        if (l.node >= gi.node_count)
            throw Error(load_file.string() + ": load node " + std::to_string(l.node) +
                        " not present in the branch list");
        if (!load_nodes.insert(l.node).second)
            throw Error(load_file.string() + ": duplicate load row for node " +
                        std::to_string(l.node));
    }
    return gi;
}

SparseComplexMatrix build_ybus(const std::vector<BranchRecord>& branches, int node_count) {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(branches.size() * 4);
    for (const auto& b : branches) {
        if (!b.in_service) continue;
        const Complex y = Complex{1.0, 0.0} / b.series_impedance;
        const Complex half_shunt = 0.5 * b.shunt_admittance_total;
        trip.emplace_back(b.from_node, b.from_node, y + half_shunt);
        trip.emplace_back(b.to_node, b.to_node, y + half_shunt);
        trip.emplace_back(b.from_node, b.to_node, -y);
        trip.emplace_back(b.to_node, b.from_node, -y);
    }
    SparseComplexMatrix Y(node_count, node_count);
    Y.setFromTriplets(trip.begin(), trip.end());
    return Y;
}

std::pair<SparseComplexMatrix, ComplexVector> partition(const SparseComplexMatrix& Y_full,
                                                        int slack) {
    const int n = static_cast<int>(Y_full.rows()) - 1;
    ComplexVector Y_N0 = ComplexVector::Zero(n);
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(Y_full.nonZeros());
    for (int col = 0; col < Y_full.outerSize(); ++col) {
        for (SparseComplexMatrix::InnerIterator it(Y_full, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (r == slack && c == slack) continue;
            const int ri = r < slack ? r : r - 1;
            const int ci = c < slack ? c : c - 1;
            if (c == slack) {
                Y_N0[ri] = it.value();
            } else if (r != slack) {
                trip.emplace_back(ri, ci, it.value());
            }
        }
    }
    SparseComplexMatrix Y_NN(n, n);
    Y_NN.setFromTriplets(trip.begin(), trip.end());
    return {std::move(Y_NN), std::move(Y_N0)};
}

namespace {

void check_connectivity(const GridInputs& gi) {
    std::vector<std::vector<int>> adj(gi.node_count);
    for (const auto& b : gi.branches) {
        if (!b.in_service) continue;
        adj[b.from_node].push_back(b.to_node);
        adj[b.to_node].push_back(b.from_node);
    }
    std::vector<char> seen(gi.node_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    for (int k = 0; k < gi.node_count; ++k)
        if (!seen[k])
            throw ConnectivityError(k, "node " + std::to_string(k) +
                                           " has no in-service path to the slack");
}

}  // namespace

GridModel build_grid(const GridInputs& inputs) {
    check_connectivity(inputs);

    GridModel g;
    g.n = inputs.node_count - 1;
    g.v0 = inputs.v0;
    g.Y_full = build_ybus(inputs.branches, inputs.node_count);
    std::tie(g.Y_NN, g.Y_N0) = partition(g.Y_full, 0);
    g.S_N = ComplexVector::Zero(g.n);
    g.alpha = RealVector::Zero(g.n);
    for (const auto& l : inputs.loads) {
        g.S_N[l.node - 1] = -l.power;  // consumption-positive file, injection internally
        g.alpha[l.node - 1] = l.exponent;
    }
    g.branches_total = static_cast<int>(inputs.branches.size());
    g.branches_in_service = static_cast<int>(
        std::count_if(inputs.branches.begin(), inputs.branches.end(),
                      [](const BranchRecord& b) { return b.in_service; }));
    return g;
}

GridModel parse_grid(const std::filesystem::path& branch_file,
                     const std::filesystem::path& load_file, const IngestionOptions& options) {
    return build_grid(read_grid_inputs(branch_file, load_file, std::nullopt, options));
}

GridModel set_tie_lines(const GridInputs& inputs, TieMode mode) {
    GridInputs gi = inputs;
    for (const auto& t : gi.ties) {
        auto it = std::find_if(gi.branches.begin(), gi.branches.end(), [&](const BranchRecord& b) {
            return (b.from_node == t.from_node && b.to_node == t.to_node) ||
                   (b.from_node == t.to_node && b.to_node == t.from_node);
        });
        if (it == gi.branches.end())
            throw UnknownTieError("tie branch " + std::to_string(t.from_node) + "-" +
                                  std::to_string(t.to_node) + " not found among the branches");
        it->in_service = mode == TieMode::Closed;
    }
    return build_grid(gi);
}

GridInputs read_grid_dir(const std::filesystem::path& dir, const IngestionOptions& options) {
    const auto ties = dir / "ties.csv";
    std::optional<std::filesystem::path> tie_file;
    if (std::filesystem::exists(ties)) tie_file = ties;
    return read_grid_inputs(dir / "branches.csv", dir / "loads.csv", tie_file, options);
}

GridModel with_uniform_alpha(GridModel grid, double alpha) {
    grid.alpha.setConstant(alpha);
    return grid;
}

}  // namespace wflow
