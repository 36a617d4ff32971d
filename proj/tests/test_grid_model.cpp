#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "wflow/errors.hpp"
#include "wflow/grid_model.hpp"

using namespace wflow;
namespace fs = std::filesystem;

namespace {

const fs::path kIeee69 = fs::path(WFLOW_DATA_DIR) / "ieee69";

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

fs::path two_bus_branches() {
    return write_temp("tb_branches.csv",
                      "from,to,r_pu,x_pu,b_pu,in_service\n"
                      "0,1,0,0.1,0,1\n");
}

fs::path two_bus_loads() {
    return write_temp("tb_loads.csv",
                      "node,p_pu,q_pu,alpha\n"
                      "1,0.1,0.05,0\n");
}

}  // namespace

TEST_CASE("two-bus parse: admittance blocks and load sign") {
    const GridModel g = parse_grid(two_bus_branches(), two_bus_loads());
    CHECK(g.n == 1);
    CHECK(g.v0 == Complex{1.0, 0.0});
    // y = 1/(0.1j) = -10j
    CHECK(g.Y_NN.coeff(0, 0) == Complex{0.0, -10.0});
    CHECK(g.Y_N0[0] == Complex{0.0, 10.0});
    // loads are consumption-positive in the file, injections internally
    CHECK(g.S_N[0] == Complex{-0.1, -0.05});
    CHECK(g.alpha[0] == 0.0);
}

TEST_CASE("build_ybus: single unit branch") {
    std::vector<BranchRecord> br{{0, 1, {1.0, 0.0}, {0.0, 0.0}, true}};
    const auto Y = build_ybus(br, 2);
    CHECK(Y.coeff(0, 0) == Complex{1.0, 0.0});
    CHECK(Y.coeff(1, 1) == Complex{1.0, 0.0});
    CHECK(Y.coeff(0, 1) == Complex{-1.0, 0.0});
    CHECK(Y.coeff(1, 0) == Complex{-1.0, 0.0});
}

TEST_CASE("build_ybus: half-shunt split") {
    std::vector<BranchRecord> br{{0, 1, {1.0, 0.0}, {0.0, 0.2}, true}};
    const auto Y = build_ybus(br, 2);
    CHECK(Y.coeff(0, 0) == Complex{1.0, 0.1});
    CHECK(Y.coeff(1, 1) == Complex{1.0, 0.1});
    CHECK(Y.coeff(0, 1) == Complex{-1.0, 0.0});
}

TEST_CASE("partition: 2-bus and 3-bus chain") {
    std::vector<BranchRecord> br{{0, 1, {1.0, 0.0}, {}, true}};
    auto [Ynn, Yn0] = partition(build_ybus(br, 2), 0);
    CHECK(Ynn.coeff(0, 0) == Complex{1.0, 0.0});
    CHECK(Yn0[0] == Complex{-1.0, 0.0});

    std::vector<BranchRecord> chain{{0, 1, {1.0, 0.0}, {}, true}, {1, 2, {1.0, 0.0}, {}, true}};
    auto [Ynn3, Yn03] = partition(build_ybus(chain, 3), 0);
    CHECK(Ynn3.coeff(0, 0) == Complex{2.0, 0.0});
    CHECK(Ynn3.coeff(0, 1) == Complex{-1.0, 0.0});
    CHECK(Ynn3.coeff(1, 0) == Complex{-1.0, 0.0});
    CHECK(Ynn3.coeff(1, 1) == Complex{1.0, 0.0});
    CHECK(Yn03[0] == Complex{-1.0, 0.0});
    CHECK(Yn03[1] == Complex{0.0, 0.0});
}

TEST_CASE("ieee69: counts, pattern, tie toggling") {
    const GridInputs inputs = read_grid_dir(kIeee69);
    CHECK(inputs.node_count == 69);
    CHECK(inputs.branches.size() == 73);
    CHECK(inputs.ties.size() == 5);

    const GridModel radial = set_tie_lines(inputs, TieMode::Open);
    CHECK(radial.n == 68);
    CHECK(radial.branches_in_service == 68);
    CHECK(radial.branches_total == 73);

    const GridModel meshed = set_tie_lines(inputs, TieMode::Closed);
    CHECK(meshed.n == 68);
    CHECK(meshed.branches_in_service == 73);

    // zero/nonzero pattern of Y_full == branch incidence
    std::set<std::pair<int, int>> incident;
    for (const auto& b : inputs.branches) {
        if (!b.in_service) continue;
        incident.insert({b.from_node, b.to_node});
        incident.insert({b.to_node, b.from_node});
    }
    int offdiag = 0, diag = 0;
    for (int col = 0; col < radial.Y_full.outerSize(); ++col)
        for (SparseComplexMatrix::InnerIterator it(radial.Y_full, col); it; ++it) {
            if (it.row() == it.col()) {
                ++diag;
            } else {
                ++offdiag;
                CHECK(incident.count({static_cast<int>(it.row()), static_cast<int>(it.col())}) == 1);
            }
        }
    CHECK(offdiag == 2 * 68);
    CHECK(diag == 69);
}

TEST_CASE("ieee69: partition-reassembly round trip is bit exact") {
    const GridModel g = build_grid(read_grid_dir(kIeee69));
    int covered = 0;
    for (int col = 0; col < g.Y_NN.outerSize(); ++col)
        for (SparseComplexMatrix::InnerIterator it(g.Y_NN, col); it; ++it) {
            CHECK(it.value() == g.Y_full.coeff(it.row() + 1, it.col() + 1));
            ++covered;
        }
    for (int k = 0; k < g.n; ++k)
        if (g.Y_N0[k] != Complex{0.0, 0.0}) {
            CHECK(g.Y_N0[k] == g.Y_full.coeff(k + 1, 0));
            // grid has no phase shifters: slack row mirrors the slack column
            CHECK(g.Y_N0[k] == g.Y_full.coeff(0, k + 1));
            covered += 2;
        }
    CHECK(covered + 1 == g.Y_full.nonZeros());  // +1 for Y00
}

TEST_CASE("ieee69: symmetry and zero row sums") {
    const GridModel g = build_grid(read_grid_dir(kIeee69));
    for (int col = 0; col < g.Y_full.outerSize(); ++col)
        for (SparseComplexMatrix::InnerIterator it(g.Y_full, col); it; ++it)
            CHECK(it.value() == g.Y_full.coeff(it.col(), it.row()));

    // no shunts in this feeder: every row sums to zero
    ComplexVector ones = ComplexVector::Constant(69, Complex{1.0, 0.0});
    ComplexVector row_sums = g.Y_full * ones;
    CHECK(row_sums.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("per-unit consistency: impedance scaling inverts Y") {
    GridInputs gi = read_grid_dir(kIeee69);
    const GridModel base = build_grid(gi);
    for (const Complex c : {Complex{1.7, 0.0}, Complex{1.3, -0.4}}) {
        GridInputs scaled = gi;
        for (auto& b : scaled.branches) {
            b.series_impedance *= c;
            b.shunt_admittance_total /= c;
        }
        const GridModel g2 = build_grid(scaled);
        for (int col = 0; col < base.Y_full.outerSize(); ++col)
            for (SparseComplexMatrix::InnerIterator it(base.Y_full, col); it; ++it) {
                const Complex want = it.value() / c;
                const Complex got = g2.Y_full.coeff(it.row(), it.col());
                CHECK(std::abs(got - want) <= 1e-14 * std::abs(want));
            }
    }
}

TEST_CASE("radial grid: removing any in-service branch disconnects it") {
    GridInputs gi = read_grid_dir(kIeee69);
    int checked = 0;
    for (std::size_t i = 0; i < gi.branches.size(); ++i) {
        if (!gi.branches[i].in_service) continue;
        GridInputs cut = gi;
        cut.branches[i].in_service = false;
        CHECK_THROWS_AS((void)build_grid(cut), ConnectivityError);
        ++checked;
    }
    CHECK(checked == 68);
}

TEST_CASE("set_tie_lines: no ties is a no-op") {
    GridInputs gi = read_grid_inputs(two_bus_branches(), two_bus_loads(), std::nullopt);
    const GridModel a = set_tie_lines(gi, TieMode::Open);
    const GridModel b = set_tie_lines(gi, TieMode::Closed);
    CHECK(a.branches_in_service == b.branches_in_service);
    CHECK(a.Y_NN.coeff(0, 0) == b.Y_NN.coeff(0, 0));
}

TEST_CASE("set_tie_lines: unknown tie pair") {
    GridInputs gi = read_grid_inputs(two_bus_branches(), two_bus_loads(), std::nullopt);
    gi.ties.push_back({0, 7});
    CHECK_THROWS_AS((void)set_tie_lines(gi, TieMode::Closed), UnknownTieError);
}

TEST_CASE("parse errors carry file and line") {
    const auto bad = write_temp("bad_branches.csv",
                                "from,to,r_pu,x_pu,b_pu,in_service\n"
                                "0,1,0.0,0.1,0,1\n"
                                "1,2,oops,0.1,0,1\n");
    try {
        (void)read_branches(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
}

TEST_CASE("parse rejections") {
    const std::string header = "from,to,r_pu,x_pu,b_pu,in_service\n";
    CHECK_THROWS_AS((void)read_branches(write_temp("b1.csv", header + "1,1,0.1,0,0,1\n")),
                    ParseError);  // self loop
    CHECK_THROWS_AS((void)read_branches(write_temp("b2.csv", header + "0,1,0,0,0,1\n")),
                    ParseError);  // zero impedance
    CHECK_THROWS_AS((void)read_branches(write_temp("b3.csv", header + "0,1,0.1,0,0\n")),
                    ParseError);  // short row
    CHECK_THROWS_AS((void)read_branches(write_temp("b4.csv", "a,b\n0,1,0.1,0,0,1\n")),
                    ParseError);  // wrong header

    // duplicate branch pair, regardless of direction
    const auto dup = write_temp("b5.csv", header + "0,1,0.1,0,0,1\n1,0,0.2,0,0,1\n");
    CHECK_THROWS_WITH_AS((void)read_grid_inputs(dup, two_bus_loads(), std::nullopt),
                         doctest::Contains("duplicate branch"), Error);
}

TEST_CASE("load validation") {
    const auto branches = two_bus_branches();
    CHECK_THROWS_WITH_AS(
        (void)read_grid_inputs(branches,
                               write_temp("l1.csv", "node,p_pu,q_pu,alpha\n0,0.1,0,0\n"),
                               std::nullopt),
        doctest::Contains("slack"), Error);
    CHECK_THROWS_WITH_AS(
        (void)read_grid_inputs(branches,
                               write_temp("l2.csv", "node,p_pu,q_pu,alpha\n1,0.1,0,0\n1,0.2,0,0\n"),
                               std::nullopt),
        doctest::Contains("duplicate load"), Error);
    CHECK_THROWS_WITH_AS(
        (void)read_grid_inputs(branches,
                               write_temp("l3.csv", "node,p_pu,q_pu,alpha\n5,0.1,0,0\n"),
                               std::nullopt),
        doctest::Contains("not present"), Error);
}

TEST_CASE("alpha outside [0,2] warns but does not reject") {
    const auto gi = read_grid_inputs(
        two_bus_branches(), write_temp("l4.csv", "node,p_pu,q_pu,alpha\n1,0.1,0,2.5\n"),
        std::nullopt);
    CHECK(gi.warnings.size() == 1);
    CHECK(gi.loads[0].exponent == 2.5);
}

TEST_CASE("missing load rows default to zero power") {
    const auto g = parse_grid(write_temp("b6.csv",
                                         "from,to,r_pu,x_pu,b_pu,in_service\n"
                                         "0,1,0.1,0,0,1\n"
                                         "1,2,0.1,0,0,1\n"),
                              two_bus_loads());
    CHECK(g.n == 2);
    CHECK(g.S_N[0] == Complex{-0.1, -0.05});
    CHECK(g.S_N[1] == Complex{0.0, 0.0});
}

TEST_CASE("disconnected node is named") {
    const auto b = write_temp("b7.csv",
                              "from,to,r_pu,x_pu,b_pu,in_service\n"
                              "0,1,0.1,0,0,1\n"
                              "2,3,0.1,0,0,1\n");
    try {
        (void)parse_grid(b, two_bus_loads());
        FAIL("expected ConnectivityError");
    } catch (const ConnectivityError& e) {
        CHECK(e.node == 2);
    }
}

TEST_CASE("slack remap option") {
    // same 2-bus grid but with the slack written as id 1
    const auto b = write_temp("b8.csv",
                              "from,to,r_pu,x_pu,b_pu,in_service\n"
                              "1,0,0,0.1,0,1\n");
    const auto l = write_temp("l8.csv", "node,p_pu,q_pu,alpha\n0,0.1,0.05,0\n");
    IngestionOptions opt;
    opt.slack_id = 1;
    const GridModel g = parse_grid(b, l, opt);
    CHECK(g.n == 1);
    CHECK(g.Y_NN.coeff(0, 0) == Complex{0.0, -10.0});
    CHECK(g.S_N[0] == Complex{-0.1, -0.05});
}

TEST_CASE("with_uniform_alpha") {
    const GridModel g = with_uniform_alpha(parse_grid(two_bus_branches(), two_bus_loads()), 1.5);
    CHECK(g.alpha[0] == 1.5);
}
