#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fleetgrid/lp_model.hpp"
#include "fleetgrid/mps.hpp"
#include "fleetgrid/solver.hpp"
#include "support/builders.hpp"

using namespace fleetgrid;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "fleetgrid-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("model construction rejects bad input") {
    LpModel m;
    auto x = m.add_variable("x", 0.0, 1.0);
    CHECK_THROWS(m.add_variable("x"));
    CHECK_THROWS(m.add_variable("y", 2.0, 1.0));
    auto r = m.add_row("r", RowSense::le, 1.0);
    CHECK_THROWS(m.add_row("r", RowSense::eq, 0.0));
    CHECK_THROWS(m.add_coef(r, x, std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("feasibility check flags exactly the broken rows") {
    LpModel m;
    auto x = m.add_variable("x", 0.0, 10.0);
    auto y = m.add_variable("y", 0.0, 10.0);
    auto r1 = m.add_row("r1", RowSense::eq, 3.0);
    m.add_coef(r1, x, 1.0);
    m.add_coef(r1, y, 1.0);
    auto r2 = m.add_row("r2", RowSense::le, 5.0);
    m.add_coef(r2, x, 2.0);

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.values = {1.0, 2.0};
    auto ok = check_feasibility(m, sol);
    CHECK(ok.pass);
    CHECK(ok.max_residual == 0.0);

    sol.values = {1.0, 2.001};
    auto bad = check_feasibility(m, sol, 1e-6);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.row_violations.size() == 1);
    CHECK(bad.row_violations[0].name == "r1");
    CHECK(bad.row_violations[0].residual == doctest::Approx(0.001));
}

TEST_CASE("feasibility audit matches a direct residual recomputation on random models") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int round = 0; round < 25; ++round) {
        LpModel m;
        const int nv = 1 + static_cast<int>(rng() % 6);
        const int nr = 1 + static_cast<int>(rng() % 6);
        for (int v = 0; v < nv; ++v)
            m.add_variable("v" + std::to_string(v), -5.0, 5.0);
        for (int r = 0; r < nr; ++r) {
            auto row = m.add_row("r" + std::to_string(r),
                                 r % 3 == 0   ? RowSense::eq
                                 : r % 3 == 1 ? RowSense::le
                                              : RowSense::ge,
                                 coef(rng));
            for (int v = 0; v < nv; ++v)
                if (rng() % 2) m.add_coef(row, v, coef(rng));
        }
        m.canonicalize();
        LpSolution sol;
        sol.status = LpStatus::optimal;
        for (int v = 0; v < nv; ++v) sol.values.push_back(coef(rng) * 3.0);
        const double tol = 0.5;
        auto report = check_feasibility(m, sol, tol);
        std::size_t expected = 0;
        for (std::size_t r = 0; r < m.num_rows(); ++r) {
            const auto& row = m.row(static_cast<RowId>(r));
            double lhs = 0.0;
            for (auto& [v, c] : row.coefs) lhs += c * sol.values[static_cast<std::size_t>(v)];
            double viol = row.sense == RowSense::eq   ? std::abs(lhs - row.rhs)
                          : row.sense == RowSense::le ? std::max(0.0, lhs - row.rhs)
                                                      : std::max(0.0, row.rhs - lhs);
            if (viol > tol) ++expected;
        }
        CHECK(report.row_violations.size() == expected);
    }
}

TEST_CASE("single-variable model exports the canonical six-section file") {
    LpModel m;
    m.add_variable("x", 0.0, kInf, 1.0);
    auto tmp = temp_file("one.mps");
    export_mps(m, tmp);
    const std::string expected =
        "NAME          FLEETGRID\n"
        "ROWS\n"
        " N  COST\n"
        "COLUMNS\n"
        "    X0000000  COST      1\n"
        "RHS\n"
        "BOUNDS\n"
        "ENDATA\n";
    CHECK(slurp(tmp) == expected);
}

TEST_CASE("export-import round trip preserves structure, names via sidecar") {
    LpModel m;
    auto x = m.add_variable("fleet.flow.with.a.rather.long.name", 0.0, 4.0, 2.5);
    auto y = m.add_variable("grid.voltage", -kInf, kInf);
    auto z = m.add_variable("fixed", 2.0, 2.0);
    auto r1 = m.add_row("balance.row", RowSense::eq, 1.5);
    m.add_coef(r1, x, 1.0);
    m.add_coef(r1, y, -2.0);
    auto r2 = m.add_row("cap.row", RowSense::le, 7.0);
    m.add_coef(r2, x, 3.0);
    m.add_coef(r2, z, 1.0);
    auto r3 = m.add_row("floor.row", RowSense::ge, -1.0);
    m.add_coef(r3, y, 1.0);

    auto tmp = temp_file("roundtrip.mps");
    export_mps(m, tmp);
    auto back = import_mps(tmp);
    CHECK(back.structurally_equal(m, 1e-12));
    CHECK(back.variable(0).name == "fleet.flow.with.a.rather.long.name");

    SUBCASE("byte-identical re-export") {
        auto tmp2 = temp_file("roundtrip2.mps");
        export_mps(m, tmp2);
        CHECK(slurp(tmp) == slurp(tmp2));
    }
}

TEST_CASE("a million-variable model survives the round trip") {
    LpModel m;
    const std::size_t n = 1'000'000;
    for (std::size_t v = 0; v < n; ++v)
        m.add_variable("x" + std::to_string(v), 0.0, kInf, 1.0);
    auto r = m.add_row("sum", RowSense::ge, 1.0);
    for (std::size_t v = 0; v < n; v += 1000) m.add_coef(r, static_cast<VarId>(v), 1.0);
    auto tmp = temp_file("big.mps");
    export_mps(m, tmp);
    auto back = import_mps(tmp);
    CHECK(back.num_variables() == n);
    CHECK(back.structurally_equal(m, 0.0));
    std::filesystem::remove(tmp);
    std::filesystem::remove(tmp.string() + ".names");
}

TEST_CASE("external solver adapter solves, reports infeasibility, and audits") {
    ExternalMpsSolver adapter(fleetgrid::testing::solver_command());
    SUBCASE("min x subject to x >= 3") {
        LpModel m;
        auto x = m.add_variable("x", 0.0, kInf, 1.0);
        auto r = m.add_row("floor", RowSense::ge, 3.0);
        m.add_coef(r, x, 1.0);
        auto sol = solve(m, adapter);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.values[0] == doctest::Approx(3.0));
        CHECK(sol.objective == doctest::Approx(3.0));
    }
    SUBCASE("contradictory constraints are infeasible") {
        LpModel m;
        auto x = m.add_variable("x", 0.0, 1.0);
        auto r = m.add_row("impossible", RowSense::ge, 2.0);
        m.add_coef(r, x, 1.0);
        auto sol = solve(m, adapter);
        CHECK(sol.status == LpStatus::infeasible);
    }
    SUBCASE("degenerate flat objective still passes the audit") {
        LpModel m;
        auto x = m.add_variable("x", 0.0, 1.0, 0.0);
        auto y = m.add_variable("y", 0.0, 1.0, 0.0);
        auto r = m.add_row("tie", RowSense::le, 1.5);
        m.add_coef(r, x, 1.0);
        m.add_coef(r, y, 1.0);
        auto sol = solve(m, adapter);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(check_feasibility(m, sol).pass);
    }
    SUBCASE("free and negative variables survive the MPS bounds encoding") {
        LpModel m;
        auto x = m.add_variable("x", -kInf, kInf, 1.0);
        m.add_variable("y", -5.0, -2.0, 1.0);
        auto r = m.add_row("anchor", RowSense::ge, -4.0);
        m.add_coef(r, x, 1.0);
        auto sol = solve(m, adapter);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.values[0] == doctest::Approx(-4.0));
        CHECK(sol.values[1] == doctest::Approx(-5.0));
    }
}
