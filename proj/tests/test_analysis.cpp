#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fleetgrid/analysis.hpp"
#include "support/builders.hpp"

using namespace fleetgrid;
using fleetgrid::testing::bounds_vec;

namespace {

// Hand-built solution with the given per-bus voltage magnitudes on phase a.
Pdn one_bus_feeder(double u_min, double u_max, int n_t) {
    Pdn pdn;
    pdn.id = "v";
    pdn.n_t = n_t;
    Bus ref;
    ref.phases = parse_phases("a");
    ref.u_min = bounds_vec(ref.phases, u_min);
    ref.u_max = bounds_vec(ref.phases, u_max);
    pdn.buses.push_back(ref);
    Bus pq = ref;
    pq.load.assign(static_cast<std::size_t>(n_t), Eigen::VectorXcd::Zero(1));
    pdn.buses.push_back(pq);
    pdn.links.push_back({0, 1, ref.phases, Eigen::MatrixXcd::Identity(1, 1) * 0.01});
    pdn.v_ref.assign(static_cast<std::size_t>(n_t), Eigen::VectorXcd::Ones(1));
    pdn.rating = 10.0;
    pdn.s_base_va = 1e6;
    pdn.price_per_kwh.assign(static_cast<std::size_t>(n_t), 0.1);
    return pdn;
}

PowerFlowSolution fake_solution(const Pdn& pdn, int t, double v_mag, Complex s_ref_sum) {
    PowerFlowSolution sol;
    sol.t = t;
    sol.v.resize(pdn.buses.size());
    sol.v[0] = pdn.v_ref[static_cast<std::size_t>(t - 1)];
    for (std::size_t b = 1; b < pdn.buses.size(); ++b)
        sol.v[b] = Eigen::VectorXcd::Ones(
                       static_cast<Eigen::Index>(pdn.buses[b].phases.size())) *
                   v_mag;
    sol.i.assign(pdn.links.size(), Eigen::VectorXcd::Zero(1));
    sol.s_ref = Eigen::VectorXcd::Ones(1) * s_ref_sum;
    return sol;
}

}  // namespace

TEST_CASE("voltage violation clamp arithmetic") {
    auto pdn = one_bus_feeder(0.96, 1.04, 1);
    SUBCASE("below the band") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 0.95, {0, 0})};
        auto result = voltage_violation_integral(pdn, series, 0.1);
        REQUIRE(result.events.size() == 1);
        CHECK(result.events[0].du_pu == doctest::Approx(-0.01));
        CHECK(result.integral_pu_h == doctest::Approx(0.001));
        CHECK(result.serious_count == 1);
    }
    SUBCASE("inside the band") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 1.0, {0, 0})};
        auto result = voltage_violation_integral(pdn, series, 0.1);
        CHECK(result.events.empty());
        CHECK(result.integral_pu_h == doctest::Approx(0.0));
    }
    SUBCASE("above the band") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 1.05, {0, 0})};
        auto result = voltage_violation_integral(pdn, series, 0.1);
        REQUIRE(result.events.size() == 1);
        CHECK(result.events[0].du_pu == doctest::Approx(+0.01));
    }
    SUBCASE("just under the serious threshold is still an event") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 0.957, {0, 0})};
        auto result = voltage_violation_integral(pdn, series, 0.1, 0.005);
        REQUIRE(result.events.size() == 1);
        CHECK(result.serious_count == 0);
    }
}

TEST_CASE("substation rating violation uses the summed complex injection") {
    auto pdn = one_bus_feeder(0.9, 1.1, 1);
    pdn.s_base_va = 1e6;   // 1 p.u. = 1 MVA
    pdn.rating = 10.42;    // MVA, typical substation transformer rating
    SUBCASE("draw above the rating") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 1.0, {10.5, 0.0})};
        auto result = substation_violation_integral(pdn, series, 0.1);
        REQUIRE(result.events.size() == 1);
        CHECK(result.events[0].ds_mva == doctest::Approx(0.08));
        CHECK(result.integral_mvah == doctest::Approx(0.008));
    }
    SUBCASE("draw below the rating") {
        std::vector<PowerFlowSolution> series{fake_solution(pdn, 1, 1.0, {10.0, 0.0})};
        auto result = substation_violation_integral(pdn, series, 0.1);
        CHECK(result.events.empty());
    }
    SUBCASE("three equal complex phases") {
        auto three = one_bus_feeder(0.9, 1.1, 1);
        three.buses[0].phases = parse_phases("abc");
        three.v_ref.assign(1, balanced_unit_voltage(three.buses[0].phases));
        three.rating = 14.0;
        PowerFlowSolution sol = fake_solution(three, 1, 1.0, {0, 0});
        sol.s_ref = Eigen::VectorXcd::Ones(3) * Complex(3.0, 4.0);
        auto result = substation_violation_integral(three, {sol}, 0.1);
        REQUIRE(result.events.size() == 1);  // |9 + 12j| = 15 > 14
        CHECK(result.events[0].ds_mva == doctest::Approx(1.0));
    }
}

TEST_CASE("violation integral scales monotonically with load") {
    auto pdn = one_bus_feeder(0.9, 1.1, 3);
    pdn.rating = 1.0;
    std::vector<std::vector<PowerFlowSolution>> runs;
    for (double scale : {1.0, 1.5, 2.0}) {
        std::vector<PowerFlowSolution> series;
        for (int t = 1; t <= 3; ++t)
            series.push_back(fake_solution(pdn, t, 1.0, Complex(0.6 * scale * t, 0.0)));
        runs.push_back(series);
    }
    double previous = -1.0;
    for (const auto& series : runs) {
        auto result = substation_violation_integral(pdn, series, 0.1);
        CHECK(result.integral_mvah >= previous);
        previous = result.integral_mvah;
    }
}

TEST_CASE("energy accounting identities") {
    auto pdn = one_bus_feeder(0.9, 1.1, 2);
    pdn.s_base_va = 1e6;
    ControllableSlot slot;
    slot.bus = 1;
    slot.p_min = slot.q_min = slot.q_max = Eigen::VectorXd::Zero(1);
    slot.p_max = Eigen::VectorXd::Constant(1, kInf);
    pdn.controllable.push_back(slot);
    std::vector<Pdn> pdns{pdn};

    std::vector<std::vector<PowerFlowSolution>> base{{fake_solution(pdn, 1, 1.0, {1.0, 0.1}),
                                                      fake_solution(pdn, 2, 1.0, {1.2, 0.1})}};
    std::vector<std::vector<PowerFlowSolution>> run{{fake_solution(pdn, 1, 1.0, {1.5, 0.2}),
                                                     fake_solution(pdn, 2, 1.0, {1.9, 0.2})}};
    std::vector<ControllableLoadSeries> loads(1);
    loads[0].s = {{Eigen::VectorXcd::Ones(1) * Complex(0.45, 0.0)},
                  {Eigen::VectorXcd::Ones(1) * Complex(0.65, 0.0)}};

    auto report = energy_and_cost_accounting(pdns, base, run, loads, 0.1, 20.0, 0.3);
    CHECK(report.e_amod_kwh ==
          doctest::Approx(report.e_total_kwh - report.e_base_kwh).epsilon(1e-12));
    CHECK(report.e_losses_kwh ==
          doctest::Approx(report.e_amod_kwh - report.e_charge_kwh).epsilon(1e-12));
    CHECK(report.c_losses_usd ==
          doctest::Approx(report.c_amod_usd - report.c_charge_usd).epsilon(1e-12));
    CHECK(report.rebalancing_usd == doctest::Approx(6.0));
    // Numbers: base 220 kWh, run 340 kWh, charge 110 kWh.
    CHECK(report.e_amod_kwh == doctest::Approx(120.0));
    CHECK(report.e_charge_kwh == doctest::Approx(110.0));
    CHECK(report.e_losses_kwh == doctest::Approx(10.0));

    SUBCASE("run equal to base zeroes the fleet terms") {
        std::vector<ControllableLoadSeries> none(1);
        none[0].s = {{Eigen::VectorXcd::Zero(1)}, {Eigen::VectorXcd::Zero(1)}};
        auto zero = energy_and_cost_accounting(pdns, base, base, none, 0.1, 0.0, 0.3);
        CHECK(zero.e_amod_kwh == doctest::Approx(0.0));
        CHECK(zero.e_charge_kwh == doctest::Approx(0.0));
        CHECK(zero.e_losses_kwh == doctest::Approx(0.0));
        CHECK(zero.total_fleet_usd == doctest::Approx(0.0));
    }
    SUBCASE("misaligned series are rejected") {
        auto short_run = run;
        short_run[0].pop_back();
        CHECK_THROWS_AS(
            energy_and_cost_accounting(pdns, base, short_run, loads, 0.1, 0.0, 0.3),
            ValidationError);
    }
    SUBCASE("published full-scale figures satisfy the same identity") {
        // Reported uncoordinated energy split (MWh): charging 268.82,
        // losses 11.01, fleet total 279.82 — consistent to their rounding.
        CHECK(std::abs(268.82 + 11.01 - 279.82) <= 0.015);
    }
}

TEST_CASE("report emission produces parseable JSON and matching CSV rows") {
    auto pdn = one_bus_feeder(0.96, 1.04, 2);
    std::vector<Pdn> pdns{pdn};
    std::vector<std::vector<PowerFlowSolution>> run{{fake_solution(pdn, 1, 0.95, {0.5, 0.0}),
                                                     fake_solution(pdn, 2, 1.0, {0.5, 0.0})}};
    ScenarioReport report;
    report.mode = "uncoordinated";
    report.dt_hours = 0.1;
    report.violations = summarize_violations(pdns, run, 0.1, 0.005);
    report.substation_base_mva = {{0.4, 0.4}};
    report.substation_run_mva = {{0.5, 0.5}};
    report.rating_mva = {10.0};
    report.charging_vehicles = {0.0, 1.0};
    report.price_per_kwh = {{0.1, 0.1}};

    const auto dir = std::filesystem::temp_directory_path() / "fleetgrid-report-test";
    std::filesystem::remove_all(dir);
    emit_report(report, {}, dir);

    std::ifstream jf(dir / "report.json");
    REQUIRE(jf.good());
    nlohmann::json j = nlohmann::json::parse(jf);
    CHECK(j["mode"] == "uncoordinated");
    CHECK(j["violations"]["voltage_events"] == 1);

    std::ifstream csv(dir / "du_events.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1 + report.violations.du_event_count);

    SUBCASE("empty run still emits valid zeroed artifacts") {
        ScenarioReport empty;
        empty.mode = "base";
        empty.dt_hours = 0.1;
        const auto dir2 = std::filesystem::temp_directory_path() / "fleetgrid-report-empty";
        std::filesystem::remove_all(dir2);
        emit_report(empty, {}, dir2);
        std::ifstream jf2(dir2 / "report.json");
        nlohmann::json j2 = nlohmann::json::parse(jf2);
        CHECK(j2["violations"]["voltage_integral_pu_h"] == 0.0);
    }
}
