#include <doctest.h>

#include "fleetgrid/eamod.hpp"
#include "fleetgrid/solver.hpp"
#include "support/builders.hpp"

using namespace fleetgrid;

namespace {

struct FleetFixture {
    RoadGraph road;
    std::vector<ChargerSpec> chargers;
    std::vector<TripRequest> trips;
    FleetBoundary boundary;
    int n_t = 6;
    int n_c = 4;

    ExpandedGraph expanded;
    RoutePlan routes;
    LpModel model;
    EamodFragment frag;

    void build(double distance_price = 0.3) {
        routes = precompute_customer_routes(road, trips, n_t);
        REQUIRE_FALSE(routes.diagnostics.has_errors());
        expanded = build_expanded_graph(road, chargers, n_t, n_c, 0.1, 0.8);
        frag = emit_eamod_constraints(model, expanded, road, chargers, trips, routes,
                                      boundary);
        emit_eamod_objective(model, frag, expanded, road, chargers, distance_price);
        model.canonicalize();
    }

    LpSolution solve_it() {
        ExternalMpsSolver adapter(fleetgrid::testing::solver_command());
        return solve(model, adapter);
    }
};

FleetFixture two_vertex_fixture() {
    FleetFixture f;
    f.road.vertices = {1, 2};
    f.road.arcs.push_back({1, 2, 5.0, 1, 1, 10.0});
    f.road.arcs.push_back({2, 1, 5.0, 1, 1, 10.0});
    return f;
}

}  // namespace

TEST_CASE("a stationary fleet with no demand just waits") {
    FleetFixture f = two_vertex_fixture();
    f.boundary.initial[{1, 3}] = 1.0;
    f.boundary.min_soc_fraction = 0.5;
    f.build();
    auto sol = f.solve_it();
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(0.0));
    // All movement flows are zero; the vehicle sits on hold arcs.
    for (const auto& per_e : f.frag.f_road)
        for (const auto& per_t : per_e)
            for (VarId x : per_t) CHECK(sol.values[static_cast<std::size_t>(x)] ==
                                        doctest::Approx(0.0));
    auto schedule = extract_fleet_solution(f.model, f.frag, f.expanded, f.road, f.chargers,
                                           sol);
    CHECK(schedule.rebalancing_km == doctest::Approx(0.0));
}

TEST_CASE("a single served trip shifts customers in time and charge") {
    FleetFixture f = two_vertex_fixture();
    f.trips.push_back({1, 2, 2, 1.0});
    f.boundary.initial[{1, 3}] = 1.0;
    f.boundary.min_soc_fraction = 0.25;
    f.build();
    auto sol = f.solve_it();
    REQUIRE(sol.status == LpStatus::optimal);
    auto schedule = extract_fleet_solution(f.model, f.frag, f.expanded, f.road, f.chargers,
                                           sol);
    // The only vehicle enters the trip at charge 3 and exits at charge 2.
    CHECK(schedule.trip_entry[0][2] == doctest::Approx(1.0));
    CHECK(schedule.max_conservation_residual < 1e-6);
    double served = 0.0;
    for (double v : schedule.trip_entry[0]) served += v;
    CHECK(served == doctest::Approx(1.0));
}

TEST_CASE("plug limits cap concurrent charging") {
    FleetFixture f = two_vertex_fixture();
    f.n_t = 5;
    ChargerSpec charger;
    charger.vertex = 1;
    charger.rate_levels_per_step = 1;
    charger.plugs = 2;
    charger.price_per_kwh.assign(5, 0.05);
    f.chargers.push_back(charger);
    // Three vehicles all start empty-ish and must reach a high SoC, with
    // barely enough horizon, forcing concurrent charging wishes.
    f.boundary.initial[{1, 1}] = 3.0;
    f.boundary.min_soc_fraction = 0.75;  // needs +2 levels per vehicle
    f.build();
    auto sol = f.solve_it();
    REQUIRE(sol.status == LpStatus::optimal);
    auto schedule = extract_fleet_solution(f.model, f.frag, f.expanded, f.road, f.chargers,
                                           sol);
    bool any = false;
    for (double occ : schedule.charger_occupancy[0]) {
        CHECK(occ <= 2.0 + 1e-9);
        if (occ > 1.5) any = true;
    }
    CHECK(any);
}

TEST_CASE("objective values follow the distance and energy prices") {
    SUBCASE("zero flow costs nothing") {
        FleetFixture f = two_vertex_fixture();
        f.boundary.initial[{1, 4}] = 1.0;
        f.boundary.min_soc_fraction = 0.5;
        f.build();
        auto sol = f.solve_it();
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(eamod_operating_cost(f.frag, f.expanded, f.road, f.chargers, 0.3, sol) ==
              doctest::Approx(0.0));
    }
    SUBCASE("one rebalancing leg on a 10 km arc at 0.3 USD/km costs 3 USD") {
        FleetFixture f;
        f.road.vertices = {1, 2};
        f.road.arcs.push_back({1, 2, 10.0, 1, 1, 10.0});
        f.boundary.initial[{1, 3}] = 1.0;
        f.boundary.final_kind = FleetBoundary::FinalKind::distribution;
        f.boundary.final_distribution[{2, 2}] = 1.0;  // forces the move
        f.build();
        auto sol = f.solve_it();
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(3.0));
    }
    SUBCASE("charging is priced as energy: price * unit * rate") {
        FleetFixture f = two_vertex_fixture();
        f.n_c = 7;
        ChargerSpec charger;
        charger.vertex = 1;
        charger.rate_levels_per_step = 5;
        charger.plugs = 1;
        charger.price_per_kwh.assign(6, 0.05);
        f.chargers.push_back(charger);
        f.boundary.initial[{1, 1}] = 1.0;
        f.boundary.final_kind = FleetBoundary::FinalKind::distribution;
        f.boundary.final_distribution[{1, 6}] = 1.0;  // exactly one charge arc
        f.build(0.0);
        auto sol = f.solve_it();
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(0.8 * 5 * 0.05));
    }
}

TEST_CASE("raising a charger price never lowers the optimum") {
    FleetFixture f = two_vertex_fixture();
    ChargerSpec charger;
    charger.vertex = 2;
    charger.rate_levels_per_step = 1;
    charger.plugs = 4;
    charger.price_per_kwh.assign(6, 0.05);
    f.chargers.push_back(charger);
    f.trips.push_back({1, 2, 1, 2.0});
    f.boundary.initial[{1, 3}] = 2.0;
    f.boundary.min_soc_fraction = 0.6;
    f.build();
    auto cheap = f.solve_it();
    REQUIRE(cheap.status == LpStatus::optimal);

    FleetFixture g = two_vertex_fixture();
    charger.price_per_kwh.assign(6, 0.50);
    g.chargers.push_back(charger);
    g.trips = f.trips;
    g.boundary = f.boundary;
    g.build();
    auto pricey = g.solve_it();
    REQUIRE(pricey.status == LpStatus::optimal);
    CHECK(pricey.objective >= cheap.objective - 1e-9);
}

TEST_CASE("emitted variable totals equal the closed-form statistics") {
    FleetFixture f = two_vertex_fixture();
    ChargerSpec charger;
    charger.vertex = 2;
    charger.rate_levels_per_step = 1;
    charger.plugs = 4;
    charger.price_per_kwh.assign(6, 0.05);
    f.chargers.push_back(charger);
    f.trips.push_back({1, 2, 1, 1.0});
    f.trips.push_back({2, 1, 2, 1.0});
    f.boundary.initial[{1, 3}] = 2.0;
    f.build();
    auto counts = model_statistics(f.expanded, f.trips.size(), {});
    CHECK(static_cast<long long>(f.frag.num_variables) == counts.eamod);
}

TEST_CASE("infeasible boundary conditions surface as an infeasible program") {
    FleetFixture f = two_vertex_fixture();
    // No chargers, but the final state must exceed the initial charge.
    f.boundary.initial[{1, 2}] = 1.0;
    f.boundary.min_soc_fraction = 1.0;
    f.build();
    CHECK_FALSE(f.frag.notes.findings().empty());  // headroom warning fired
    auto sol = f.solve_it();
    CHECK(sol.status == LpStatus::infeasible);
}

TEST_CASE("a sloppy solution fails extraction at the stated tolerance") {
    FleetFixture f = two_vertex_fixture();
    f.boundary.initial[{1, 3}] = 1.0;
    f.boundary.min_soc_fraction = 0.5;
    f.build();
    auto sol = f.solve_it();
    REQUIRE(sol.status == LpStatus::optimal);
    // Knock one hold flow off by 1e-3; conservation now fails.
    for (std::size_t v = 0; v < f.model.num_variables(); ++v) {
        if (f.model.variable(static_cast<VarId>(v)).name.starts_with("f0h.") &&
            sol.values[v] > 0.5) {
            sol.values[v] += 1e-3;
            break;
        }
    }
    CHECK_THROWS(extract_fleet_solution(f.model, f.frag, f.expanded, f.road, f.chargers, sol,
                                        1e-6));
}
