#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fleetgrid/eamod.hpp"
#include "fleetgrid/pdn.hpp"
#include "fleetgrid/power_flow.hpp"
#include "fleetgrid/transport_graph.hpp"

namespace fleetgrid {

struct SolverSettings {
    std::string command;  // external LP solver command; empty = default lookup
    double feasibility_tol = 1e-6;
};

struct ReportConfig {
    double du_bin_width = 0.001;       // p.u., voltage-violation histogram
    double ds_bin_width_mva = 0.05;    // MVA, rating-violation histogram
    double serious_du_threshold = 0.005;  // p.u.
};

// Binds one charging station to a controllable-load slot of one network.
// Slots are resolved at load time; stations without an explicit bus get a
// seeded-random PQ bus.
struct CouplingEntry {
    std::size_t charger_index = 0;
    std::size_t pdn_index = 0;
    std::size_t slot = 0;
};

struct Scenario {
    int n_t = 0;
    int n_c = 0;
    double dt_hours = 0.0;
    double unit_kwh = 0.0;
    double distance_price = 0.0;  // USD per km

    RoadGraph road;
    std::vector<ChargerSpec> chargers;
    std::vector<TripRequest> trips;
    FleetBoundary boundary;

    std::vector<Pdn> pdns;  // per-unit after loading
    std::vector<CouplingEntry> couplings;

    std::uint64_t seed = 0;
    SolverSettings solver;
    ReportConfig report;
    PowerFlowOptions pf;
};

struct ScenarioLoadResult {
    std::optional<Scenario> scenario;  // present iff no errors
    Diagnostics diagnostics;
};

/// Parses and cross-validates a scenario file. Findings carry JSON-pointer
/// style locations; the scenario is returned only when error-free. The
/// seed override replaces the scenario's seed before any seeded utility
/// (random charger placement) runs.
ScenarioLoadResult load_scenario(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> seed_override = {});

/// Schema and cross-reference validation of a scenario file.
Diagnostics validate_scenario(const std::filesystem::path& path);

}  // namespace fleetgrid
