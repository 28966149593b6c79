#pragma once

#include <map>
#include <span>
#include <vector>

#include "fleetgrid/lp_model.hpp"
#include "fleetgrid/transport_graph.hpp"

namespace fleetgrid {

/// Initial and final conditions on the vehicle distribution. The initial
/// distribution is fixed data; the final distribution is decided by the
/// optimizer subject to either an exact target or per-(vertex, charge)
/// lower bounds plus aggregate rows (total fleet size and a minimum
/// fleet-average state of charge).
struct FleetBoundary {
    enum class FinalKind { distribution, aggregate };

    std::map<std::pair<VertexId, int>, double> initial;  // (vertex, charge level) -> vehicles
    FinalKind final_kind = FinalKind::aggregate;
    std::map<std::pair<VertexId, int>, double> final_distribution;
    std::map<std::pair<VertexId, int>, double> final_min;  // lower bounds, aggregate mode
    double min_soc_fraction = 0.5;

    double fleet_size() const;
};

/// Variable bookkeeping of the fleet program. All grids are fully
/// materialized; combinations that violate the horizon or charge range are
/// fixed to zero, which keeps emitted counts equal to the closed-form
/// model statistics.
struct EamodFragment {
    std::vector<std::vector<std::vector<VarId>>> f_road;    // [arc][t-1][c-1]
    std::vector<std::vector<std::vector<VarId>>> f_charge;  // [charger][t-1][c-1]
    std::vector<std::vector<std::vector<VarId>>> f_hold;    // [vertex][t-1][c-1]
    std::vector<std::vector<VarId>> lambda_in;              // [trip][c-1]
    std::vector<std::vector<VarId>> d_final;                // [vertex][c-1]

    std::vector<RowId> balance_rows;
    std::vector<RowId> demand_rows;
    std::vector<RowId> capacity_rows;
    std::vector<RowId> plug_rows;
    std::vector<RowId> boundary_rows;

    std::size_t num_variables = 0;
    Diagnostics notes;  // advisory findings (e.g. insufficient charging headroom)
};

/// Emits flow conservation at every expanded vertex, per-trip demand
/// distribution with served flows tied to entry flows shifted by the route
/// duration and charge requirement, residual road-capacity rows, charger
/// plug rows, and the boundary conditions.
EamodFragment emit_eamod_constraints(LpModel& model, const ExpandedGraph& expanded,
                                     const RoadGraph& road,
                                     std::span<const ChargerSpec> chargers,
                                     std::span<const TripRequest> trips, const RoutePlan& routes,
                                     const FleetBoundary& boundary);

/// Fleet operating objective: distance cost on road flows plus
/// energy-priced charging (price * unit_kwh * rate) on charge flows.
void emit_eamod_objective(LpModel& model, const EamodFragment& frag,
                          const ExpandedGraph& expanded, const RoadGraph& road,
                          std::span<const ChargerSpec> chargers, double distance_price);

/// The same objective evaluated on a solved flow vector, independent of the
/// objective coefficients stored in the model (the joint problem prices
/// charging at the substation instead).
double eamod_operating_cost(const EamodFragment& frag, const ExpandedGraph& expanded,
                            const RoadGraph& road, std::span<const ChargerSpec> chargers,
                            double distance_price, const LpSolution& sol);

struct FleetSchedule {
    struct ArcFlow {
        char kind;  // 'r' road, 's' charge, 'h' hold
        std::size_t source_index;
        ExpandedVertex tail, head;
        double flow;
    };
    std::vector<ArcFlow> flows;  // nonzero flows in deterministic order
    std::vector<std::vector<double>> charger_occupancy;   // [charger][t-1]
    std::vector<std::vector<double>> charger_energy_kwh;  // [charger][t-1]
    std::vector<std::vector<double>> trip_entry;          // [trip][c-1]
    double rebalancing_km = 0.0;
    double max_conservation_residual = 0.0;
};

/// Reads the fleet variables out of an optimal solution and audits the
/// conservation rows; throws if any residual exceeds `tol`.
FleetSchedule extract_fleet_solution(const LpModel& model, const EamodFragment& frag,
                                     const ExpandedGraph& expanded, const RoadGraph& road,
                                     std::span<const ChargerSpec> chargers,
                                     const LpSolution& sol, double tol = 1e-6);

}  // namespace fleetgrid
