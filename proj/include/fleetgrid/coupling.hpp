#pragma once

#include <vector>

#include "fleetgrid/bfm_lp.hpp"
#include "fleetgrid/eamod.hpp"
#include "fleetgrid/lp_model.hpp"
#include "fleetgrid/power_flow.hpp"
#include "fleetgrid/scenario.hpp"

namespace fleetgrid {

/// Fleet-only program (the uncoordinated case): charger loads are derived
/// from the solved flows afterwards and handed to the exact validation.
struct UncoordinatedAssembly {
    LpModel model;
    ExpandedGraph expanded;
    RoutePlan routes;
    EamodFragment eamod;
};

/// Joint fleet/grid program: fleet fragment, one surrogate fragment per
/// network, charging-station coupling rows, and the combined objective.
struct JointAssembly {
    LpModel model;
    ExpandedGraph expanded;
    RoutePlan routes;
    EamodFragment eamod;
    std::vector<BfmFragment> grids;
    std::vector<RowId> coupling_rows;
    std::vector<FixedLinearizationParams> params;
    // Exact base-case series per network (linearization provenance).
    std::vector<std::vector<PowerFlowSolution>> base_series;
};

/// Station load in kW implied by charging flows active at step t:
/// p_s(t) = unit_kwh * rate / dt * (flow entering charge arcs at t).
double charger_load_kw(const Scenario& sc, const EamodFragment& frag, const LpSolution& sol,
                       std::size_t charger, int t);

/// Ties each coupled station's controllable load to its charging flows:
/// per phase, s_c = p_s(t) / 3 with zero reactive power.
void emit_coupling_constraints(LpModel& model, const Scenario& sc, const EamodFragment& eamod,
                               const std::vector<BfmFragment>& grids,
                               std::vector<RowId>& rows);

UncoordinatedAssembly assemble_uncoordinated(const Scenario& sc);
JointAssembly assemble_coordinated(const Scenario& sc, const PowerFlowOptions& pf_opts = {});

/// Controllable-load series per network from a solved fleet program
/// (uncoordinated case, charger loads recomputed from flows; slots not
/// bound to a station stay at zero).
std::vector<ControllableLoadSeries> charger_loads_from_flows(const Scenario& sc,
                                                             const EamodFragment& frag,
                                                             const LpSolution& sol);

/// Controllable-load series per network read from the joint solution's own
/// load variables.
std::vector<ControllableLoadSeries> loads_from_joint(const Scenario& sc,
                                                     const JointAssembly& joint,
                                                     const LpSolution& sol);

}  // namespace fleetgrid
