#include "fleetgrid/coupling.hpp"

namespace fleetgrid {

namespace {

double coupling_coef(const Scenario& sc, const ChargerSpec& charger, const Pdn& pdn) {
    // Flow on a charge arc delivers unit_kwh * rate kWh over one step;
    // dividing by the step length gives station power in kW, split equally
    // over three phases and normalized by the per-phase power base.
    return sc.unit_kwh * charger.rate_levels_per_step * 1e3 /
           (sc.dt_hours * 3.0 * pdn.s_base_va);
}

}  // namespace

double charger_load_kw(const Scenario& sc, const EamodFragment& frag, const LpSolution& sol,
                       std::size_t charger, int t) {
    double flow = 0.0;
    for (VarId x : frag.f_charge[charger][static_cast<std::size_t>(t - 1)])
        flow += sol.values[static_cast<std::size_t>(x)];
    return sc.unit_kwh * sc.chargers[charger].rate_levels_per_step * flow / sc.dt_hours;
}

void emit_coupling_constraints(LpModel& model, const Scenario& sc, const EamodFragment& eamod,
                               const std::vector<BfmFragment>& grids,
                               std::vector<RowId>& rows) {
    for (const auto& entry : sc.couplings) {
        const auto& charger = sc.chargers[entry.charger_index];
        const auto& pdn = sc.pdns[entry.pdn_index];
        const auto& grid = grids[entry.pdn_index];
        if (pdn.buses[static_cast<std::size_t>(pdn.controllable[entry.slot].bus)]
                .phases.size() != 3)
            throw ValidationError("charger at vertex " + std::to_string(charger.vertex) +
                                  " is mapped to a bus without all three phases");
        const double coef = coupling_coef(sc, charger, pdn);
        for (int t = 1; t <= sc.n_t; ++t) {
            const auto& sc_vars = grid.vars.sc[entry.slot][static_cast<std::size_t>(t - 1)];
            for (std::size_t p = 0; p < sc_vars.size(); ++p) {
                RowId r = model.add_row("cpl." + std::to_string(entry.charger_index) + "." +
                                            std::to_string(p) + ".t" + std::to_string(t),
                                        RowSense::eq, 0.0);
                rows.push_back(r);
                model.add_coef(r, sc_vars[p].re, 1.0);
                for (VarId x : eamod.f_charge[entry.charger_index]
                                             [static_cast<std::size_t>(t - 1)])
                    model.add_coef(r, x, -coef);
            }
        }
    }
}

namespace {

struct FleetParts {
    ExpandedGraph expanded;
    RoutePlan routes;
};

FleetParts build_fleet_parts(const Scenario& sc) {
    FleetParts parts;
    parts.routes = precompute_customer_routes(sc.road, sc.trips, sc.n_t);
    if (parts.routes.diagnostics.has_errors())
        throw ValidationError("trip routing failed:\n" +
                              parts.routes.diagnostics.to_string());
    parts.expanded =
        build_expanded_graph(sc.road, sc.chargers, sc.n_t, sc.n_c, sc.dt_hours, sc.unit_kwh);
    return parts;
}

}  // namespace

UncoordinatedAssembly assemble_uncoordinated(const Scenario& sc) {
    UncoordinatedAssembly out;
    auto parts = build_fleet_parts(sc);
    out.expanded = std::move(parts.expanded);
    out.routes = std::move(parts.routes);
    out.eamod = emit_eamod_constraints(out.model, out.expanded, sc.road, sc.chargers, sc.trips,
                                       out.routes, sc.boundary);
    emit_eamod_objective(out.model, out.eamod, out.expanded, sc.road, sc.chargers,
                         sc.distance_price);
    out.model.canonicalize();
    return out;
}

JointAssembly assemble_coordinated(const Scenario& sc, const PowerFlowOptions& pf_opts) {
    JointAssembly out;
    auto parts = build_fleet_parts(sc);
    out.expanded = std::move(parts.expanded);
    out.routes = std::move(parts.routes);

    // Exact base case (no charging) fixes the surrogate's loss and
    // voltage-ratio parameters.
    for (const auto& pdn : sc.pdns) {
        out.base_series.push_back(solve_power_flow_series(pdn, base_injections(pdn), pf_opts));
        out.params.push_back(estimate_linearization_from_base(pdn, out.base_series.back()));
    }

    out.eamod = emit_eamod_constraints(out.model, out.expanded, sc.road, sc.chargers, sc.trips,
                                       out.routes, sc.boundary);
    for (std::size_t d = 0; d < sc.pdns.size(); ++d)
        out.grids.push_back(emit_bfm_lp(out.model, sc.pdns[d], out.params[d]));
    emit_coupling_constraints(out.model, sc, out.eamod, out.grids, out.coupling_rows);

    // Joint objective: distance cost on road flows plus substation energy
    // cost; charging is priced where it hits the grid, not at the plug.
    for (std::size_t e = 0; e < sc.road.arcs.size(); ++e)
        for (const auto& per_t : out.eamod.f_road[e])
            for (VarId x : per_t)
                out.model.set_objective_coef(x, sc.distance_price * sc.road.arcs[e].distance_km);
    for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
        const auto& pdn = sc.pdns[d];
        const double to_kw = pdn.s_base_va / 1e3;
        for (int t = 1; t <= sc.n_t; ++t) {
            const double coef =
                sc.dt_hours * pdn.price_per_kwh[static_cast<std::size_t>(t - 1)] * to_kw;
            for (const auto& z : out.grids[d].vars.s0[static_cast<std::size_t>(t - 1)])
                out.model.set_objective_coef(z.re, coef);
        }
    }
    out.model.canonicalize();
    return out;
}

std::vector<ControllableLoadSeries> charger_loads_from_flows(const Scenario& sc,
                                                             const EamodFragment& frag,
                                                             const LpSolution& sol) {
    std::vector<ControllableLoadSeries> loads(sc.pdns.size());
    for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
        loads[d].s.resize(static_cast<std::size_t>(sc.n_t));
        for (int t = 0; t < sc.n_t; ++t) {
            auto& at_t = loads[d].s[static_cast<std::size_t>(t)];
            for (const auto& slot : sc.pdns[d].controllable) {
                const auto dim = sc.pdns[d].buses[static_cast<std::size_t>(slot.bus)]
                                     .phases.size();
                at_t.push_back(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim)));
            }
        }
    }
    for (const auto& entry : sc.couplings) {
        const auto& pdn = sc.pdns[entry.pdn_index];
        for (int t = 1; t <= sc.n_t; ++t) {
            const double p_kw = charger_load_kw(sc, frag, sol, entry.charger_index, t);
            const double per_phase_pu = p_kw * 1e3 / (3.0 * pdn.s_base_va);
            loads[entry.pdn_index].s[static_cast<std::size_t>(t - 1)][entry.slot].setConstant(
                Complex(per_phase_pu, 0.0));
        }
    }
    return loads;
}

std::vector<ControllableLoadSeries> loads_from_joint(const Scenario& sc,
                                                     const JointAssembly& joint,
                                                     const LpSolution& sol) {
    std::vector<ControllableLoadSeries> loads(sc.pdns.size());
    for (std::size_t d = 0; d < sc.pdns.size(); ++d) {
        loads[d].s.resize(static_cast<std::size_t>(sc.n_t));
        for (int t = 1; t <= sc.n_t; ++t) {
            auto& at_t = loads[d].s[static_cast<std::size_t>(t - 1)];
            for (std::size_t k = 0; k < sc.pdns[d].controllable.size(); ++k)
                at_t.push_back(joint.grids[d].slot_at(sol, k, t));
        }
    }
    return loads;
}

}  // namespace fleetgrid
