#include "fleetgrid/eamod.hpp"

#include <algorithm>
#include <cmath>

namespace fleetgrid {

double FleetBoundary::fleet_size() const {
    double total = 0.0;
    for (const auto& [key, count] : initial) total += count;
    return total;
}

namespace {

std::string grid_name(const char* stem, std::size_t index, int t, int c) {
    return std::string(stem) + std::to_string(index) + ".t" + std::to_string(t) + ".c" +
           std::to_string(c);
}

}  // namespace

EamodFragment emit_eamod_constraints(LpModel& model, const ExpandedGraph& expanded,
                                     const RoadGraph& road,
                                     std::span<const ChargerSpec> chargers,
                                     std::span<const TripRequest> trips, const RoutePlan& routes,
                                     const FleetBoundary& boundary) {
    const int n_t = expanded.n_t;
    const int n_c = expanded.n_c;
    const auto& vertices = expanded.road_vertices;
    const std::size_t vars_before = model.num_variables();

    EamodFragment frag;

    std::vector<int> vertex_of;  // dense index per road vertex id
    auto vertex_index = [&](VertexId v) {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
        return static_cast<std::size_t>(it - vertices.begin());
    };

    // Flow variables over the full (t, c) grid; combinations that would
    // leave the horizon or the charge range are pinned to zero.
    frag.f_road.resize(road.arcs.size());
    for (std::size_t e = 0; e < road.arcs.size(); ++e) {
        const auto& arc = road.arcs[e];
        frag.f_road[e].assign(static_cast<std::size_t>(n_t), {});
        for (int t = 1; t <= n_t; ++t) {
            auto& per_c = frag.f_road[e][static_cast<std::size_t>(t - 1)];
            per_c.reserve(static_cast<std::size_t>(n_c));
            for (int c = 1; c <= n_c; ++c) {
                const bool valid = t + arc.traversal_steps <= n_t && c - arc.energy_levels >= 1;
                per_c.push_back(model.add_variable(grid_name("f0r.", e, t, c), 0.0,
                                                   valid ? kInf : 0.0));
            }
        }
    }
    frag.f_charge.resize(chargers.size());
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        frag.f_charge[s].assign(static_cast<std::size_t>(n_t), {});
        for (int t = 1; t <= n_t; ++t) {
            auto& per_c = frag.f_charge[s][static_cast<std::size_t>(t - 1)];
            for (int c = 1; c <= n_c; ++c) {
                const bool valid = t + 1 <= n_t && c + charger.rate_levels_per_step <= n_c;
                per_c.push_back(model.add_variable(grid_name("f0s.", s, t, c), 0.0,
                                                   valid ? kInf : 0.0));
            }
        }
    }
    frag.f_hold.resize(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        frag.f_hold[v].assign(static_cast<std::size_t>(n_t), {});
        for (int t = 1; t <= n_t; ++t) {
            auto& per_c = frag.f_hold[v][static_cast<std::size_t>(t - 1)];
            for (int c = 1; c <= n_c; ++c)
                per_c.push_back(model.add_variable(grid_name("f0h.", v, t, c), 0.0,
                                                   t + 1 <= n_t ? kInf : 0.0));
        }
    }
    frag.lambda_in.resize(trips.size());
    for (std::size_t m = 0; m < trips.size(); ++m) {
        const Route& route = routes.routes[m];
        const bool routed = !route.path.empty();
        for (int c = 1; c <= n_c; ++c) {
            // A vehicle entering the trip with charge c arrives with
            // c - gamma, which must remain a valid level.
            const bool valid = routed && c - route.energy_levels >= 1 &&
                               trips[m].departure_step + route.traversal_steps <= n_t;
            frag.lambda_in[m].push_back(model.add_variable(
                "lin." + std::to_string(m) + ".c" + std::to_string(c), 0.0,
                valid ? kInf : 0.0));
        }
        if (!routed)
            frag.notes.error("/trips/" + std::to_string(m),
                             "trip has no route; its demand row will be infeasible");
    }
    frag.d_final.resize(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v)
        for (int c = 1; c <= n_c; ++c)
            frag.d_final[v].push_back(model.add_variable(
                "dF." + std::to_string(v) + ".c" + std::to_string(c), 0.0, kInf));

    frag.num_variables = model.num_variables() - vars_before;

    // Flow conservation at every expanded vertex:
    //   outflow + entering customers + final distribution
    //     = inflow + exiting customers + initial distribution.
    std::vector<RowId> balance(vertices.size() * static_cast<std::size_t>(n_t) *
                               static_cast<std::size_t>(n_c));
    auto balance_row = [&](std::size_t v, int t, int c) -> RowId {
        return balance[(v * static_cast<std::size_t>(n_t) + static_cast<std::size_t>(t - 1)) *
                           static_cast<std::size_t>(n_c) +
                       static_cast<std::size_t>(c - 1)];
    };
    for (std::size_t v = 0; v < vertices.size(); ++v)
        for (int t = 1; t <= n_t; ++t)
            for (int c = 1; c <= n_c; ++c) {
                double d_initial = 0.0;
                if (t == 1) {
                    auto it = boundary.initial.find({vertices[v], c});
                    if (it != boundary.initial.end()) d_initial = it->second;
                }
                RowId r = model.add_row("bal." + std::to_string(v) + ".t" + std::to_string(t) +
                                            ".c" + std::to_string(c),
                                        RowSense::eq, d_initial);
                balance[(v * static_cast<std::size_t>(n_t) +
                         static_cast<std::size_t>(t - 1)) *
                            static_cast<std::size_t>(n_c) +
                        static_cast<std::size_t>(c - 1)] = r;
                frag.balance_rows.push_back(r);
            }

    for (std::size_t e = 0; e < road.arcs.size(); ++e) {
        const auto& arc = road.arcs[e];
        const auto from = vertex_index(arc.from);
        const auto to = vertex_index(arc.to);
        for (int t = 1; t + arc.traversal_steps <= n_t; ++t)
            for (int c = arc.energy_levels + 1; c <= n_c; ++c) {
                const VarId x = frag.f_road[e][static_cast<std::size_t>(t - 1)]
                                            [static_cast<std::size_t>(c - 1)];
                model.add_coef(balance_row(from, t, c), x, 1.0);
                model.add_coef(balance_row(to, t + arc.traversal_steps,
                                           c - arc.energy_levels),
                               x, -1.0);
            }
    }
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        const auto v = vertex_index(charger.vertex);
        for (int t = 1; t + 1 <= n_t; ++t)
            for (int c = 1; c + charger.rate_levels_per_step <= n_c; ++c) {
                const VarId x = frag.f_charge[s][static_cast<std::size_t>(t - 1)]
                                              [static_cast<std::size_t>(c - 1)];
                model.add_coef(balance_row(v, t, c), x, 1.0);
                model.add_coef(balance_row(v, t + 1, c + charger.rate_levels_per_step), x,
                               -1.0);
            }
    }
    for (std::size_t v = 0; v < vertices.size(); ++v)
        for (int t = 1; t + 1 <= n_t; ++t)
            for (int c = 1; c <= n_c; ++c) {
                const VarId x =
                    frag.f_hold[v][static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(c - 1)];
                model.add_coef(balance_row(v, t, c), x, 1.0);
                model.add_coef(balance_row(v, t + 1, c), x, -1.0);
            }
    for (std::size_t m = 0; m < trips.size(); ++m) {
        const auto& trip = trips[m];
        const Route& route = routes.routes[m];
        if (route.path.empty()) continue;
        const auto origin = vertex_index(trip.origin);
        const auto destination = vertex_index(trip.destination);
        const int t_out = trip.departure_step + route.traversal_steps;
        for (int c = 1; c <= n_c; ++c) {
            const VarId lam = frag.lambda_in[m][static_cast<std::size_t>(c - 1)];
            // Entering customers leave the origin vertex at the departure step.
            model.add_coef(balance_row(origin, trip.departure_step, c), lam, 1.0);
            // They reappear at the destination, later and lower on charge.
            const int c_arrival = c - route.energy_levels;
            if (c_arrival >= 1 && t_out <= n_t)
                model.add_coef(balance_row(destination, t_out, c_arrival), lam, -1.0);
        }
    }
    for (std::size_t v = 0; v < vertices.size(); ++v)
        for (int c = 1; c <= n_c; ++c)
            model.add_coef(balance_row(v, n_t, c),
                           frag.d_final[v][static_cast<std::size_t>(c - 1)], 1.0);

    // Demand distribution across charge levels.
    for (std::size_t m = 0; m < trips.size(); ++m) {
        RowId r = model.add_row("dem." + std::to_string(m), RowSense::eq, trips[m].demand);
        frag.demand_rows.push_back(r);
        for (int c = 1; c <= n_c; ++c)
            model.add_coef(r, frag.lambda_in[m][static_cast<std::size_t>(c - 1)], 1.0);
    }

    // Residual road capacity per (arc, departure step).
    for (std::size_t e = 0; e < road.arcs.size(); ++e) {
        const auto& arc = road.arcs[e];
        for (int t = 1; t + arc.traversal_steps <= n_t; ++t) {
            RowId r = model.add_row("cap." + std::to_string(e) + ".t" + std::to_string(t),
                                    RowSense::le, routes.residual_capacity(road, e, t));
            frag.capacity_rows.push_back(r);
            for (int c = arc.energy_levels + 1; c <= n_c; ++c)
                model.add_coef(r,
                               frag.f_road[e][static_cast<std::size_t>(t - 1)]
                                           [static_cast<std::size_t>(c - 1)],
                               1.0);
        }
    }
    // Concurrent plugs per charging station.
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        for (int t = 1; t + 1 <= n_t; ++t) {
            RowId r = model.add_row("plug." + std::to_string(s) + ".t" + std::to_string(t),
                                    RowSense::le, static_cast<double>(charger.plugs));
            frag.plug_rows.push_back(r);
            for (int c = 1; c + charger.rate_levels_per_step <= n_c; ++c)
                model.add_coef(r,
                               frag.f_charge[s][static_cast<std::size_t>(t - 1)]
                                             [static_cast<std::size_t>(c - 1)],
                               1.0);
        }
    }

    // Final-distribution conditions.
    const double fleet = boundary.fleet_size();
    if (boundary.final_kind == FleetBoundary::FinalKind::distribution) {
        double total = 0.0;
        for (const auto& [key, count] : boundary.final_distribution) total += count;
        if (std::abs(total - fleet) > 1e-9 * std::max(1.0, fleet))
            frag.notes.error("/fleet/final", "final distribution total differs from fleet size");
        for (std::size_t v = 0; v < vertices.size(); ++v)
            for (int c = 1; c <= n_c; ++c) {
                auto it = boundary.final_distribution.find({vertices[v], c});
                const double want = it == boundary.final_distribution.end() ? 0.0 : it->second;
                model.fix_variable(frag.d_final[v][static_cast<std::size_t>(c - 1)], want);
            }
    } else {
        for (const auto& [key, want] : boundary.final_min) {
            const auto v = vertex_index(key.first);
            if (v < vertices.size() && key.second >= 1 && key.second <= n_c) {
                const VarId x = frag.d_final[v][static_cast<std::size_t>(key.second - 1)];
                model.set_bounds(x, want, kInf);
            }
        }
        RowId total = model.add_row("fleet.total", RowSense::eq, fleet);
        frag.boundary_rows.push_back(total);
        RowId soc = model.add_row("fleet.soc", RowSense::ge,
                                  boundary.min_soc_fraction * n_c * fleet);
        frag.boundary_rows.push_back(soc);
        for (std::size_t v = 0; v < vertices.size(); ++v)
            for (int c = 1; c <= n_c; ++c) {
                const VarId x = frag.d_final[v][static_cast<std::size_t>(c - 1)];
                model.add_coef(total, x, 1.0);
                model.add_coef(soc, x, static_cast<double>(c));
            }
    }

    // Advisory headroom check: total charge that must be added versus what
    // the stations can deliver over the horizon.
    {
        double initial_levels = 0.0;
        for (const auto& [key, count] : boundary.initial) initial_levels += key.second * count;
        double trip_levels = 0.0;
        for (std::size_t m = 0; m < trips.size(); ++m)
            if (!routes.routes[m].path.empty())
                trip_levels += trips[m].demand * routes.routes[m].energy_levels;
        double required_levels = 0.0;
        if (boundary.final_kind == FleetBoundary::FinalKind::distribution) {
            for (const auto& [key, count] : boundary.final_distribution)
                required_levels += key.second * count;
        } else {
            required_levels = boundary.min_soc_fraction * n_c * fleet;
        }
        double deliverable = 0.0;
        for (const auto& charger : chargers)
            deliverable += static_cast<double>(charger.plugs) * charger.rate_levels_per_step *
                           (n_t - 1);
        if (required_levels + trip_levels - initial_levels > deliverable)
            frag.notes.warning("/fleet",
                               "chargers cannot deliver the charge the boundary conditions "
                               "require over this horizon; the program is likely infeasible");
    }

    return frag;
}

void emit_eamod_objective(LpModel& model, const EamodFragment& frag,
                          const ExpandedGraph& expanded, const RoadGraph& road,
                          std::span<const ChargerSpec> chargers, double distance_price) {
    for (std::size_t e = 0; e < road.arcs.size(); ++e)
        for (const auto& per_t : frag.f_road[e])
            for (VarId x : per_t)
                model.set_objective_coef(x, distance_price * road.arcs[e].distance_km);
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        for (int t = 1; t <= expanded.n_t; ++t) {
            const double price = charger.price_per_kwh.at(static_cast<std::size_t>(t - 1));
            const double cost =
                price * expanded.unit_kwh * charger.rate_levels_per_step;
            for (VarId x : frag.f_charge[s][static_cast<std::size_t>(t - 1)])
                model.set_objective_coef(x, cost);
        }
    }
}

double eamod_operating_cost(const EamodFragment& frag, const ExpandedGraph& expanded,
                            const RoadGraph& road, std::span<const ChargerSpec> chargers,
                            double distance_price, const LpSolution& sol) {
    double cost = 0.0;
    for (std::size_t e = 0; e < road.arcs.size(); ++e)
        for (const auto& per_t : frag.f_road[e])
            for (VarId x : per_t)
                cost += distance_price * road.arcs[e].distance_km *
                        sol.values[static_cast<std::size_t>(x)];
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        for (int t = 1; t <= expanded.n_t; ++t) {
            const double price = charger.price_per_kwh.at(static_cast<std::size_t>(t - 1));
            for (VarId x : frag.f_charge[s][static_cast<std::size_t>(t - 1)])
                cost += price * expanded.unit_kwh * charger.rate_levels_per_step *
                        sol.values[static_cast<std::size_t>(x)];
        }
    }
    return cost;
}

FleetSchedule extract_fleet_solution(const LpModel& model, const EamodFragment& frag,
                                     const ExpandedGraph& expanded, const RoadGraph& road,
                                     std::span<const ChargerSpec> chargers,
                                     const LpSolution& sol, double tol) {
    if (sol.status != LpStatus::optimal)
        throw std::runtime_error("extract_fleet_solution requires an optimal solution");
    FleetSchedule schedule;
    const int n_t = expanded.n_t;
    const int n_c = expanded.n_c;
    const double flow_eps = 1e-12;

    auto value = [&](VarId x) { return sol.values[static_cast<std::size_t>(x)]; };

    for (std::size_t e = 0; e < road.arcs.size(); ++e) {
        const auto& arc = road.arcs[e];
        for (int t = 1; t <= n_t; ++t)
            for (int c = 1; c <= n_c; ++c) {
                const double f = value(frag.f_road[e][static_cast<std::size_t>(t - 1)]
                                                   [static_cast<std::size_t>(c - 1)]);
                if (f > flow_eps) {
                    schedule.flows.push_back({'r',
                                              e,
                                              {arc.from, t, c},
                                              {arc.to, t + arc.traversal_steps,
                                               c - arc.energy_levels},
                                              f});
                    schedule.rebalancing_km += arc.distance_km * f;
                }
            }
    }
    schedule.charger_occupancy.resize(chargers.size());
    schedule.charger_energy_kwh.resize(chargers.size());
    for (std::size_t s = 0; s < chargers.size(); ++s) {
        const auto& charger = chargers[s];
        schedule.charger_occupancy[s].assign(static_cast<std::size_t>(n_t), 0.0);
        schedule.charger_energy_kwh[s].assign(static_cast<std::size_t>(n_t), 0.0);
        for (int t = 1; t <= n_t; ++t) {
            double occupancy = 0.0;
            for (int c = 1; c <= n_c; ++c) {
                const double f = value(frag.f_charge[s][static_cast<std::size_t>(t - 1)]
                                                     [static_cast<std::size_t>(c - 1)]);
                occupancy += f;
                if (f > flow_eps)
                    schedule.flows.push_back({'s',
                                              s,
                                              {charger.vertex, t, c},
                                              {charger.vertex, t + 1,
                                               c + charger.rate_levels_per_step},
                                              f});
            }
            schedule.charger_occupancy[s][static_cast<std::size_t>(t - 1)] = occupancy;
            schedule.charger_energy_kwh[s][static_cast<std::size_t>(t - 1)] =
                occupancy * charger.rate_levels_per_step * expanded.unit_kwh;
        }
    }
    for (std::size_t v = 0; v < expanded.road_vertices.size(); ++v)
        for (int t = 1; t <= n_t; ++t)
            for (int c = 1; c <= n_c; ++c) {
                const double f = value(frag.f_hold[v][static_cast<std::size_t>(t - 1)]
                                                   [static_cast<std::size_t>(c - 1)]);
                if (f > flow_eps)
                    schedule.flows.push_back({'h',
                                              v,
                                              {expanded.road_vertices[v], t, c},
                                              {expanded.road_vertices[v], t + 1, c},
                                              f});
            }
    schedule.trip_entry.resize(frag.lambda_in.size());
    for (std::size_t m = 0; m < frag.lambda_in.size(); ++m)
        for (VarId x : frag.lambda_in[m]) schedule.trip_entry[m].push_back(value(x));

    // Conservation audit over the balance and demand rows.
    double worst = 0.0;
    auto audit = [&](const std::vector<RowId>& rows) {
        for (RowId r : rows) {
            const auto& row = model.row(r);
            double lhs = 0.0;
            for (const auto& [v, c] : row.coefs) lhs += c * value(v);
            worst = std::max(worst, std::abs(lhs - row.rhs));
        }
    };
    audit(frag.balance_rows);
    audit(frag.demand_rows);
    schedule.max_conservation_residual = worst;
    if (worst > tol)
        throw std::runtime_error("fleet solution violates conservation by " +
                                 std::to_string(worst));
    return schedule;
}

}  // namespace fleetgrid
