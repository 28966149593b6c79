#include "fleetgrid/transport_graph.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>

namespace fleetgrid {

bool RoadGraph::has_vertex(VertexId v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

Diagnostics RoadGraph::validate() const {
    Diagnostics diag;
    if (!std::is_sorted(vertices.begin(), vertices.end()) ||
        std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
        diag.error("/road_network/vertices", "vertex list must be sorted and unique");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const auto& a = arcs[i];
        const std::string loc = "/road_network/arcs/" + std::to_string(i);
        if (!has_vertex(a.from) || !has_vertex(a.to))
            diag.error(loc, "arc endpoint is not a declared vertex");
        if (a.from == a.to) diag.error(loc, "self-loop road arcs are not allowed");
        if (a.traversal_steps < 1) diag.error(loc, "traversal_steps must be >= 1");
        if (a.energy_levels < 0) diag.error(loc, "energy_levels must be >= 0");
        if (a.capacity_per_step < 0.0) diag.error(loc, "capacity must be nonnegative");
        if (a.distance_km < 0.0) diag.error(loc, "distance must be nonnegative");
    }
    return diag;
}

ExpandedGraph build_expanded_graph(const RoadGraph& road, std::span<const ChargerSpec> chargers,
                                   int n_t, int n_c, double step_hours, double unit_kwh) {
    if (n_t < 1 || n_c < 1) throw ValidationError("horizon and charge levels must be >= 1");
    Diagnostics base = road.validate();
    if (base.has_errors()) throw ValidationError("invalid road graph:\n" + base.to_string());
    for (const auto& a : road.arcs)
        if (a.energy_levels >= n_c)
            throw ValidationError("road arc " + std::to_string(a.from) + "->" +
                                  std::to_string(a.to) + " consumes " +
                                  std::to_string(a.energy_levels) +
                                  " charge levels, which no vehicle can hold (n_c = " +
                                  std::to_string(n_c) + ")");
    for (const auto& s : chargers) {
        if (!road.has_vertex(s.vertex))
            throw ValidationError("charger vertex " + std::to_string(s.vertex) +
                                  " is not a road vertex");
        if (s.rate_levels_per_step < 1 || s.rate_levels_per_step > n_c - 1)
            throw ValidationError("charger at vertex " + std::to_string(s.vertex) +
                                  " has rate " + std::to_string(s.rate_levels_per_step) +
                                  ", outside [1, n_c - 1]");
    }

    ExpandedGraph g;
    g.n_t = n_t;
    g.n_c = n_c;
    g.step_hours = step_hours;
    g.unit_kwh = unit_kwh;
    g.road_vertices = road.vertices;
    g.num_road_arcs = road.arcs.size();
    g.num_chargers = chargers.size();

    for (std::size_t e = 0; e < road.arcs.size(); ++e) {
        const auto& a = road.arcs[e];
        for (int t = 1; t + a.traversal_steps <= n_t; ++t)
            for (int c = a.energy_levels + 1; c <= n_c; ++c)
                g.road_arcs.push_back({{a.from, t, c},
                                       {a.to, t + a.traversal_steps, c - a.energy_levels},
                                       e});
    }
    for (std::size_t k = 0; k < chargers.size(); ++k) {
        const auto& s = chargers[k];
        for (int t = 1; t + 1 <= n_t; ++t)
            for (int c = 1; c + s.rate_levels_per_step <= n_c; ++c)
                g.charge_arcs.push_back(
                    {{s.vertex, t, c}, {s.vertex, t + 1, c + s.rate_levels_per_step}, k});
    }
    std::sort(g.road_arcs.begin(), g.road_arcs.end());
    std::sort(g.charge_arcs.begin(), g.charge_arcs.end());
    return g;
}

double RoutePlan::residual_capacity(const RoadGraph& road, std::size_t arc_index, int t) const {
    auto it = reduced_slots.find({arc_index, t});
    if (it != reduced_slots.end()) return it->second;
    return road.arcs[arc_index].capacity_per_step;
}

namespace {

struct SearchLabel {
    int time = 0;    // arrival step at the labeled vertex
    int energy = 0;  // charge levels consumed so far
    std::vector<VertexId> path;
    std::vector<std::size_t> arcs;  // road arc indices along the path

    bool operator<(const SearchLabel& other) const {
        if (time != other.time) return time < other.time;
        if (energy != other.energy) return energy < other.energy;
        return path < other.path;
    }
    bool operator>(const SearchLabel& other) const { return other < *this; }
};

}  // namespace

RoutePlan precompute_customer_routes(const RoadGraph& road, std::span<const TripRequest> trips,
                                     int n_t) {
    RoutePlan plan;
    plan.routes.resize(trips.size());

    std::unordered_map<VertexId, std::vector<std::size_t>> out_arcs;
    for (std::size_t e = 0; e < road.arcs.size(); ++e)
        out_arcs[road.arcs[e].from].push_back(e);

    std::map<std::pair<std::size_t, int>, double> used;  // customer flow per (arc, step)
    auto residual = [&](std::size_t e, int t) {
        double capacity = road.arcs[e].capacity_per_step;
        auto it = used.find({e, t});
        return it == used.end() ? capacity : capacity - it->second;
    };

    for (std::size_t m = 0; m < trips.size(); ++m) {
        const auto& trip = trips[m];
        const std::string loc = "/trips/" + std::to_string(m);
        if (trip.origin == trip.destination) {
            plan.diagnostics.error(loc, "origin equals destination");
            continue;
        }
        if (!road.has_vertex(trip.origin) || !road.has_vertex(trip.destination)) {
            plan.diagnostics.error(loc, "trip endpoint is not a road vertex");
            continue;
        }
        if (trip.departure_step < 1 || trip.departure_step > n_t) {
            plan.diagnostics.error(loc, "departure step outside horizon");
            continue;
        }

        // Shortest-time search over (vertex, arrival step) with capacity
        // screening per (arc, entry step); ties break on energy then on the
        // lexicographic vertex sequence, so the winning label is unique.
        const double demand = trip.demand;
        const double eps = 1e-9 * std::max(1.0, demand);
        auto search = [&](bool respect_capacity) -> std::optional<SearchLabel> {
            std::priority_queue<SearchLabel, std::vector<SearchLabel>, std::greater<>> open;
            std::set<std::pair<VertexId, int>> settled;
            open.push({trip.departure_step, 0, {trip.origin}, {}});
            while (!open.empty()) {
                SearchLabel label = open.top();
                open.pop();
                const VertexId u = label.path.back();
                if (u == trip.destination) return label;
                if (!settled.insert({u, label.time}).second) continue;
                auto it = out_arcs.find(u);
                if (it == out_arcs.end()) continue;
                for (std::size_t e : it->second) {
                    const auto& arc = road.arcs[e];
                    if (label.time + arc.traversal_steps > n_t) continue;
                    if (respect_capacity && residual(e, label.time) + eps < demand) continue;
                    SearchLabel next = label;
                    next.time += arc.traversal_steps;
                    next.energy += arc.energy_levels;
                    next.path.push_back(arc.to);
                    next.arcs.push_back(e);
                    open.push(std::move(next));
                }
            }
            return std::nullopt;
        };

        auto best = search(true);
        if (!best) {
            if (search(false))
                plan.diagnostics.error(loc,
                                       "demand exceeds residual road capacity on every path");
            else
                plan.diagnostics.error(loc, "destination unreachable within the horizon");
            continue;
        }

        Route route;
        route.path = best->path;
        route.traversal_steps = best->time - trip.departure_step;
        route.energy_levels = best->energy;
        plan.routes[m] = route;

        // Commit the trip's flow along the chosen arcs.
        int t = trip.departure_step;
        for (std::size_t e : best->arcs) {
            used[{e, t}] += demand;
            t += road.arcs[e].traversal_steps;
        }
    }

    for (const auto& [slot, flow] : used) {
        double capacity = road.arcs[slot.first].capacity_per_step;
        plan.reduced_slots[slot] = std::max(0.0, capacity - flow);
    }
    return plan;
}

VariableCounts model_statistics(const ExpandedGraph& expanded, std::size_t num_trips,
                                std::span<const PdnShape> pdns) {
    const long long nt = expanded.n_t;
    const long long nc = expanded.n_c;
    const long long nv = static_cast<long long>(expanded.road_vertices.size());
    const long long ne = static_cast<long long>(expanded.num_road_arcs);
    const long long ns = static_cast<long long>(expanded.num_chargers);
    const long long nm = static_cast<long long>(num_trips);

    VariableCounts counts;
    counts.eamod = nt * nc * (ne + ns) + nc * nm + nt * nc * nv + nc * nv;
    for (const auto& shape : pdns) {
        long long per_t = 0;
        for (int p : shape.bus_phase_counts) per_t += static_cast<long long>(p) * p;
        for (int p : shape.link_phase_counts) per_t += 2LL * p;
        if (!shape.bus_phase_counts.empty()) per_t += 2LL * shape.bus_phase_counts.front();
        for (int p : shape.load_phase_counts) per_t += 2LL * p;
        counts.mopf += nt * per_t;
    }
    counts.total = counts.eamod + counts.mopf;
    return counts;
}

}  // namespace fleetgrid
