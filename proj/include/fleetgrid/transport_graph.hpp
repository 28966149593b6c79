#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fleetgrid/diagnostics.hpp"

namespace fleetgrid {

using VertexId = std::uint32_t;

struct RoadArc {
    VertexId from = 0;
    VertexId to = 0;
    double distance_km = 0.0;
    int traversal_steps = 1;   // whole time steps, >= 1
    int energy_levels = 0;     // whole charge units consumed, >= 0
    double capacity_per_step = 0.0;  // vehicles entering the arc per time step
};

struct RoadGraph {
    std::vector<VertexId> vertices;  // sorted, unique
    std::vector<RoadArc> arcs;

    bool has_vertex(VertexId v) const;
    /// Checks the structural invariants (declared endpoints, no self-loops,
    /// traversal_steps >= 1, energy_levels >= 0, capacity >= 0).
    Diagnostics validate() const;
};

struct ChargerSpec {
    VertexId vertex = 0;
    int rate_levels_per_step = 1;          // SoC units recharged per time step
    int plugs = 1;                         // concurrent vehicles
    std::vector<double> price_per_kwh;     // length n_t
};

struct TripRequest {
    VertexId origin = 0;
    VertexId destination = 0;
    int departure_step = 1;  // 1-based
    double demand = 0.0;
};

// Vertex of the time/state-of-charge expanded graph: road vertex at a
// discrete time step holding a discrete charge level (both 1-based).
struct ExpandedVertex {
    VertexId vertex;
    int t;
    int c;
    friend auto operator<=>(const ExpandedVertex&, const ExpandedVertex&) = default;
};

struct ExpandedArc {
    ExpandedVertex tail;
    ExpandedVertex head;
    // Index of the generating road arc (road arcs) or charger (charge arcs).
    std::size_t source_index;
    friend auto operator<=>(const ExpandedArc&, const ExpandedArc&) = default;
};

struct ExpandedGraph {
    int n_t = 0;
    int n_c = 0;
    double step_hours = 0.0;
    double unit_kwh = 0.0;
    std::vector<VertexId> road_vertices;
    std::size_t num_road_arcs = 0;  // |E| of the generating road graph
    std::size_t num_chargers = 0;   // |S|
    std::vector<ExpandedArc> road_arcs;    // sorted lexicographically
    std::vector<ExpandedArc> charge_arcs;  // sorted lexicographically

    friend bool operator==(const ExpandedGraph&, const ExpandedGraph&) = default;
};

/// Expands the road graph over time and charge. Road arcs advance time by
/// the traversal duration and drop charge by the arc consumption; charge
/// arcs stay at a charging station for a single step and raise charge by
/// the station rate. Arc lists come out sorted by (i, t, c, i', t', c').
ExpandedGraph build_expanded_graph(const RoadGraph& road, std::span<const ChargerSpec> chargers,
                                   int n_t, int n_c, double step_hours = 0.0,
                                   double unit_kwh = 0.0);

struct Route {
    std::vector<VertexId> path;  // origin..destination vertex sequence
    int traversal_steps = 0;     // tau
    int energy_levels = 0;       // gamma
};

struct RoutePlan {
    std::vector<Route> routes;  // aligned with the trip list
    // Residual capacity per (road arc index, departure step 1-based),
    // only for slots that saw customer flow; query via residual_capacity().
    std::map<std::pair<std::size_t, int>, double> reduced_slots;
    Diagnostics diagnostics;  // unroutable or capacity-infeasible trips

    double residual_capacity(const RoadGraph& road, std::size_t arc_index, int t) const;
};

/// Routes every trip on a shortest-time path whose per-(arc, step) capacity
/// can absorb the whole demand on top of previously routed trips. Trips are
/// processed in input order; ties between equal-time paths break on lower
/// energy, then lexicographic vertex sequence. Trips that do not fit are
/// reported in the plan diagnostics and left without a route.
RoutePlan precompute_customer_routes(const RoadGraph& road, std::span<const TripRequest> trips,
                                     int n_t);

struct VariableCounts {
    long long eamod = 0;
    long long mopf = 0;  // summed over all distribution networks
    long long total = 0;
};

struct PdnShape {
    std::vector<int> bus_phase_counts;   // |phi_n| per bus, reference first
    std::vector<int> link_phase_counts;  // |phi_mn| per link
    std::vector<int> load_phase_counts;  // |phi_{beta_k}| per controllable load
};

/// Decision-variable counts of the fleet and grid programs:
/// fleet: n_t*n_c*(|E|+|S|) + n_c*n_m + n_t*n_c*|V| + n_c*|V|,
/// grid (per network): n_t*(sum |phi_n|^2 + 2*sum |phi_mn| + 2*|phi_0|
///                          + 2*sum |phi_{beta_k}|).
VariableCounts model_statistics(const ExpandedGraph& expanded, std::size_t num_trips,
                                std::span<const PdnShape> pdns);

}  // namespace fleetgrid
