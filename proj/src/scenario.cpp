#include "fleetgrid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace fleetgrid {

using nlohmann::json;

namespace {

// Series fields accept either a scalar (constant series) or an array of
// length n_t.
std::vector<double> read_series(const json& node, int n_t, const std::string& loc,
                                Diagnostics& diag) {
    std::vector<double> out;
    if (node.is_number()) {
        out.assign(static_cast<std::size_t>(n_t), node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number()) {
                diag.error(loc, "series entries must be numbers");
                return out;
            }
            out.push_back(v.get<double>());
        }
        if (static_cast<int>(out.size()) != n_t)
            diag.error(loc, "series length " + std::to_string(out.size()) +
                                " differs from horizon " + std::to_string(n_t));
    } else {
        diag.error(loc, "expected a number or an array");
    }
    return out;
}

Complex read_complex(const json& node, const std::string& loc, Diagnostics& diag) {
    if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
        diag.error(loc, "expected a complex number as [re, im]");
        return {0.0, 0.0};
    }
    return {node[0].get<double>(), node[1].get<double>()};
}

Eigen::MatrixXcd read_complex_matrix(const json& node, Eigen::Index dim, const std::string& loc,
                                     Diagnostics& diag) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != dim) {
        diag.error(loc, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " complex matrix");
        return out;
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& row = node[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            diag.error(loc, "matrix row " + std::to_string(i) + " has the wrong length");
            return out;
        }
        for (Eigen::Index j = 0; j < dim; ++j)
            out(i, j) = read_complex(row[static_cast<std::size_t>(j)],
                                     loc + "/" + std::to_string(i) + "/" + std::to_string(j),
                                     diag);
    }
    return out;
}

int phase_index_in(const PhaseSet& phases, char letter, const std::string& loc,
                   Diagnostics& diag) {
    PhaseSet one;
    try {
        one = parse_phases(std::string(1, letter));
    } catch (const ValidationError& e) {
        diag.error(loc, e.what());
        return -1;
    }
    auto it = std::find(phases.begin(), phases.end(), one.front());
    if (it == phases.end()) {
        diag.error(loc, std::string("phase '") + letter + "' not present at this bus");
        return -1;
    }
    return static_cast<int>(it - phases.begin());
}

Pdn load_pdn(const json& j, std::size_t index, int n_t, Diagnostics& diag) {
    const std::string root = "/pdns/" + std::to_string(index);
    Pdn pdn;
    pdn.n_t = n_t;
    pdn.id = j.value("id", "d" + std::to_string(index));

    const std::string units = j.value("units", "per_unit");
    const bool si = units == "si";
    if (!si && units != "per_unit") diag.error(root + "/units", "units must be si or per_unit");

    double base_s_mva = 1.0, base_v_kv = 1.0;
    if (j.contains("base")) {
        base_s_mva = j["base"].value("s_mva", 1.0);
        base_v_kv = j["base"].value("v_kv", 1.0);
    } else if (si) {
        diag.error(root + "/base", "SI-valued networks must declare per-unit bases");
    }
    if (base_s_mva <= 0.0 || base_v_kv <= 0.0)
        diag.error(root + "/base", "per-unit bases must be positive");

    double u_min_default = 0.96, u_max_default = 1.04;
    if (j.contains("voltage_bounds")) {
        u_min_default = j["voltage_bounds"].value("u_min", u_min_default);
        u_max_default = j["voltage_bounds"].value("u_max", u_max_default);
    }

    if (!j.contains("buses") || !j["buses"].is_array() || j["buses"].empty()) {
        diag.error(root + "/buses", "at least the reference bus is required");
        return pdn;
    }

    std::vector<int> external_ids;
    for (std::size_t b = 0; b < j["buses"].size(); ++b) {
        const auto& jb = j["buses"][b];
        const std::string loc = root + "/buses/" + std::to_string(b);
        Bus bus;
        external_ids.push_back(jb.value("id", static_cast<int>(b)));
        try {
            bus.phases = parse_phases(jb.value("phases", "abc"));
        } catch (const ValidationError& e) {
            diag.error(loc + "/phases", e.what());
            bus.phases = parse_phases("abc");
        }
        const auto dim = static_cast<Eigen::Index>(bus.phases.size());
        const char* shunt_key = si ? "shunt_siemens" : "shunt_pu";
        if (jb.contains(shunt_key))
            bus.shunt = read_complex_matrix(jb[shunt_key], dim, loc + "/" + shunt_key, diag);
        bus.u_min = Eigen::VectorXd::Constant(dim, jb.value("u_min", u_min_default));
        bus.u_max = Eigen::VectorXd::Constant(dim, jb.value("u_max", u_max_default));
        pdn.buses.push_back(std::move(bus));
    }
    auto bus_index = [&](int external, const std::string& loc) -> int {
        auto it = std::find(external_ids.begin(), external_ids.end(), external);
        if (it == external_ids.end()) {
            diag.error(loc, "unknown bus id " + std::to_string(external));
            return -1;
        }
        return static_cast<int>(it - external_ids.begin());
    };

    if (j.contains("links")) {
        for (std::size_t l = 0; l < j["links"].size(); ++l) {
            const auto& jl = j["links"][l];
            const std::string loc = root + "/links/" + std::to_string(l);
            Link link;
            link.from = bus_index(jl.value("from", -1), loc + "/from");
            link.to = bus_index(jl.value("to", -1), loc + "/to");
            if (link.from < 0 || link.to < 0) continue;
            try {
                link.phases = parse_phases(jl.value("phases", "abc"));
            } catch (const ValidationError& e) {
                diag.error(loc + "/phases", e.what());
                continue;
            }
            const auto dim = static_cast<Eigen::Index>(link.phases.size());
            const char* z_key = si ? "z_ohm" : "z_pu";
            if (!jl.contains(z_key)) {
                diag.error(loc, std::string("missing impedance matrix ") + z_key);
                continue;
            }
            link.z = read_complex_matrix(jl[z_key], dim, loc + "/" + z_key, diag);
            pdn.links.push_back(std::move(link));
        }
    }

    // Uncontrollable wye constant-power loads, additive per entry.
    for (auto& bus : pdn.buses)
        bus.load.assign(static_cast<std::size_t>(n_t),
                        Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bus.phases.size())));
    if (j.contains("loads")) {
        for (std::size_t e = 0; e < j["loads"].size(); ++e) {
            const auto& jl = j["loads"][e];
            const std::string loc = root + "/loads/" + std::to_string(e);
            const int b = bus_index(jl.value("bus", -1), loc + "/bus");
            if (b < 0) continue;
            if (b == 0) {
                diag.error(loc, "loads at the reference bus are not supported");
                continue;
            }
            const std::string phase_str = jl.value("phase", "");
            if (phase_str.size() != 1) {
                diag.error(loc + "/phase", "expected a single phase letter");
                continue;
            }
            const int p = phase_index_in(pdn.buses[static_cast<std::size_t>(b)].phases,
                                         phase_str[0], loc + "/phase", diag);
            if (p < 0) continue;
            const char* p_key = si ? "p_kw" : "p_pu";
            const char* q_key = si ? "q_kvar" : "q_pu";
            std::vector<double> ps(static_cast<std::size_t>(n_t), 0.0);
            std::vector<double> qs(static_cast<std::size_t>(n_t), 0.0);
            if (jl.contains(p_key)) ps = read_series(jl[p_key], n_t, loc + "/" + p_key, diag);
            if (jl.contains(q_key)) qs = read_series(jl[q_key], n_t, loc + "/" + q_key, diag);
            const double scale = si ? 1e3 : 1.0;  // kW/kvar to W/var
            for (int t = 0; t < n_t && static_cast<std::size_t>(t) < ps.size() &&
                            static_cast<std::size_t>(t) < qs.size();
                 ++t)
                pdn.buses[static_cast<std::size_t>(b)].load[static_cast<std::size_t>(t)][p] +=
                    Complex(ps[static_cast<std::size_t>(t)] * scale,
                            qs[static_cast<std::size_t>(t)] * scale);
        }
    }

    // Pre-declared controllable slots (charger couplings append more).
    if (j.contains("controllable")) {
        for (std::size_t k = 0; k < j["controllable"].size(); ++k) {
            const auto& jc = j["controllable"][k];
            const std::string loc = root + "/controllable/" + std::to_string(k);
            const int b = bus_index(jc.value("bus", -1), loc + "/bus");
            if (b <= 0) {
                diag.error(loc, "controllable load must sit on a PQ bus");
                continue;
            }
            ControllableSlot slot;
            slot.bus = b;
            const auto dim =
                static_cast<Eigen::Index>(pdn.buses[static_cast<std::size_t>(b)].phases.size());
            const double to_w = 1e3;  // bounds are given in kW / kvar
            slot.p_min = Eigen::VectorXd::Constant(dim, jc.value("p_min_kw", 0.0) * to_w);
            slot.p_max = Eigen::VectorXd::Constant(
                dim, jc.contains("p_max_kw") ? jc["p_max_kw"].get<double>() * to_w : kInf);
            slot.q_min = Eigen::VectorXd::Constant(dim, jc.value("q_min_kvar", 0.0) * to_w);
            slot.q_max = Eigen::VectorXd::Constant(dim, jc.value("q_max_kvar", 0.0) * to_w);
            pdn.controllable.push_back(std::move(slot));
        }
    }

    // Reference voltage: balanced magnitude or an explicit per-phase series.
    const auto ref_dim = static_cast<Eigen::Index>(pdn.reference_phases().size());
    if (j.contains("reference") && j["reference"].contains("series")) {
        const auto& series = j["reference"]["series"];
        pdn.v_ref.assign(static_cast<std::size_t>(n_t), Eigen::VectorXcd::Zero(ref_dim));
        for (std::size_t p = 0; p < pdn.reference_phases().size(); ++p) {
            const std::string key(1, phase_letter(pdn.reference_phases()[p]));
            if (!series.contains(key)) {
                diag.error(root + "/reference/series", "missing phase " + key);
                continue;
            }
            const auto& arr = series[key];
            if (!arr.is_array() || static_cast<int>(arr.size()) != n_t) {
                diag.error(root + "/reference/series/" + key, "expected n_t complex entries");
                continue;
            }
            for (int t = 0; t < n_t; ++t)
                pdn.v_ref[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(p)] =
                    read_complex(arr[static_cast<std::size_t>(t)],
                                 root + "/reference/series/" + key, diag);
        }
    } else {
        double mag = 1.0;
        if (j.contains("reference")) mag = j["reference"].value("magnitude_pu", 1.0);
        const double volts = si ? mag * base_v_kv * 1e3 : mag;
        pdn.v_ref.assign(static_cast<std::size_t>(n_t),
                         balanced_unit_voltage(pdn.reference_phases()) * volts);
    }

    // Substation rating on |sum of per-phase injections|.
    if (j.contains("rating_mva"))
        pdn.rating = j["rating_mva"].get<double>() * 1e6;
    else if (j.contains("rating_pu") && !si)
        pdn.rating = j["rating_pu"].get<double>() * base_s_mva * 1e6;
    else
        diag.error(root, "missing substation rating (rating_mva or rating_pu)");

    if (j.contains("price_usd_per_kwh"))
        pdn.price_per_kwh = read_series(j["price_usd_per_kwh"], n_t,
                                        root + "/price_usd_per_kwh", diag);
    else
        diag.error(root, "missing price_usd_per_kwh");

    // Normalize everything to per-unit. Loads and slot bounds above were
    // collected in SI (W/var); rating in VA.
    pdn.units = Units::si;
    pdn.v_base_v = base_v_kv * 1e3;
    pdn.s_base_va = base_s_mva * 1e6;
    if (si) {
        Pdn normalized = per_unit_normalize(pdn, base_s_mva, base_v_kv);
        normalized.id = pdn.id;
        return normalized;
    }
    // Per-unit networks: link impedances, shunts, per-unit loads and the
    // reference voltage are already normalized; slot bounds and the rating
    // were read in physical units and need scaling.
    pdn.units = Units::per_unit;
    for (auto& slot : pdn.controllable) {
        slot.p_min /= pdn.s_base_va;
        slot.p_max /= pdn.s_base_va;
        slot.q_min /= pdn.s_base_va;
        slot.q_max /= pdn.s_base_va;
    }
    pdn.rating /= pdn.s_base_va;
    return pdn;
}

}  // namespace

ScenarioLoadResult load_scenario(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> seed_override) {
    ScenarioLoadResult result;
    Diagnostics& diag = result.diagnostics;

    std::ifstream in(path);
    if (!in) {
        diag.error("/", "cannot open " + path.string());
        return result;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        diag.error("/", std::string("JSON parse error: ") + e.what());
        return result;
    }

    Scenario sc;
    if (!j.contains("horizon")) {
        diag.error("/horizon", "missing horizon block");
        return result;
    }
    const auto& jh = j["horizon"];
    sc.n_t = jh.value("n_t", 0);
    sc.n_c = jh.value("n_c", 0);
    sc.dt_hours = jh.value("dt_hours", 0.1);
    sc.unit_kwh = jh.value("unit_kwh", 0.0);
    if (sc.n_t < 1) diag.error("/horizon/n_t", "horizon must be >= 1");
    if (sc.n_c < 1) diag.error("/horizon/n_c", "charge levels must be >= 1");
    if (sc.dt_hours <= 0.0) diag.error("/horizon/dt_hours", "time step must be positive");
    if (sc.unit_kwh <= 0.0) diag.error("/horizon/unit_kwh", "charge unit must be positive");
    if (diag.has_errors()) return result;

    sc.distance_price = j.value("costs", json::object()).value("distance_price_usd_per_km", 0.0);
    sc.seed = j.value("seed", static_cast<std::uint64_t>(0));
    if (seed_override) sc.seed = *seed_override;

    if (j.contains("road_network")) {
        const auto& jr = j["road_network"];
        if (jr.contains("vertices"))
            for (const auto& v : jr["vertices"]) sc.road.vertices.push_back(v.get<VertexId>());
        std::sort(sc.road.vertices.begin(), sc.road.vertices.end());
        if (jr.contains("arcs")) {
            for (std::size_t i = 0; i < jr["arcs"].size(); ++i) {
                const auto& ja = jr["arcs"][i];
                const std::string loc = "/road_network/arcs/" + std::to_string(i);
                RoadArc arc;
                arc.from = ja.value("from", 0u);
                arc.to = ja.value("to", 0u);
                arc.distance_km = ja.value("distance_km", 0.0);
                arc.capacity_per_step = ja.value("capacity_per_step", 0.0);
                if (ja.contains("travel_steps"))
                    arc.traversal_steps = ja["travel_steps"].get<int>();
                else if (ja.contains("travel_minutes"))
                    // Whole steps, rounded up: travel time is never understated.
                    arc.traversal_steps = static_cast<int>(
                        std::ceil(ja["travel_minutes"].get<double>() / (sc.dt_hours * 60.0) -
                                  1e-9));
                else
                    diag.error(loc, "need travel_steps or travel_minutes");
                if (ja.contains("energy_levels"))
                    arc.energy_levels = ja["energy_levels"].get<int>();
                else if (ja.contains("energy_kwh"))
                    // Whole charge units, rounded up: range is never overstated.
                    arc.energy_levels = static_cast<int>(
                        std::ceil(ja["energy_kwh"].get<double>() / sc.unit_kwh - 1e-9));
                else
                    diag.error(loc, "need energy_levels or energy_kwh");
                arc.traversal_steps = std::max(arc.traversal_steps, 1);
                sc.road.arcs.push_back(arc);
            }
        }
        diag.merge(sc.road.validate());
    } else {
        diag.error("/road_network", "missing road network");
    }

    if (j.contains("chargers")) {
        for (std::size_t i = 0; i < j["chargers"].size(); ++i) {
            const auto& jc = j["chargers"][i];
            const std::string loc = "/chargers/" + std::to_string(i);
            ChargerSpec charger;
            charger.vertex = jc.value("vertex", 0u);
            charger.rate_levels_per_step = jc.value("rate_levels_per_step", 1);
            charger.plugs = jc.value("plugs", 1);
            if (!sc.road.has_vertex(charger.vertex))
                diag.error(loc + "/vertex", "charger vertex is not a road vertex");
            if (charger.rate_levels_per_step < 1 ||
                charger.rate_levels_per_step > sc.n_c - 1)
                diag.error(loc + "/rate_levels_per_step",
                           "rate must lie in [1, n_c - 1]");
            if (charger.plugs < 1) diag.error(loc + "/plugs", "plugs must be >= 1");
            if (jc.contains("price_usd_per_kwh"))
                charger.price_per_kwh = read_series(jc["price_usd_per_kwh"], sc.n_t,
                                                    loc + "/price_usd_per_kwh", diag);
            // Stations without a price inherit it from their coupled
            // substation once couplings are resolved.
            sc.chargers.push_back(std::move(charger));
        }
    }

    if (j.contains("trips")) {
        for (std::size_t i = 0; i < j["trips"].size(); ++i) {
            const auto& jt = j["trips"][i];
            const std::string loc = "/trips/" + std::to_string(i);
            TripRequest trip;
            trip.origin = jt.value("origin", 0u);
            trip.destination = jt.value("destination", 0u);
            trip.departure_step = jt.value("departure_step", 1);
            trip.demand = jt.value("demand", 0.0);
            if (!sc.road.has_vertex(trip.origin) || !sc.road.has_vertex(trip.destination))
                diag.error(loc, "trip endpoint is not a road vertex");
            if (trip.origin == trip.destination)
                diag.error(loc, "origin equals destination");
            if (trip.departure_step < 1 || trip.departure_step > sc.n_t)
                diag.error(loc + "/departure_step", "outside the horizon");
            if (trip.demand < 0.0) diag.error(loc + "/demand", "demand must be nonnegative");
            sc.trips.push_back(trip);
        }
    }

    if (j.contains("fleet")) {
        const auto& jf = j["fleet"];
        if (jf.contains("initial")) {
            for (std::size_t i = 0; i < jf["initial"].size(); ++i) {
                const auto& je = jf["initial"][i];
                const std::string loc = "/fleet/initial/" + std::to_string(i);
                const auto vertex = je.value("vertex", 0u);
                const int level = je.value("charge_level", 0);
                const double vehicles = je.value("vehicles", 0.0);
                if (!sc.road.has_vertex(vertex)) diag.error(loc, "unknown vertex");
                if (level < 1 || level > sc.n_c) diag.error(loc, "charge level out of range");
                if (vehicles < 0.0) diag.error(loc, "vehicle count must be nonnegative");
                sc.boundary.initial[{vertex, level}] += vehicles;
            }
        } else {
            diag.error("/fleet/initial", "missing initial fleet distribution");
        }
        if (jf.contains("final")) {
            const auto& je = jf["final"];
            if (je.contains("distribution")) {
                sc.boundary.final_kind = FleetBoundary::FinalKind::distribution;
                for (const auto& entry : je["distribution"])
                    sc.boundary.final_distribution[{entry.value("vertex", 0u),
                                                    entry.value("charge_level", 0)}] +=
                        entry.value("vehicles", 0.0);
            } else {
                sc.boundary.final_kind = FleetBoundary::FinalKind::aggregate;
                sc.boundary.min_soc_fraction = je.value("min_soc_fraction", 0.5);
                if (je.contains("min_counts"))
                    for (const auto& entry : je["min_counts"])
                        sc.boundary.final_min[{entry.value("vertex", 0u),
                                               entry.value("charge_level", 0)}] =
                            entry.value("vehicles", 0.0);
            }
        }
    } else {
        diag.error("/fleet", "missing fleet block");
    }

    if (j.contains("pdns"))
        for (std::size_t d = 0; d < j["pdns"].size(); ++d)
            sc.pdns.push_back(load_pdn(j["pdns"][d], d, sc.n_t, diag));
    for (const auto& pdn : sc.pdns) diag.merge(validate_network(pdn));

    // Charger-to-network couplings. Stations without an explicit bus are
    // attached to a seeded-random PQ bus of the target network.
    std::mt19937_64 rng(sc.seed);
    if (j.contains("coupling")) {
        std::vector<bool> seen(sc.chargers.size(), false);
        for (std::size_t i = 0; i < j["coupling"].size(); ++i) {
            const auto& jc = j["coupling"][i];
            const std::string loc = "/coupling/" + std::to_string(i);
            CouplingEntry entry;
            const auto charger_vertex = jc.value("charger_vertex", 0u);
            auto cit = std::find_if(sc.chargers.begin(), sc.chargers.end(),
                                    [&](const ChargerSpec& s) {
                                        return s.vertex == charger_vertex;
                                    });
            if (cit == sc.chargers.end()) {
                diag.error(loc + "/charger_vertex", "no charger at this vertex");
                continue;
            }
            entry.charger_index = static_cast<std::size_t>(cit - sc.chargers.begin());
            if (seen[entry.charger_index]) {
                diag.error(loc, "charger coupled more than once");
                continue;
            }
            const std::string pdn_id = jc.value("pdn", "");
            auto pit = std::find_if(sc.pdns.begin(), sc.pdns.end(),
                                    [&](const Pdn& p) { return p.id == pdn_id; });
            if (pit == sc.pdns.end()) {
                diag.error(loc + "/pdn", "unknown network id '" + pdn_id + "'");
                continue;
            }
            entry.pdn_index = static_cast<std::size_t>(pit - sc.pdns.begin());
            Pdn& pdn = sc.pdns[entry.pdn_index];

            int bus = -1;
            if (jc.contains("bus")) {
                const int external = jc["bus"].get<int>();
                const auto& jb = j["pdns"][entry.pdn_index]["buses"];
                for (std::size_t b = 0; b < jb.size(); ++b)
                    if (jb[b].value("id", static_cast<int>(b)) == external)
                        bus = static_cast<int>(b);
                if (bus < 0) {
                    diag.error(loc + "/bus", "unknown bus id " + std::to_string(external));
                    continue;
                }
            } else if (pdn.buses.size() > 1) {
                std::uniform_int_distribution<int> pick(
                    1, static_cast<int>(pdn.buses.size()) - 1);
                bus = pick(rng);
            }
            if (bus <= 0) {
                diag.error(loc, "charging stations must attach to a PQ bus");
                continue;
            }
            if (pdn.buses[static_cast<std::size_t>(bus)].phases.size() != 3) {
                diag.error(loc, "charger bus must carry all three phases");
                continue;
            }
            // Create the controllable slot for this station: nonnegative
            // active power split equally over the phases, unity power factor.
            ControllableSlot slot;
            slot.bus = bus;
            slot.p_min = Eigen::VectorXd::Zero(3);
            slot.p_max = Eigen::VectorXd::Constant(3, kInf);
            if (jc.contains("p_max_kw"))
                slot.p_max = Eigen::VectorXd::Constant(
                    3, jc["p_max_kw"].get<double>() * 1e3 / pdn.s_base_va / 3.0);
            slot.q_min = Eigen::VectorXd::Zero(3);
            slot.q_max = Eigen::VectorXd::Zero(3);
            entry.slot = pdn.controllable.size();
            pdn.controllable.push_back(std::move(slot));
            seen[entry.charger_index] = true;
            sc.couplings.push_back(entry);

            // Inherit the substation price when the station has none.
            auto& charger = sc.chargers[entry.charger_index];
            if (charger.price_per_kwh.empty()) charger.price_per_kwh = pdn.price_per_kwh;
        }
    }
    for (std::size_t s = 0; s < sc.chargers.size(); ++s)
        if (sc.chargers[s].price_per_kwh.empty())
            diag.error("/chargers/" + std::to_string(s),
                       "charger has no price and no coupling to inherit one from");

    if (j.contains("solver")) {
        sc.solver.command = j["solver"].value("command", "");
        sc.solver.feasibility_tol = j["solver"].value("feasibility_tol", 1e-6);
    }
    if (j.contains("report")) {
        sc.report.du_bin_width = j["report"].value("du_bin_width", 0.001);
        sc.report.ds_bin_width_mva = j["report"].value("ds_bin_width_mva", 0.05);
        sc.report.serious_du_threshold = j["report"].value("serious_du_threshold", 0.005);
    }
    if (j.contains("power_flow")) {
        sc.pf.tolerance = j["power_flow"].value("tolerance", 1e-8);
        sc.pf.max_iterations = j["power_flow"].value("max_iterations", 100);
    }

    if (!diag.has_errors()) result.scenario = std::move(sc);
    return result;
}

Diagnostics validate_scenario(const std::filesystem::path& path) {
    return load_scenario(path).diagnostics;
}

}  // namespace fleetgrid
