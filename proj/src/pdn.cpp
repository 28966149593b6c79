#include "fleetgrid/pdn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "fleetgrid/power_flow.hpp"

namespace fleetgrid {

char phase_letter(Phase p) {
    switch (p) {
        case Phase::a: return 'a';
        case Phase::b: return 'b';
        case Phase::c: return 'c';
    }
    return '?';
}

PhaseSet parse_phases(const std::string& letters) {
    PhaseSet out;
    for (char ch : letters) {
        switch (ch) {
            case 'a': out.push_back(Phase::a); break;
            case 'b': out.push_back(Phase::b); break;
            case 'c': out.push_back(Phase::c); break;
            default: throw ValidationError(std::string("unknown phase letter '") + ch + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) throw ValidationError("empty phase set");
    return out;
}

std::string phases_to_string(const PhaseSet& phases) {
    std::string s;
    for (Phase p : phases) s += phase_letter(p);
    return s;
}

std::vector<int> phase_positions(const PhaseSet& sub, const PhaseSet& super) {
    std::vector<int> pos;
    pos.reserve(sub.size());
    for (Phase p : sub) {
        auto it = std::find(super.begin(), super.end(), p);
        if (it == super.end())
            throw ValidationError("phase " + std::string(1, phase_letter(p)) +
                                  " not present in superset " + phases_to_string(super));
        pos.push_back(static_cast<int>(it - super.begin()));
    }
    return pos;
}

Eigen::VectorXcd balanced_unit_voltage(const PhaseSet& phases) {
    using std::numbers::pi;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(phases.size()));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        switch (phases[static_cast<std::size_t>(k)]) {
            case Phase::a: v[k] = Complex(1.0, 0.0); break;
            case Phase::b: v[k] = std::polar(1.0, -2.0 * pi / 3.0); break;
            case Phase::c: v[k] = std::polar(1.0, +2.0 * pi / 3.0); break;
        }
    }
    return v;
}

RadialTopology build_topology(const Pdn& pdn) {
    const int n = static_cast<int>(pdn.buses.size());
    RadialTopology topo;
    topo.parent_link.assign(static_cast<std::size_t>(n), -1);
    topo.children_links.resize(static_cast<std::size_t>(n));

    std::vector<std::vector<std::pair<int, int>>> adjacency(static_cast<std::size_t>(n));
    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        const auto& link = pdn.links[l];
        if (link.from < 0 || link.from >= n || link.to < 0 || link.to >= n)
            throw ValidationError("link endpoint outside bus range");
        adjacency[static_cast<std::size_t>(link.from)].emplace_back(link.to,
                                                                    static_cast<int>(l));
        adjacency[static_cast<std::size_t>(link.to)].emplace_back(link.from,
                                                                  static_cast<int>(l));
    }

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    while (!frontier.empty()) {
        int bus = frontier.front();
        frontier.pop();
        topo.forward_order.push_back(bus);
        for (auto [next, l] : adjacency[static_cast<std::size_t>(bus)]) {
            if (l == topo.parent_link[static_cast<std::size_t>(bus)]) continue;
            if (seen[static_cast<std::size_t>(next)])
                throw ValidationError("link " + std::to_string(l) + " closes a cycle");
            if (pdn.links[static_cast<std::size_t>(l)].to != next)
                throw ValidationError("link " + std::to_string(l) +
                                      " is oriented away from the reference bus");
            seen[static_cast<std::size_t>(next)] = 1;
            topo.parent_link[static_cast<std::size_t>(next)] = l;
            topo.children_links[static_cast<std::size_t>(bus)].push_back(l);
            frontier.push(next);
        }
    }
    if (static_cast<int>(topo.forward_order.size()) != n)
        throw ValidationError("network is not connected");
    if (pdn.links.size() + 1 != pdn.buses.size())
        throw ValidationError("network is not a tree: |links| + 1 != |buses|");
    return topo;
}

Diagnostics validate_network(const Pdn& pdn) {
    Diagnostics diag;
    const std::string root = "/pdns/" + pdn.id;
    if (pdn.buses.empty()) {
        diag.error(root, "network has no buses");
        return diag;
    }
    if (pdn.n_t < 1) diag.error(root, "horizon must be >= 1");

    const int n = static_cast<int>(pdn.buses.size());
    if (pdn.links.size() + 1 != pdn.buses.size())
        diag.error(root + "/links", "not a tree: expected |buses| - 1 links, got " +
                                        std::to_string(pdn.links.size()));

    // Connectivity and single-parent structure.
    try {
        build_topology(pdn);
    } catch (const ValidationError& e) {
        diag.error(root + "/links", e.what());
    }

    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        const auto& link = pdn.links[l];
        const std::string loc = root + "/links/" + std::to_string(l);
        if (link.from < 0 || link.from >= n || link.to < 0 || link.to >= n) {
            diag.error(loc, "endpoint outside bus range");
            continue;
        }
        const auto& from_phases = pdn.buses[static_cast<std::size_t>(link.from)].phases;
        const auto& to_phases = pdn.buses[static_cast<std::size_t>(link.to)].phases;
        for (Phase p : link.phases) {
            if (std::find(from_phases.begin(), from_phases.end(), p) == from_phases.end() ||
                std::find(to_phases.begin(), to_phases.end(), p) == to_phases.end())
                diag.error(loc, "link phase " + std::string(1, phase_letter(p)) +
                                    " missing at an endpoint bus");
        }
        const auto dim = static_cast<Eigen::Index>(link.phases.size());
        if (link.z.rows() != dim || link.z.cols() != dim) {
            diag.error(loc, "impedance matrix dimension does not match the phase set");
        } else if (std::abs(Eigen::FullPivLU<Eigen::MatrixXcd>(link.z).determinant()) < 1e-14) {
            diag.error(loc, "impedance matrix is singular");
        }
    }

    for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
        const auto& bus = pdn.buses[b];
        const std::string loc = root + "/buses/" + std::to_string(b);
        const auto dim = static_cast<Eigen::Index>(bus.phases.size());
        if (bus.phases.empty()) diag.error(loc, "empty phase set");
        if (bus.shunt.size() != 0 && (bus.shunt.rows() != dim || bus.shunt.cols() != dim))
            diag.error(loc, "shunt matrix dimension does not match the phase set");
        if (!bus.load.empty() && static_cast<int>(bus.load.size()) != pdn.n_t)
            diag.error(loc, "load series length differs from the horizon");
        for (const auto& s : bus.load)
            if (s.size() != dim) diag.error(loc, "load vector does not match the phase set");
        if (bus.u_min.size() != dim || bus.u_max.size() != dim)
            diag.error(loc, "voltage bound vectors must match the phase set");
        else
            for (Eigen::Index k = 0; k < dim; ++k)
                if (!(bus.u_min[k] < bus.u_max[k]))
                    diag.error(loc, "u_min must be strictly below u_max");
        // The union-of-incident-links property for the declared phase set.
        if (b != 0) {
            PhaseSet incident;
            for (const auto& link : pdn.links)
                if (link.from == static_cast<int>(b) || link.to == static_cast<int>(b))
                    incident.insert(incident.end(), link.phases.begin(), link.phases.end());
            std::sort(incident.begin(), incident.end());
            incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
            if (incident != bus.phases)
                diag.warning(loc, "bus phase set differs from the union of incident links");
        }
        if (b == 0 && !bus.load.empty())
            for (const auto& s : bus.load)
                if (s.size() != 0 && s.cwiseAbs().maxCoeff() > 0.0) {
                    diag.error(loc, "loads at the reference bus are not supported");
                    break;
                }
    }

    for (std::size_t k = 0; k < pdn.controllable.size(); ++k) {
        const auto& slot = pdn.controllable[k];
        const std::string loc = root + "/controllable/" + std::to_string(k);
        if (slot.bus <= 0 || slot.bus >= n) {
            diag.error(loc, "controllable load must sit on a PQ bus");
            continue;
        }
        const auto dim =
            static_cast<Eigen::Index>(pdn.buses[static_cast<std::size_t>(slot.bus)].phases.size());
        if (slot.p_min.size() != dim || slot.p_max.size() != dim || slot.q_min.size() != dim ||
            slot.q_max.size() != dim)
            diag.error(loc, "bound vectors must match the bus phase set");
    }

    if (static_cast<int>(pdn.v_ref.size()) != pdn.n_t)
        diag.error(root + "/reference", "reference voltage series length differs from horizon");
    for (const auto& v : pdn.v_ref)
        if (v.size() != static_cast<Eigen::Index>(pdn.reference_phases().size()))
            diag.error(root + "/reference", "reference voltage does not match the phase set");
    if (pdn.rating <= 0.0) diag.error(root + "/rating", "substation rating must be positive");
    if (static_cast<int>(pdn.price_per_kwh.size()) != pdn.n_t)
        diag.error(root + "/price", "price series length differs from horizon");
    return diag;
}

namespace {

Pdn rescale(const Pdn& pdn, double s_scale, double v_scale, Units new_units) {
    // Power, voltage, impedance, admittance scale factors.
    const double z_scale = v_scale * v_scale / s_scale;
    Pdn out = pdn;
    out.units = new_units;
    for (auto& bus : out.buses) {
        if (bus.shunt.size() != 0) bus.shunt *= z_scale;
        for (auto& s : bus.load) s /= s_scale;
    }
    for (auto& link : out.links) link.z /= z_scale;
    for (auto& slot : out.controllable) {
        slot.p_min /= s_scale;
        slot.p_max /= s_scale;
        slot.q_min /= s_scale;
        slot.q_max /= s_scale;
    }
    for (auto& v : out.v_ref) v /= v_scale;
    out.rating /= s_scale;
    return out;
}

}  // namespace

Pdn per_unit_normalize(const Pdn& pdn, double base_mva, double base_kv) {
    if (base_mva <= 0.0 || base_kv <= 0.0)
        throw ValidationError("per-unit bases must be positive");
    if (pdn.units == Units::per_unit)
        throw ValidationError("network " + pdn.id + " is already per-unit");
    Pdn out = rescale(pdn, base_mva * 1e6, base_kv * 1e3, Units::per_unit);
    out.s_base_va = base_mva * 1e6;
    out.v_base_v = base_kv * 1e3;
    return out;
}

Pdn per_unit_denormalize(const Pdn& pdn, double base_mva, double base_kv) {
    if (base_mva <= 0.0 || base_kv <= 0.0)
        throw ValidationError("per-unit bases must be positive");
    if (pdn.units == Units::si)
        throw ValidationError("network " + pdn.id + " is already SI-valued");
    Pdn out = rescale(pdn, 1.0 / (base_mva * 1e6), 1.0 / (base_kv * 1e3), Units::si);
    out.s_base_va = 1.0;
    out.v_base_v = 1.0;
    return out;
}

FixedLinearizationParams nominal_linearization(const Pdn& pdn) {
    FixedLinearizationParams params;
    params.v_estimate.resize(pdn.buses.size());
    for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
        auto nominal = balanced_unit_voltage(pdn.buses[b].phases);
        params.v_estimate[b].assign(static_cast<std::size_t>(pdn.n_t), nominal);
    }
    params.gamma.resize(pdn.links.size());
    params.ell.resize(pdn.links.size());
    params.i_estimate.resize(pdn.links.size());
    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        const auto& link = pdn.links[l];
        const auto dim = static_cast<Eigen::Index>(link.phases.size());
        auto v = balanced_unit_voltage(link.phases);
        Eigen::MatrixXcd gamma(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j)
                gamma(i, j) = i == j ? Complex(1.0, 0.0) : v[i] / v[j];
        params.gamma[l].assign(static_cast<std::size_t>(pdn.n_t), gamma);
        params.ell[l].assign(static_cast<std::size_t>(pdn.n_t),
                             Eigen::MatrixXcd::Zero(dim, dim));
        params.i_estimate[l].assign(static_cast<std::size_t>(pdn.n_t),
                                    Eigen::VectorXcd::Zero(dim));
    }
    return params;
}

FixedLinearizationParams estimate_linearization_from_base(
    const Pdn& pdn, const std::vector<PowerFlowSolution>& base) {
    if (static_cast<int>(base.size()) != pdn.n_t)
        throw ValidationError("base solution series does not cover the horizon");
    FixedLinearizationParams params;
    params.v_estimate.resize(pdn.buses.size());
    for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
        params.v_estimate[b].reserve(static_cast<std::size_t>(pdn.n_t));
        for (int t = 0; t < pdn.n_t; ++t)
            params.v_estimate[b].push_back(base[static_cast<std::size_t>(t)].v[b]);
    }
    params.gamma.resize(pdn.links.size());
    params.ell.resize(pdn.links.size());
    params.i_estimate.resize(pdn.links.size());
    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        const auto& link = pdn.links[l];
        const auto positions =
            phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.from)].phases);
        const auto dim = static_cast<Eigen::Index>(link.phases.size());
        for (int t = 0; t < pdn.n_t; ++t) {
            const auto& sol = base[static_cast<std::size_t>(t)];
            Eigen::VectorXcd v_from(dim);
            for (Eigen::Index k = 0; k < dim; ++k)
                v_from[k] = sol.v[static_cast<std::size_t>(link.from)][positions[static_cast<
                    std::size_t>(k)]];
            Eigen::MatrixXcd gamma(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = 0; j < dim; ++j)
                    gamma(i, j) = i == j ? Complex(1.0, 0.0) : v_from[i] / v_from[j];
            const Eigen::VectorXcd& current = sol.i[l];
            params.gamma[l].push_back(gamma);
            params.ell[l].push_back(current * current.adjoint());
            params.i_estimate[l].push_back(current);
        }
    }
    return params;
}

PdnShape shape_of(const Pdn& pdn) {
    PdnShape shape;
    for (const auto& bus : pdn.buses)
        shape.bus_phase_counts.push_back(static_cast<int>(bus.phases.size()));
    for (const auto& link : pdn.links)
        shape.link_phase_counts.push_back(static_cast<int>(link.phases.size()));
    for (const auto& slot : pdn.controllable)
        shape.load_phase_counts.push_back(
            static_cast<int>(pdn.buses[static_cast<std::size_t>(slot.bus)].phases.size()));
    return shape;
}

}  // namespace fleetgrid
