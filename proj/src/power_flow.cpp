#include "fleetgrid/power_flow.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fleetgrid {

InjectionSet build_injections(const Pdn& pdn, const ControllableLoadSeries& loads) {
    if (!loads.s.empty() && static_cast<int>(loads.s.size()) != pdn.n_t)
        throw ValidationError("controllable load series does not cover the horizon");
    InjectionSet set;
    set.inj.resize(static_cast<std::size_t>(pdn.n_t));
    for (int t = 0; t < pdn.n_t; ++t) {
        auto& at_t = set.inj[static_cast<std::size_t>(t)];
        at_t.resize(pdn.buses.size());
        for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
            const auto& bus = pdn.buses[b];
            Eigen::VectorXcd s =
                Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bus.phases.size()));
            if (!bus.load.empty()) s -= bus.load[static_cast<std::size_t>(t)];
            at_t[b] = std::move(s);
        }
        if (!loads.s.empty()) {
            const auto& slots = loads.s[static_cast<std::size_t>(t)];
            if (slots.size() != pdn.controllable.size())
                throw ValidationError("controllable load entry count mismatch");
            for (std::size_t k = 0; k < slots.size(); ++k) {
                const auto bus = static_cast<std::size_t>(pdn.controllable[k].bus);
                if (slots[k].size() != at_t[bus].size())
                    throw ValidationError("controllable load phases mismatch");
                at_t[bus] -= slots[k];
            }
        }
    }
    return set;
}

InjectionSet base_injections(const Pdn& pdn) { return build_injections(pdn, {}); }

namespace {

struct SweepWorkspace {
    RadialTopology topo;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> link_lu;  // factorized Z per link
    std::vector<std::vector<int>> link_positions;  // link phases within the upstream bus
    std::vector<std::vector<int>> link_positions_to;  // link phases within the downstream bus
};

SweepWorkspace make_workspace(const Pdn& pdn) {
    SweepWorkspace w;
    w.topo = build_topology(pdn);
    w.link_lu.reserve(pdn.links.size());
    for (const auto& link : pdn.links) {
        w.link_lu.emplace_back(link.z);
        w.link_positions.push_back(
            phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.from)].phases));
        w.link_positions_to.push_back(
            phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.to)].phases));
    }
    return w;
}

PowerFlowSolution sweep_solve(const Pdn& pdn, const SweepWorkspace& w,
                              const std::vector<Eigen::VectorXcd>& inj_at_t, int t,
                              const PowerFlowOptions& opts) {
    const auto n_bus = pdn.buses.size();
    const auto& v_ref = pdn.v_ref.at(static_cast<std::size_t>(t - 1));
    const double vscale = v_ref.cwiseAbs().maxCoeff();
    if (vscale <= 0.0) throw PowerFlowError("reference voltage is zero", t);

    PowerFlowSolution sol;
    sol.t = t;
    sol.v.resize(n_bus);
    sol.i.resize(pdn.links.size());

    // Flat start at balanced nominal voltages.
    for (std::size_t b = 0; b < n_bus; ++b)
        sol.v[b] = balanced_unit_voltage(pdn.buses[b].phases) * vscale;
    sol.v[0] = v_ref;

    std::vector<Eigen::VectorXcd> bus_current(n_bus);  // current drawn at each bus
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        // Backward pass: aggregate load, shunt, and downstream currents.
        for (auto it = w.topo.forward_order.rbegin(); it != w.topo.forward_order.rend(); ++it) {
            const auto b = static_cast<std::size_t>(*it);
            const auto& bus = pdn.buses[b];
            Eigen::VectorXcd draw =
                Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bus.phases.size()));
            if (b != 0 && inj_at_t[b].size() != 0) {
                for (Eigen::Index k = 0; k < draw.size(); ++k) {
                    if (std::abs(sol.v[b][k]) < opts.min_voltage * vscale)
                        throw PowerFlowError("voltage magnitude collapsed at bus " +
                                                 std::to_string(b),
                                             t);
                    draw[k] = std::conj(-inj_at_t[b][k] / sol.v[b][k]);
                }
            }
            if (bus.shunt.size() != 0) draw += bus.shunt * sol.v[b];
            for (int lc : w.topo.children_links[b]) {
                const auto& pos = w.link_positions[static_cast<std::size_t>(lc)];
                const auto& i_child = sol.i[static_cast<std::size_t>(lc)];
                for (std::size_t k = 0; k < pos.size(); ++k)
                    draw[pos[k]] += i_child[static_cast<Eigen::Index>(k)];
            }
            bus_current[b] = std::move(draw);
            const int lp = w.topo.parent_link[b];
            if (lp >= 0) {
                const auto& pos = w.link_positions_to[static_cast<std::size_t>(lp)];
                Eigen::VectorXcd i_link(static_cast<Eigen::Index>(pos.size()));
                for (std::size_t k = 0; k < pos.size(); ++k)
                    i_link[static_cast<Eigen::Index>(k)] = bus_current[b][pos[k]];
                sol.i[static_cast<std::size_t>(lp)] = std::move(i_link);
            }
        }

        // Forward pass: push voltages from the reference bus outward.
        double max_dv = 0.0;
        for (int bus_index : w.topo.forward_order) {
            const auto b = static_cast<std::size_t>(bus_index);
            for (int lc : w.topo.children_links[b]) {
                const auto l = static_cast<std::size_t>(lc);
                const auto& link = pdn.links[l];
                const auto& pos_from = w.link_positions[l];
                const auto& pos_to = w.link_positions_to[l];
                Eigen::VectorXcd v_from(static_cast<Eigen::Index>(pos_from.size()));
                for (std::size_t k = 0; k < pos_from.size(); ++k)
                    v_from[static_cast<Eigen::Index>(k)] = sol.v[b][pos_from[k]];
                Eigen::VectorXcd v_new = v_from - link.z * sol.i[l];
                auto& v_to = sol.v[static_cast<std::size_t>(link.to)];
                for (std::size_t k = 0; k < pos_to.size(); ++k) {
                    max_dv = std::max(max_dv,
                                      std::abs(v_new[static_cast<Eigen::Index>(k)] -
                                               v_to[pos_to[k]]));
                    v_to[pos_to[k]] = v_new[static_cast<Eigen::Index>(k)];
                }
            }
        }
        if (max_dv < opts.tolerance * vscale) {
            ++iter;
            break;
        }
    }
    if (iter >= opts.max_iterations)
        throw PowerFlowError("power flow did not converge after " +
                                 std::to_string(opts.max_iterations) + " iterations",
                             t);
    sol.iterations = iter;

    // Make link currents exactly Ohm's-law-consistent with the final voltages.
    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        const auto& link = pdn.links[l];
        const auto& pos_from = w.link_positions[l];
        const auto& pos_to = w.link_positions_to[l];
        Eigen::VectorXcd dv(static_cast<Eigen::Index>(pos_from.size()));
        for (std::size_t k = 0; k < pos_from.size(); ++k)
            dv[static_cast<Eigen::Index>(k)] =
                sol.v[static_cast<std::size_t>(link.from)][pos_from[k]] -
                sol.v[static_cast<std::size_t>(link.to)][pos_to[k]];
        sol.i[l] = w.link_lu[l].solve(dv);
    }

    // Reference injection: shunt draw plus power sent into the root links.
    {
        const auto& bus = pdn.buses[0];
        Eigen::VectorXcd i_out =
            Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bus.phases.size()));
        if (bus.shunt.size() != 0) i_out += bus.shunt * sol.v[0];
        for (int lc : w.topo.children_links[0]) {
            const auto& pos = w.link_positions[static_cast<std::size_t>(lc)];
            for (std::size_t k = 0; k < pos.size(); ++k)
                i_out[pos[k]] += sol.i[static_cast<std::size_t>(lc)][static_cast<Eigen::Index>(k)];
        }
        sol.s_ref = sol.v[0].cwiseProduct(i_out.conjugate());
    }

    sol.residual = power_flow_residual(pdn, inj_at_t, sol);
    return sol;
}

}  // namespace

double power_flow_residual(const Pdn& pdn, const std::vector<Eigen::VectorXcd>& inj_at_t,
                           const PowerFlowSolution& sol) {
    double worst = 0.0;
    for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
        const auto& bus = pdn.buses[b];
        Eigen::VectorXcd implied =
            Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bus.phases.size()));
        if (bus.shunt.size() != 0)
            implied += sol.v[b].cwiseProduct((bus.shunt * sol.v[b]).conjugate());
        for (std::size_t l = 0; l < pdn.links.size(); ++l) {
            const auto& link = pdn.links[l];
            const bool at_from = link.from == static_cast<int>(b);
            const bool at_to = link.to == static_cast<int>(b);
            if (!at_from && !at_to) continue;
            const auto pos = phase_positions(link.phases, bus.phases);
            // Power leaving the bus through this link: +i when at the from
            // side, -i when at the to side.
            const double sign = at_from ? 1.0 : -1.0;
            for (std::size_t k = 0; k < pos.size(); ++k)
                implied[pos[k]] += sol.v[b][pos[k]] *
                                   std::conj(sign * sol.i[l][static_cast<Eigen::Index>(k)]);
        }
        Eigen::VectorXcd given = inj_at_t[b].size() == 0
                                     ? Eigen::VectorXcd::Zero(implied.size())
                                     : inj_at_t[b];
        worst = std::max(worst, (implied - given).cwiseAbs().maxCoeff());
    }
    return worst;
}

PowerFlowSolution solve_power_flow(const Pdn& pdn, const std::vector<Eigen::VectorXcd>& inj_at_t,
                                   int t, const PowerFlowOptions& opts) {
    if (t < 1 || t > pdn.n_t) throw PowerFlowError("time step outside horizon", t);
    auto workspace = make_workspace(pdn);
    return sweep_solve(pdn, workspace, inj_at_t, t, opts);
}

std::vector<PowerFlowSolution> solve_power_flow_series(const Pdn& pdn,
                                                       const InjectionSet& injections,
                                                       const PowerFlowOptions& opts) {
    if (static_cast<int>(injections.inj.size()) != pdn.n_t)
        throw ValidationError("injection series does not cover the horizon");
    auto workspace = make_workspace(pdn);
    std::vector<PowerFlowSolution> series(static_cast<std::size_t>(pdn.n_t));
    std::exception_ptr failure;
    int failure_t = pdn.n_t + 1;

#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (int t = 1; t <= pdn.n_t; ++t) {
        try {
            series[static_cast<std::size_t>(t - 1)] =
                sweep_solve(pdn, workspace, injections.inj[static_cast<std::size_t>(t - 1)], t,
                            opts);
        } catch (...) {
#pragma omp critical
            {
                // Report the earliest failing step regardless of scheduling.
                if (t < failure_t) {
                    failure_t = t;
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return series;
}

std::vector<PowerFlowSolution> validate_solution(const Pdn& pdn,
                                                 const ControllableLoadSeries& loads,
                                                 const PowerFlowOptions& opts) {
    return solve_power_flow_series(pdn, build_injections(pdn, loads), opts);
}

}  // namespace fleetgrid
