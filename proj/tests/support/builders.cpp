#include "support/builders.hpp"

#include <cmath>

namespace fleetgrid::testing {

std::string solver_command() { return "python3 " FLEETGRID_SOLVER_SCRIPT; }

std::string scenario_dir() { return FLEETGRID_SCENARIO_DIR; }

Eigen::VectorXd bounds_vec(const PhaseSet& phases, double value) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(phases.size()), value);
}

namespace {

Bus make_bus(const PhaseSet& phases, int n_t, double u_min = 0.5, double u_max = 1.5) {
    Bus bus;
    bus.phases = phases;
    bus.u_min = bounds_vec(phases, u_min);
    bus.u_max = bounds_vec(phases, u_max);
    bus.load.assign(static_cast<std::size_t>(n_t),
                    Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(phases.size())));
    return bus;
}

void finish(Pdn& pdn, int n_t) {
    pdn.v_ref.assign(static_cast<std::size_t>(n_t),
                     balanced_unit_voltage(pdn.reference_phases()));
    pdn.rating = 1e6;
    pdn.price_per_kwh.assign(static_cast<std::size_t>(n_t), 0.1);
}

}  // namespace

Pdn two_bus_feeder(const PhaseSet& phases, const Eigen::MatrixXcd& z,
                   const Eigen::VectorXcd& load, int n_t, const Eigen::MatrixXcd& shunt) {
    Pdn pdn;
    pdn.id = "two";
    pdn.n_t = n_t;
    pdn.buses.push_back(make_bus(phases, n_t));
    Bus pq = make_bus(phases, n_t);
    for (int t = 0; t < n_t; ++t) pq.load[static_cast<std::size_t>(t)] = load;
    if (shunt.size() != 0) pq.shunt = shunt;
    pdn.buses.push_back(std::move(pq));
    pdn.links.push_back({0, 1, phases, z});
    finish(pdn, n_t);
    return pdn;
}

Pdn chain_feeder(int n_bus, const Eigen::MatrixXcd& z, Complex load_per_phase, int n_t) {
    const PhaseSet abc = parse_phases("abc");
    Pdn pdn;
    pdn.id = "chain";
    pdn.n_t = n_t;
    for (int b = 0; b < n_bus; ++b) {
        Bus bus = make_bus(abc, n_t);
        if (b > 0)
            for (int t = 0; t < n_t; ++t)
                bus.load[static_cast<std::size_t>(t)].setConstant(load_per_phase);
        pdn.buses.push_back(std::move(bus));
    }
    for (int b = 1; b < n_bus; ++b) pdn.links.push_back({b - 1, b, abc, z});
    finish(pdn, n_t);
    return pdn;
}

Eigen::MatrixXcd coupled_z(int dim, Complex self, Complex mutual) {
    Eigen::MatrixXcd z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = i == j ? self : mutual;
    return z;
}

Pdn random_radial_feeder(std::mt19937& rng, int max_bus, double max_load, int n_t) {
    std::uniform_int_distribution<int> bus_count(2, max_bus);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> resistance(0.005, 0.05);
    std::uniform_real_distribution<double> reactance(0.0, 0.05);

    const int n_bus = bus_count(rng);
    Pdn pdn;
    pdn.id = "rand";
    pdn.n_t = n_t;

    std::vector<PhaseSet> phases(static_cast<std::size_t>(n_bus));
    phases[0] = parse_phases("abc");
    std::vector<int> parent(static_cast<std::size_t>(n_bus), 0);
    for (int b = 1; b < n_bus; ++b) {
        parent[static_cast<std::size_t>(b)] =
            std::uniform_int_distribution<int>(0, b - 1)(rng);
        const auto& parent_phases = phases[static_cast<std::size_t>(parent[static_cast<
            std::size_t>(b)])];
        // Nonempty random subset of the parent's phases.
        PhaseSet mine;
        while (mine.empty())
            for (Phase p : parent_phases)
                if (unit(rng) < 0.7) mine.push_back(p);
        phases[static_cast<std::size_t>(b)] = mine;
    }

    for (int b = 0; b < n_bus; ++b) {
        Bus bus = make_bus(phases[static_cast<std::size_t>(b)], n_t);
        const auto dim = static_cast<Eigen::Index>(bus.phases.size());
        if (b > 0) {
            for (int t = 0; t < n_t; ++t)
                for (Eigen::Index p = 0; p < dim; ++p)
                    bus.load[static_cast<std::size_t>(t)][p] =
                        Complex(unit(rng) * max_load * 0.8, (unit(rng) - 0.3) * max_load * 0.3);
            if (unit(rng) < 0.3)
                bus.shunt = Complex(0.0, 1.0) *
                            Eigen::MatrixXcd::Identity(dim, dim) * (unit(rng) * 0.05);
        }
        pdn.buses.push_back(std::move(bus));
    }
    for (int b = 1; b < n_bus; ++b) {
        const auto& mine = phases[static_cast<std::size_t>(b)];
        const auto dim = static_cast<Eigen::Index>(mine.size());
        Eigen::MatrixXcd z(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            z(i, i) = Complex(resistance(rng), reactance(rng));
            for (Eigen::Index j = 0; j < dim; ++j)
                if (i != j) z(i, j) = 0.25 * Complex(resistance(rng), reactance(rng));
        }
        pdn.links.push_back({parent[static_cast<std::size_t>(b)], b, mine, z});
    }
    finish(pdn, n_t);
    return pdn;
}

Pdn six_bus_feeder(double loading, int n_t) {
    const PhaseSet abc = parse_phases("abc");
    Pdn pdn;
    pdn.id = "six";
    pdn.n_t = n_t;
    // 0 - 1 - 2 - 3 with laterals 2 - 4 and 3 - 5; unbalanced loads.
    const double base[6][3] = {
        {0.0, 0.0, 0.0},    {0.06, 0.05, 0.04}, {0.05, 0.07, 0.05},
        {0.04, 0.04, 0.08}, {0.09, 0.05, 0.06}, {0.05, 0.08, 0.07},
    };
    for (int b = 0; b < 6; ++b) {
        Bus bus = make_bus(abc, n_t, 0.5, 1.5);
        for (int t = 0; t < n_t; ++t)
            for (int p = 0; p < 3; ++p)
                bus.load[static_cast<std::size_t>(t)][p] =
                    loading * base[b][p] * Complex(1.0, 0.35);
        pdn.buses.push_back(std::move(bus));
    }
    const Eigen::MatrixXcd z = coupled_z(3, Complex(0.012, 0.024), Complex(0.003, 0.008));
    pdn.links.push_back({0, 1, abc, z});
    pdn.links.push_back({1, 2, abc, z});
    pdn.links.push_back({2, 3, abc, z});
    pdn.links.push_back({2, 4, abc, 0.7 * z});
    pdn.links.push_back({3, 5, abc, 0.7 * z});

    ControllableSlot slot;
    slot.bus = 5;
    slot.p_min = Eigen::VectorXd::Zero(3);
    slot.p_max = Eigen::VectorXd::Constant(3, kInf);
    slot.q_min = Eigen::VectorXd::Zero(3);
    slot.q_max = Eigen::VectorXd::Zero(3);
    pdn.controllable.push_back(std::move(slot));

    finish(pdn, n_t);
    return pdn;
}

Scenario mini_scenario() {
    Scenario sc;
    sc.n_t = 6;
    sc.n_c = 4;
    sc.dt_hours = 0.1;
    sc.unit_kwh = 0.8;
    sc.distance_price = 0.3;
    sc.road.vertices = {1, 2};
    sc.road.arcs.push_back({1, 2, 5.0, 1, 1, 10.0});
    sc.road.arcs.push_back({2, 1, 5.0, 1, 1, 10.0});
    ChargerSpec charger;
    charger.vertex = 2;
    charger.rate_levels_per_step = 1;
    charger.plugs = 5;
    charger.price_per_kwh.assign(static_cast<std::size_t>(sc.n_t), 0.1);
    sc.chargers.push_back(charger);
    sc.trips.push_back({1, 2, 1, 2.0});
    sc.boundary.initial[{1, 3}] = 3.0;
    sc.boundary.min_soc_fraction = 0.5;

    Pdn pdn = chain_feeder(3, coupled_z(3, Complex(0.005, 0.01), Complex(0.001, 0.002)),
                           Complex(0.05, 0.015), sc.n_t);
    pdn.id = "g0";
    pdn.s_base_va = 50e3;
    pdn.v_base_v = 2400.0;
    for (auto& bus : pdn.buses) {
        bus.u_min = bounds_vec(bus.phases, 0.9);
        bus.u_max = bounds_vec(bus.phases, 1.1);
    }
    pdn.rating = 10.0;
    pdn.price_per_kwh.assign(static_cast<std::size_t>(sc.n_t), 0.1);
    ControllableSlot slot;
    slot.bus = 2;
    slot.p_min = Eigen::VectorXd::Zero(3);
    slot.p_max = Eigen::VectorXd::Constant(3, kInf);
    slot.q_min = Eigen::VectorXd::Zero(3);
    slot.q_max = Eigen::VectorXd::Zero(3);
    pdn.controllable.push_back(std::move(slot));
    sc.pdns.push_back(std::move(pdn));

    sc.couplings.push_back({0, 0, 0});
    sc.solver.command = solver_command();
    return sc;
}

}  // namespace fleetgrid::testing
