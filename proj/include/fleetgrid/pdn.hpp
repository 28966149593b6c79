#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fleetgrid/diagnostics.hpp"
#include "fleetgrid/transport_graph.hpp"  // PdnShape

namespace fleetgrid {

using Complex = std::complex<double>;

enum class Phase : std::uint8_t { a = 0, b = 1, c = 2 };
using PhaseSet = std::vector<Phase>;  // sorted, unique

char phase_letter(Phase p);
PhaseSet parse_phases(const std::string& letters);
std::string phases_to_string(const PhaseSet& phases);

/// Position of each phase of `sub` inside `super`; throws if not a subset.
std::vector<int> phase_positions(const PhaseSet& sub, const PhaseSet& super);

/// Balanced positive-sequence unit voltages on the given phases
/// (a = 1, b = e^{-j2pi/3}, c = e^{+j2pi/3}).
Eigen::VectorXcd balanced_unit_voltage(const PhaseSet& phases);

enum class Units { si, per_unit };

struct Bus {
    PhaseSet phases;
    Eigen::MatrixXcd shunt;  // |phi| x |phi| admittance to ground (S or p.u.)
    // Wye constant-power consumption per time step, |phi| entries each
    // (VA or p.u.). Generators enter as negative consumption.
    std::vector<Eigen::VectorXcd> load;
    Eigen::VectorXd u_min, u_max;  // per-phase voltage magnitude bounds (p.u.)
};

struct Link {
    int from = 0;  // bus index on the path toward the reference bus
    int to = 0;
    PhaseSet phases;
    Eigen::MatrixXcd z;  // |phi| x |phi| series impedance (ohm or p.u.)
};

struct ControllableSlot {
    int bus = 0;
    // Per-phase active/reactive consumption bounds (W/var or p.u.),
    // aligned with the bus phase set.
    Eigen::VectorXd p_min, p_max, q_min, q_max;
};

/// Radial unbalanced three-phase distribution network. Bus 0 is the
/// reference (substation) bus; all series data span the same horizon.
struct Pdn {
    std::string id;
    Units units = Units::per_unit;
    double s_base_va = 1.0;  // per-phase power base
    double v_base_v = 1.0;   // line-to-neutral voltage base
    int n_t = 0;

    std::vector<Bus> buses;
    std::vector<Link> links;
    std::vector<ControllableSlot> controllable;

    std::vector<Eigen::VectorXcd> v_ref;  // per t, on the reference phase set
    double rating = 0.0;  // cap on |sum over phases of s_0| (VA or p.u.)

    // Time series of the substation electricity price.
    std::vector<double> price_per_kwh;

    const PhaseSet& reference_phases() const { return buses.front().phases; }
};

/// Parent/child structure of the radial network, with buses ordered so a
/// leaf-to-root (backward) or root-to-leaf (forward) pass is a simple scan.
struct RadialTopology {
    std::vector<int> parent_link;         // per bus, -1 for the reference bus
    std::vector<std::vector<int>> children_links;  // per bus, outgoing link indices
    std::vector<int> forward_order;       // bus indices, root first
};

RadialTopology build_topology(const Pdn& pdn);

/// Structural validation: tree topology, phase consistency, invertible
/// impedances, consistent series lengths and bounds.
Diagnostics validate_network(const Pdn& pdn);

/// Rescales an SI-valued network to per-unit with the given per-phase
/// power base (MVA) and line-to-neutral voltage base (kV).
Pdn per_unit_normalize(const Pdn& pdn, double base_mva, double base_kv);
/// Inverse of per_unit_normalize.
Pdn per_unit_denormalize(const Pdn& pdn, double base_mva, double base_kv);

struct PowerFlowSolution;  // power_flow.hpp

/// Fixed parameters of the linearized branch-flow surrogate: per link and
/// time step, the inter-phase voltage-ratio matrix Gamma and the fixed
/// loss outer-product ell = i i^H, plus the generating estimates.
struct FixedLinearizationParams {
    // Indexed [link][t] and [bus][t].
    std::vector<std::vector<Eigen::MatrixXcd>> gamma;
    std::vector<std::vector<Eigen::MatrixXcd>> ell;
    std::vector<std::vector<Eigen::VectorXcd>> v_estimate;
    std::vector<std::vector<Eigen::VectorXcd>> i_estimate;
};

/// Zero-loss, perfectly balanced parameters: voltage estimates are the
/// balanced positive-sequence nominal voltages and current estimates are
/// zero, so every Gamma is a rotation matrix and every ell vanishes.
FixedLinearizationParams nominal_linearization(const Pdn& pdn);

/// Parameters taken from an exact base-case power-flow series.
FixedLinearizationParams estimate_linearization_from_base(
    const Pdn& pdn, const std::vector<PowerFlowSolution>& base);

PdnShape shape_of(const Pdn& pdn);

}  // namespace fleetgrid
