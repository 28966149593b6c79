#pragma once

// Shared construction helpers for unit and acceptance tests.

#include <random>
#include <string>

#include "fleetgrid/scenario.hpp"

namespace fleetgrid::testing {

/// Command line for the bundled python LP backend.
std::string solver_command();

/// Directory holding the bundled scenario files.
std::string scenario_dir();

/// Uniform voltage-bound vectors for a phase set.
Eigen::VectorXd bounds_vec(const PhaseSet& phases, double value);

/// Two-bus single-link feeder: reference plus one PQ bus.
Pdn two_bus_feeder(const PhaseSet& phases, const Eigen::MatrixXcd& z,
                   const Eigen::VectorXcd& load, int n_t = 1,
                   const Eigen::MatrixXcd& shunt = {});

/// Radial chain 0-1-...-(n_bus-1), all three-phase, identical links, equal
/// constant loads per PQ bus and phase.
Pdn chain_feeder(int n_bus, const Eigen::MatrixXcd& z, Complex load_per_phase, int n_t = 1);

/// Random radial feeder: up to `max_bus` buses, one to three phases per
/// bus, complex impedances with positive resistance, loads bounded by
/// `max_load` per phase. Shapes and values are driven by `rng`.
Pdn random_radial_feeder(std::mt19937& rng, int max_bus = 5, double max_load = 0.5,
                         int n_t = 1);

/// Three-phase impedance matrix with the given self and mutual terms.
Eigen::MatrixXcd coupled_z(int dim, Complex self, Complex mutual);

/// Six-bus three-phase synthetic feeder whose uncontrollable loads scale
/// with `loading` (1.0 = nominal stress level); one controllable slot at
/// the far end.
Pdn six_bus_feeder(double loading, int n_t = 1);

/// Minimal fleet-only scenario on a two-vertex road: one charger, one
/// trip, one network with ample headroom. Used for end-to-end plumbing.
Scenario mini_scenario();

}  // namespace fleetgrid::testing
