#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fleetgrid/pdn.hpp"

namespace fleetgrid {

/// Complex power injections at PQ buses per time step, aligned with each
/// bus's phase set (index 0 is the reference bus and stays empty).
struct InjectionSet {
    std::vector<std::vector<Eigen::VectorXcd>> inj;  // [t][bus]
};

/// Controllable load consumption per slot and time step (complex power on
/// the slot bus's phases).
struct ControllableLoadSeries {
    std::vector<std::vector<Eigen::VectorXcd>> s;  // [t][slot]
};

/// s_inj,n(t) = -s_unc,n(t) - sum of controllable consumption mapped to n.
InjectionSet build_injections(const Pdn& pdn, const ControllableLoadSeries& loads);
InjectionSet base_injections(const Pdn& pdn);  // uncontrollable loads only

struct PowerFlowSolution {
    int t = 0;  // 1-based time step this solution belongs to
    std::vector<Eigen::VectorXcd> v;  // per bus, on the bus phase set
    std::vector<Eigen::VectorXcd> i;  // per link, on the link phase set
    Eigen::VectorXcd s_ref;           // injection at the reference bus
    int iterations = 0;
    double residual = 0.0;  // max power-balance mismatch over PQ buses
};

struct PowerFlowOptions {
    double tolerance = 1e-8;  // max |dv| per sweep, relative to |v_ref|
    int max_iterations = 100;
    double min_voltage = 0.1;  // abort threshold, relative to |v_ref|
    bool parallel = true;      // OpenMP across time steps in series solves
};

struct PowerFlowError : std::runtime_error {
    int t;
    explicit PowerFlowError(const std::string& what, int t_ = 0)
        : std::runtime_error(what), t(t_) {}
};

/// Exact solution of the nonlinear three-phase power-flow equations by a
/// backward/forward sweep. The backward pass aggregates load, shunt, and
/// downstream link currents; the forward pass propagates voltages from the
/// reference bus through each link's impedance.
PowerFlowSolution solve_power_flow(const Pdn& pdn, const std::vector<Eigen::VectorXcd>& inj_at_t,
                                   int t, const PowerFlowOptions& opts = {});

/// Sweep solve for every time step of the injection set. Time steps are
/// independent; with opts.parallel they run under OpenMP and results are
/// assembled in deterministic t order.
std::vector<PowerFlowSolution> solve_power_flow_series(const Pdn& pdn,
                                                       const InjectionSet& injections,
                                                       const PowerFlowOptions& opts = {});

/// Builds injections from the controllable loads and solves all steps:
/// the exact validation pass run after every optimization.
std::vector<PowerFlowSolution> validate_solution(const Pdn& pdn,
                                                 const ControllableLoadSeries& loads,
                                                 const PowerFlowOptions& opts = {});

/// Max power-balance mismatch of a candidate solution (used post-hoc and
/// by tests; evaluates the exact equation, not the sweep recursion).
double power_flow_residual(const Pdn& pdn, const std::vector<Eigen::VectorXcd>& inj_at_t,
                           const PowerFlowSolution& solution);

}  // namespace fleetgrid
