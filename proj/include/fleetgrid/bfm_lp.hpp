#pragma once

#include <string>
#include <vector>

#include "fleetgrid/lp_model.hpp"
#include "fleetgrid/pdn.hpp"
#include "fleetgrid/power_flow.hpp"

namespace fleetgrid {

/// A complex LP quantity realized as independent real/imaginary scalars.
/// Purely real quantities (Hermitian diagonals) leave `im` unset.
struct ComplexVar {
    VarId re = -1;
    VarId im = -1;
    bool is_real() const { return im < 0; }
};

/// Upper-triangle storage of a Hermitian matrix variable.
struct HermitianVars {
    int dim = 0;
    std::vector<ComplexVar> upper;  // row-major upper triangle, diagonal first per row

    const ComplexVar& at_upper(int i, int j) const;  // requires i <= j
    // Entry (i, j) for any i, j: second member is true when the stored
    // upper-triangle entry must be conjugated.
    std::pair<ComplexVar, bool> entry(int i, int j) const;
};

struct BfmVariables {
    std::vector<std::vector<HermitianVars>> V;           // [bus][t]
    std::vector<std::vector<std::vector<ComplexVar>>> lambda;  // [link][t][phase]
    std::vector<std::vector<ComplexVar>> s0;             // [t][phase]
    std::vector<std::vector<std::vector<ComplexVar>>> sc;      // [slot][t][phase]
};

struct BfmFragment {
    std::string pdn_id;
    BfmVariables vars;
    std::size_t num_variables = 0;
    std::vector<RowId> balance_rows;
    std::vector<RowId> voltage_rows;
    std::vector<RowId> rating_rows;

    Eigen::VectorXcd s0_at(const LpSolution& sol, int t) const;
    Eigen::VectorXcd slot_at(const LpSolution& sol, std::size_t slot, int t) const;
    /// Voltage magnitudes at a bus: sqrt of the diagonal of V.
    Eigen::VectorXd v_mag_at(const LpSolution& sol, std::size_t bus, int t) const;

    /// Writes the values induced by an exact power-flow series (V = v v^H,
    /// lambda = diag(v_from i^H), s0 = reference injection) and the given
    /// controllable loads into `values`. Used to audit surrogate rows
    /// against exact solutions.
    void fill_from_exact(const Pdn& pdn, const std::vector<PowerFlowSolution>& series,
                         const ControllableLoadSeries& loads,
                         std::vector<double>& values) const;
};

struct PolygonHalfplane {
    double coef_p = 0.0;
    double coef_q = 0.0;
    double rhs = 0.0;
};

/// Inscribed regular polygon replacing the apparent-power circle
/// |p + jq| <= s_max: half-planes cos(phi_k) p + sin(phi_k) q <= s_max cos(pi/n)
/// with phi_k = (2k+1) pi / n. Inscribed, so no accepted point leaves the circle.
std::vector<PolygonHalfplane> polygon_halfplanes(double s_max, int n_faces = 12);

/// Emits the linearized branch-flow surrogate of one network for every time
/// step: reference-voltage pins, per-bus power balance with fixed loss
/// corrections, per-link squared-voltage updates, squared voltage-magnitude
/// bounds, the polygonal substation-rating constraint, and controllable-load
/// boxes. Appends to `model` with names prefixed by the network id.
BfmFragment emit_bfm_lp(LpModel& model, const Pdn& pdn,
                        const FixedLinearizationParams& params);

}  // namespace fleetgrid
