#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fleetgrid {

using VarId = std::int32_t;
using RowId = std::int32_t;

enum class RowSense : char { le = 'L', eq = 'E', ge = 'G' };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpVariable {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    double obj = 0.0;
};

struct LpRow {
    std::string name;
    RowSense sense = RowSense::eq;
    double rhs = 0.0;
    // Sparse coefficients, kept sorted by variable id once the model is finalized.
    std::vector<std::pair<VarId, double>> coefs;
};

/// Solver-agnostic sparse linear program, minimization sense.
///
/// Names are unique across variables and across rows; coefficients and
/// bounds are checked for finiteness on insertion (bounds may be +/-inf).
class LpModel {
  public:
    VarId add_variable(std::string name, double lb = 0.0, double ub = kInf, double obj = 0.0);
    RowId add_row(std::string name, RowSense sense, double rhs);
    void add_coef(RowId row, VarId var, double coef);

    void set_bounds(VarId var, double lb, double ub);
    void set_objective_coef(VarId var, double obj);
    void fix_variable(VarId var, double value) { set_bounds(var, value, value); }

    std::optional<VarId> find_variable(const std::string& name) const;

    std::size_t num_variables() const { return vars_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    const LpVariable& variable(VarId v) const { return vars_[static_cast<std::size_t>(v)]; }
    const LpRow& row(RowId r) const { return rows_[static_cast<std::size_t>(r)]; }
    const std::vector<LpVariable>& variables() const { return vars_; }
    const std::vector<LpRow>& rows() const { return rows_; }

    // Sorts every row's coefficient list by variable id and merges duplicate
    // entries. Idempotent; export and feasibility checks call it implicitly.
    void canonicalize();

    bool structurally_equal(const LpModel& other, double tol = 0.0) const;

  private:
    std::vector<LpVariable> vars_;
    std::vector<LpRow> rows_;
    std::unordered_map<std::string, VarId> var_names_;
    std::unordered_map<std::string, RowId> row_names_;
    bool canonical_ = true;
};

enum class LpStatus { optimal, infeasible, unbounded, limit, error };

std::string to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::error;
    // Present iff status == optimal, indexed like LpModel::variables().
    std::vector<double> values;
    double objective = 0.0;
    std::string solver_info;
};

struct ResidualEntry {
    std::string name;  // row or variable name
    double residual = 0.0;
};

struct ResidualReport {
    double max_residual = 0.0;
    std::vector<ResidualEntry> row_violations;    // rows with residual > tol
    std::vector<ResidualEntry> bound_violations;  // variables outside bounds by > tol
    double tolerance = 0.0;
    bool pass = false;
};

/// Recomputes every constraint residual and bound violation of `solution`
/// against `model`. Pass iff all residuals are <= tol.
ResidualReport check_feasibility(const LpModel& model, const LpSolution& solution,
                                 double tol = 1e-6);

}  // namespace fleetgrid
