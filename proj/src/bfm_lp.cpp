#include "fleetgrid/bfm_lp.hpp"

#include <cmath>
#include <numbers>

namespace fleetgrid {

namespace {

int upper_index(int dim, int i, int j) {
    // Row-major upper triangle: row i starts after sum_{r<i} (dim - r).
    return i * dim - i * (i - 1) / 2 + (j - i);
}

// Accumulates a complex-linear expression sum coef_k * z_k (+ conj variants)
// and emits it as one or two real equality rows.
class ComplexRow {
  public:
    void add(const ComplexVar& z, Complex coef, bool conjugated = false) {
        if (coef == Complex(0.0, 0.0)) return;
        terms_.push_back({z, coef, conjugated});
    }

    void emit_eq(LpModel& model, const std::string& name, Complex rhs,
                 std::vector<RowId>& rows, bool real_only = false) const {
        RowId re_row = model.add_row(name + ".re", RowSense::eq, rhs.real());
        rows.push_back(re_row);
        for (const auto& term : terms_) {
            const double cr = term.coef.real();
            const double ci = term.coef.imag();
            model.add_coef(re_row, term.z.re, cr);
            if (!term.z.is_real()) model.add_coef(re_row, term.z.im, term.conj ? ci : -ci);
        }
        if (real_only) return;
        RowId im_row = model.add_row(name + ".im", RowSense::eq, rhs.imag());
        rows.push_back(im_row);
        for (const auto& term : terms_) {
            const double cr = term.coef.real();
            const double ci = term.coef.imag();
            model.add_coef(im_row, term.z.re, ci);
            if (!term.z.is_real()) model.add_coef(im_row, term.z.im, term.conj ? -cr : cr);
        }
    }

  private:
    struct Term {
        ComplexVar z;
        Complex coef;
        bool conj;
    };
    std::vector<Term> terms_;
};

std::string phase_pair(const PhaseSet& phases, int i, int j) {
    return std::string(1, phase_letter(phases[static_cast<std::size_t>(i)])) +
           phase_letter(phases[static_cast<std::size_t>(j)]);
}

}  // namespace

const ComplexVar& HermitianVars::at_upper(int i, int j) const {
    return upper[static_cast<std::size_t>(upper_index(dim, i, j))];
}

std::pair<ComplexVar, bool> HermitianVars::entry(int i, int j) const {
    if (i <= j) return {at_upper(i, j), false};
    return {at_upper(j, i), true};
}

std::vector<PolygonHalfplane> polygon_halfplanes(double s_max, int n_faces) {
    using std::numbers::pi;
    if (s_max <= 0.0) throw ValidationError("polygon radius must be positive");
    if (n_faces < 3) throw ValidationError("polygon needs at least 3 faces");
    std::vector<PolygonHalfplane> planes;
    planes.reserve(static_cast<std::size_t>(n_faces));
    const double apothem = s_max * std::cos(pi / n_faces);
    for (int k = 0; k < n_faces; ++k) {
        const double phi = (2.0 * k + 1.0) * pi / n_faces;
        planes.push_back({std::cos(phi), std::sin(phi), apothem});
    }
    return planes;
}

BfmFragment emit_bfm_lp(LpModel& model, const Pdn& pdn,
                        const FixedLinearizationParams& params) {
    if (params.gamma.size() != pdn.links.size() || params.ell.size() != pdn.links.size())
        throw ValidationError("linearization parameters do not cover every link");
    for (std::size_t l = 0; l < pdn.links.size(); ++l) {
        if (static_cast<int>(params.gamma[l].size()) != pdn.n_t ||
            static_cast<int>(params.ell[l].size()) != pdn.n_t)
            throw ValidationError("linearization parameters do not cover every time step");
        const auto dim = static_cast<Eigen::Index>(pdn.links[l].phases.size());
        if (params.gamma[l].front().rows() != dim || params.ell[l].front().rows() != dim)
            throw ValidationError("linearization parameter phase mismatch on link " +
                                  std::to_string(l));
    }

    const auto topo = build_topology(pdn);
    const std::string& id = pdn.id;
    const std::size_t vars_before = model.num_variables();

    BfmFragment frag;
    frag.pdn_id = id;
    auto& vars = frag.vars;
    vars.V.resize(pdn.buses.size());
    for (auto& per_bus : vars.V) per_bus.resize(static_cast<std::size_t>(pdn.n_t));
    vars.lambda.resize(pdn.links.size());
    for (auto& per_link : vars.lambda) per_link.resize(static_cast<std::size_t>(pdn.n_t));
    vars.s0.resize(static_cast<std::size_t>(pdn.n_t));
    vars.sc.resize(pdn.controllable.size());
    for (auto& per_slot : vars.sc) per_slot.resize(static_cast<std::size_t>(pdn.n_t));

    const auto planes = polygon_halfplanes(pdn.rating);

    for (int t = 1; t <= pdn.n_t; ++t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        const std::string ts = ".t" + std::to_string(t);

        // Squared-voltage matrix variables, upper triangle only.
        for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
            const auto& bus = pdn.buses[b];
            const int dim = static_cast<int>(bus.phases.size());
            HermitianVars H;
            H.dim = dim;
            for (int i = 0; i < dim; ++i) {
                for (int j = i; j < dim; ++j) {
                    const std::string base =
                        id + ".V" + std::to_string(b) + "." + phase_pair(bus.phases, i, j) + ts;
                    ComplexVar z;
                    if (i == j) {
                        double lb = -kInf, ub = kInf;
                        if (b != 0) {
                            lb = bus.u_min[i] * bus.u_min[i];
                            ub = bus.u_max[i] * bus.u_max[i];
                        }
                        z.re = model.add_variable(base, lb, ub);
                    } else {
                        z.re = model.add_variable(base + ".re", -kInf, kInf);
                        z.im = model.add_variable(base + ".im", -kInf, kInf);
                    }
                    H.upper.push_back(z);
                }
            }
            vars.V[b][ti] = std::move(H);
        }
        // Pin the reference-bus matrix to v_ref v_ref^H.
        {
            const auto& v0 = pdn.v_ref[ti];
            const int dim = static_cast<int>(pdn.reference_phases().size());
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) {
                    const Complex value = v0[i] * std::conj(v0[j]);
                    const auto& z = vars.V[0][ti].at_upper(i, j);
                    model.fix_variable(z.re, value.real());
                    if (!z.is_real()) model.fix_variable(z.im, value.imag());
                }
        }

        // Per-phase complex link power and reference injection.
        for (std::size_t l = 0; l < pdn.links.size(); ++l) {
            const auto& link = pdn.links[l];
            auto& per_phase = vars.lambda[l][ti];
            for (Phase p : link.phases) {
                const std::string base =
                    id + ".L" + std::to_string(l) + "." + phase_letter(p) + ts;
                ComplexVar z;
                z.re = model.add_variable(base + ".re", -kInf, kInf);
                z.im = model.add_variable(base + ".im", -kInf, kInf);
                per_phase.push_back(z);
            }
        }
        {
            auto& s0 = vars.s0[ti];
            for (Phase p : pdn.reference_phases()) {
                const std::string base = id + ".s0." + phase_letter(p) + ts;
                ComplexVar z;
                z.re = model.add_variable(base + ".re", -kInf, kInf);
                z.im = model.add_variable(base + ".im", -kInf, kInf);
                s0.push_back(z);
            }
        }
        for (std::size_t k = 0; k < pdn.controllable.size(); ++k) {
            const auto& slot = pdn.controllable[k];
            const auto& phases = pdn.buses[static_cast<std::size_t>(slot.bus)].phases;
            auto& per_phase = vars.sc[k][ti];
            for (std::size_t p = 0; p < phases.size(); ++p) {
                const std::string base =
                    id + ".sc" + std::to_string(k) + "." + phase_letter(phases[p]) + ts;
                ComplexVar z;
                const auto pi = static_cast<Eigen::Index>(p);
                z.re = model.add_variable(base + ".re", slot.p_min[pi], slot.p_max[pi]);
                z.im = model.add_variable(base + ".im", slot.q_min[pi], slot.q_max[pi]);
                per_phase.push_back(z);
            }
        }

        // Power balance with fixed loss corrections, one complex row per
        // bus phase.
        for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
            const auto& bus = pdn.buses[b];
            const int dim = static_cast<int>(bus.phases.size());
            const int parent = topo.parent_link[b];
            std::vector<int> parent_pos, parent_link_pos;
            Eigen::VectorXcd loss_correction = Eigen::VectorXcd::Zero(dim);
            if (parent >= 0) {
                const auto& link = pdn.links[static_cast<std::size_t>(parent)];
                auto pos = phase_positions(link.phases, bus.phases);
                const Eigen::VectorXcd link_loss =
                    (link.z * params.ell[static_cast<std::size_t>(parent)][ti]).diagonal();
                for (std::size_t k = 0; k < pos.size(); ++k)
                    loss_correction[pos[k]] += link_loss[static_cast<Eigen::Index>(k)];
                parent_pos = std::move(pos);
            }
            for (int phi = 0; phi < dim; ++phi) {
                ComplexRow row;
                // Power received from the parent link.
                if (parent >= 0) {
                    const auto& link = pdn.links[static_cast<std::size_t>(parent)];
                    for (std::size_t k = 0; k < link.phases.size(); ++k)
                        if (parent_pos[k] == phi)
                            row.add(vars.lambda[static_cast<std::size_t>(parent)][ti][k],
                                    Complex(1.0, 0.0));
                }
                // Shunt consumption, linear in the V entries.
                if (bus.shunt.size() != 0) {
                    for (int psi = 0; psi < dim; ++psi) {
                        const Complex coef = -std::conj(bus.shunt(phi, psi));
                        auto [z, conj] = vars.V[b][ti].entry(phi, psi);
                        row.add(z, coef, conj);
                    }
                }
                // Injection: reference power at the root, controllable
                // consumption at PQ buses (uncontrollable load goes to rhs).
                if (b == 0) {
                    row.add(vars.s0[ti][static_cast<std::size_t>(phi)], Complex(1.0, 0.0));
                } else {
                    for (std::size_t k = 0; k < pdn.controllable.size(); ++k)
                        if (pdn.controllable[k].bus == static_cast<int>(b))
                            row.add(vars.sc[k][ti][static_cast<std::size_t>(phi)],
                                    Complex(-1.0, 0.0));
                }
                // Power sent into child links.
                for (int lc : topo.children_links[b]) {
                    const auto& link = pdn.links[static_cast<std::size_t>(lc)];
                    const auto pos = phase_positions(link.phases, bus.phases);
                    for (std::size_t k = 0; k < pos.size(); ++k)
                        if (pos[k] == phi)
                            row.add(vars.lambda[static_cast<std::size_t>(lc)][ti][k],
                                    Complex(-1.0, 0.0));
                }
                Complex rhs = loss_correction[phi];
                if (b != 0 && !bus.load.empty()) rhs += bus.load[ti][phi];
                row.emit_eq(model,
                            id + ".bal." + std::to_string(b) + "." +
                                phase_letter(bus.phases[static_cast<std::size_t>(phi)]) + ts,
                            rhs, frag.balance_rows);
            }
        }

        // Squared-voltage update along every link.
        for (std::size_t l = 0; l < pdn.links.size(); ++l) {
            const auto& link = pdn.links[l];
            const int dim = static_cast<int>(link.phases.size());
            const auto pos_from =
                phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.from)].phases);
            const auto pos_to =
                phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.to)].phases);
            const Eigen::MatrixXcd& gamma = params.gamma[l][ti];
            const Eigen::MatrixXcd& z_mat = link.z;
            const Eigen::MatrixXcd loss_term = z_mat * params.ell[l][ti] * z_mat.adjoint();
            for (int i = 0; i < dim; ++i) {
                for (int j = i; j < dim; ++j) {
                    ComplexRow row;
                    {
                        auto [zv, conj] =
                            vars.V[static_cast<std::size_t>(link.to)][ti].entry(pos_to[i],
                                                                                pos_to[j]);
                        row.add(zv, Complex(1.0, 0.0), conj);
                    }
                    {
                        auto [zv, conj] =
                            vars.V[static_cast<std::size_t>(link.from)][ti].entry(pos_from[i],
                                                                                  pos_from[j]);
                        row.add(zv, Complex(-1.0, 0.0), conj);
                    }
                    for (int k = 0; k < dim; ++k) {
                        // [Gamma diag(L) Z^H]_{ij} + [Z (Gamma diag(L))^H]_{ij}
                        const Complex direct = gamma(i, k) * std::conj(z_mat(j, k));
                        const Complex conjugated = z_mat(i, k) * std::conj(gamma(j, k));
                        const auto& lam = vars.lambda[l][ti][static_cast<std::size_t>(k)];
                        row.add(lam, direct, false);
                        row.add(lam, conjugated, true);
                    }
                    row.emit_eq(model,
                                id + ".volt." + std::to_string(l) + "." +
                                    phase_pair(link.phases, i, j) + ts,
                                loss_term(i, j), frag.voltage_rows, /*real_only=*/i == j);
                }
            }
        }

        // Substation rating as the inscribed-polygon half-planes on the
        // summed per-phase reference injection.
        for (std::size_t k = 0; k < planes.size(); ++k) {
            RowId r = model.add_row(id + ".rate." + std::to_string(k) + ts, RowSense::le,
                                    planes[k].rhs);
            frag.rating_rows.push_back(r);
            for (const auto& z : vars.s0[ti]) {
                model.add_coef(r, z.re, planes[k].coef_p);
                model.add_coef(r, z.im, planes[k].coef_q);
            }
        }
    }

    frag.num_variables = model.num_variables() - vars_before;
    return frag;
}

Eigen::VectorXcd BfmFragment::s0_at(const LpSolution& sol, int t) const {
    const auto& entries = vars.s0[static_cast<std::size_t>(t - 1)];
    Eigen::VectorXcd out(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t p = 0; p < entries.size(); ++p)
        out[static_cast<Eigen::Index>(p)] =
            Complex(sol.values[static_cast<std::size_t>(entries[p].re)],
                    sol.values[static_cast<std::size_t>(entries[p].im)]);
    return out;
}

Eigen::VectorXcd BfmFragment::slot_at(const LpSolution& sol, std::size_t slot, int t) const {
    const auto& entries = vars.sc[slot][static_cast<std::size_t>(t - 1)];
    Eigen::VectorXcd out(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t p = 0; p < entries.size(); ++p)
        out[static_cast<Eigen::Index>(p)] =
            Complex(sol.values[static_cast<std::size_t>(entries[p].re)],
                    sol.values[static_cast<std::size_t>(entries[p].im)]);
    return out;
}

Eigen::VectorXd BfmFragment::v_mag_at(const LpSolution& sol, std::size_t bus, int t) const {
    const auto& H = vars.V[bus][static_cast<std::size_t>(t - 1)];
    Eigen::VectorXd out(H.dim);
    for (int i = 0; i < H.dim; ++i) {
        const double sq = sol.values[static_cast<std::size_t>(H.at_upper(i, i).re)];
        out[i] = sq > 0.0 ? std::sqrt(sq) : 0.0;
    }
    return out;
}

void BfmFragment::fill_from_exact(const Pdn& pdn, const std::vector<PowerFlowSolution>& series,
                                  const ControllableLoadSeries& loads,
                                  std::vector<double>& values) const {
    for (int t = 1; t <= pdn.n_t; ++t) {
        const auto ti = static_cast<std::size_t>(t - 1);
        const auto& sol = series[ti];
        for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
            const auto& H = vars.V[b][ti];
            for (int i = 0; i < H.dim; ++i)
                for (int j = i; j < H.dim; ++j) {
                    const Complex value = sol.v[b][i] * std::conj(sol.v[b][j]);
                    const auto& z = H.at_upper(i, j);
                    values[static_cast<std::size_t>(z.re)] = value.real();
                    if (!z.is_real()) values[static_cast<std::size_t>(z.im)] = value.imag();
                }
        }
        for (std::size_t l = 0; l < pdn.links.size(); ++l) {
            const auto& link = pdn.links[l];
            const auto pos = phase_positions(
                link.phases, pdn.buses[static_cast<std::size_t>(link.from)].phases);
            for (std::size_t k = 0; k < link.phases.size(); ++k) {
                const Complex value =
                    sol.v[static_cast<std::size_t>(link.from)][pos[k]] *
                    std::conj(sol.i[l][static_cast<Eigen::Index>(k)]);
                const auto& z = vars.lambda[l][ti][k];
                values[static_cast<std::size_t>(z.re)] = value.real();
                values[static_cast<std::size_t>(z.im)] = value.imag();
            }
        }
        for (std::size_t p = 0; p < vars.s0[ti].size(); ++p) {
            const auto& z = vars.s0[ti][p];
            values[static_cast<std::size_t>(z.re)] = sol.s_ref[static_cast<Eigen::Index>(p)].real();
            values[static_cast<std::size_t>(z.im)] = sol.s_ref[static_cast<Eigen::Index>(p)].imag();
        }
        for (std::size_t k = 0; k < vars.sc.size(); ++k) {
            Eigen::VectorXcd s;
            if (!loads.s.empty())
                s = loads.s[ti][k];
            else
                s = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(vars.sc[k][ti].size()));
            for (std::size_t p = 0; p < vars.sc[k][ti].size(); ++p) {
                const auto& z = vars.sc[k][ti][p];
                values[static_cast<std::size_t>(z.re)] = s[static_cast<Eigen::Index>(p)].real();
                values[static_cast<std::size_t>(z.im)] = s[static_cast<Eigen::Index>(p)].imag();
            }
        }
    }
}

}  // namespace fleetgrid
