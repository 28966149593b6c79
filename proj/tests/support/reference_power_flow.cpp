#include "support/reference_power_flow.hpp"

namespace fleetgrid::testing {

std::optional<ReferenceSolution> reference_power_flow(const Pdn& pdn,
                                                      const std::vector<Eigen::VectorXcd>& inj,
                                                      int t, const ReferenceOptions& opts) {
    // Stack every (bus, phase) pair into one index space.
    std::vector<int> offset(pdn.buses.size() + 1, 0);
    for (std::size_t b = 0; b < pdn.buses.size(); ++b)
        offset[b + 1] = offset[b] + static_cast<int>(pdn.buses[b].phases.size());
    const int n_total = offset.back();
    const int n_ref = offset[1];

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n_total, n_total);
    for (const auto& link : pdn.links) {
        const Eigen::MatrixXcd y_link = link.z.inverse();
        const auto pos_from = phase_positions(
            link.phases, pdn.buses[static_cast<std::size_t>(link.from)].phases);
        const auto pos_to =
            phase_positions(link.phases, pdn.buses[static_cast<std::size_t>(link.to)].phases);
        const int dim = static_cast<int>(link.phases.size());
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const int fi = offset[static_cast<std::size_t>(link.from)] +
                               pos_from[static_cast<std::size_t>(i)];
                const int fj = offset[static_cast<std::size_t>(link.from)] +
                               pos_from[static_cast<std::size_t>(j)];
                const int ti = offset[static_cast<std::size_t>(link.to)] +
                               pos_to[static_cast<std::size_t>(i)];
                const int tj = offset[static_cast<std::size_t>(link.to)] +
                               pos_to[static_cast<std::size_t>(j)];
                y(fi, fj) += y_link(i, j);
                y(ti, tj) += y_link(i, j);
                y(fi, tj) -= y_link(i, j);
                y(ti, fj) -= y_link(i, j);
            }
    }
    for (std::size_t b = 0; b < pdn.buses.size(); ++b) {
        const auto& shunt = pdn.buses[b].shunt;
        if (shunt.size() == 0) continue;
        const int dim = static_cast<int>(pdn.buses[b].phases.size());
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) y(offset[b] + i, offset[b] + j) += shunt(i, j);
    }

    const int n_pq = n_total - n_ref;
    const Eigen::MatrixXcd y_p0 = y.block(n_ref, 0, n_pq, n_ref);
    const Eigen::MatrixXcd y_pp = y.block(n_ref, n_ref, n_pq, n_pq);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(y_pp);

    const auto& v0 = pdn.v_ref.at(static_cast<std::size_t>(t - 1));
    const double vscale = v0.cwiseAbs().maxCoeff();

    Eigen::VectorXcd s_inj = Eigen::VectorXcd::Zero(n_pq);
    for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
        if (inj[b].size() == 0) continue;
        for (int p = 0; p < static_cast<int>(pdn.buses[b].phases.size()); ++p)
            s_inj[offset[b] - n_ref + p] = inj[b][p];
    }

    Eigen::VectorXcd v_p(n_pq);
    for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
        const Eigen::VectorXcd flat = balanced_unit_voltage(pdn.buses[b].phases) * vscale;
        for (int p = 0; p < flat.size(); ++p) v_p[offset[b] - n_ref + p] = flat[p];
    }

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        Eigen::VectorXcd i_p(n_pq);
        for (int k = 0; k < n_pq; ++k) {
            if (std::abs(v_p[k]) < 1e-3 * vscale) return std::nullopt;
            i_p[k] = std::conj(s_inj[k] / v_p[k]);
        }
        const Eigen::VectorXcd next = lu.solve(i_p - y_p0 * v0);
        const double dv = (next - v_p).cwiseAbs().maxCoeff();
        v_p = (1.0 - opts.damping) * v_p + opts.damping * next;
        if (dv < opts.tolerance * vscale) break;
    }
    if (iter >= opts.max_iterations) return std::nullopt;

    ReferenceSolution out;
    out.iterations = iter;
    out.v.resize(pdn.buses.size());
    out.v[0] = v0;
    for (std::size_t b = 1; b < pdn.buses.size(); ++b) {
        const int dim = static_cast<int>(pdn.buses[b].phases.size());
        out.v[b] = v_p.segment(offset[b] - n_ref, dim);
    }
    const Eigen::VectorXcd i_0 = y.block(0, 0, n_ref, n_ref) * v0 +
                                 y.block(0, n_ref, n_ref, n_pq) * v_p;
    out.s_ref = v0.cwiseProduct(i_0.conjugate());
    return out;
}

}  // namespace fleetgrid::testing
