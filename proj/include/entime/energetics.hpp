#pragma once

// Energy bookkeeping over relative-state branches: component coupling blocks,
// the branch-weighted energy decomposition, conservation audits under both
// collapse readings, and the branch-level Clausius identity.

#include "entime/dem.hpp"
#include "entime/entropic_chain.hpp"
#include "entime/linalg.hpp"
#include "entime/quantum_state.hpp"
#include "entime/relstate.hpp"
#include "entime/rng.hpp"

#include <cmath>
#include <vector>

namespace entime {
namespace en {

// ---------- coupling blocks ----------

// Matrix elements <phi_i' R_i' | H_X | phi_i R_i> for each Hamiltonian
// component. The environment and interaction parts are exactly diagonal in
// the branch labels (phi orthonormality kills i' != i); only the system part
// carries the Gram factor.
struct CouplingBlocks {
    Matrix sys;          // H_S(i',i) * <R_i'|R_i>
    Matrix env;          // delta_{i'i} * <R_i|H_E|R_i>
    Matrix interaction;  // delta_{i'i} * sum_j |R_ij|^2 omega_ij
};

inline CouplingBlocks coupling_elements(const Matrix& h_s, const Matrix& h_e,
                                        const Matrix& h_se,
                                        const rel::RelativeStateDecomposition& d) {
    const int ns = d.dim_sys, ne = d.dim_env;
    if (h_s.rows() != ns || h_s.cols() != ns || h_e.rows() != ne || h_e.cols() != ne
        || h_se.rows() != ns * ne || h_se.cols() != ns * ne)
        throw std::invalid_argument("coupling_elements: dimension mismatch");
    la::require_hermitian(h_s, "coupling_elements (H_S)");
    la::require_hermitian(h_e, "coupling_elements (H_E)");
    for (int r = 0; r < h_se.rows(); ++r)
        for (int c = 0; c < h_se.cols(); ++c)
            if (r != c && std::abs(h_se(r, c)) > 1e-12)
                throw std::invalid_argument(
                    "coupling_elements: NotDiagonalInteraction (H_SE off-diagonal)");

    CouplingBlocks b{Matrix::Zero(ns, ns), Matrix::Zero(ns, ns), Matrix::Zero(ns, ns)};
    for (int ip = 0; ip < ns; ++ip) {
        if (!d.support_mask[ip]) continue;  // weightless branch, blocks stay 0
        for (int i = 0; i < ns; ++i) {
            if (!d.support_mask[i]) continue;
            b.sys(ip, i) = h_s(ip, i) * d.relative_vectors[ip].dot(d.relative_vectors[i]);
        }
        b.env(ip, ip) = d.relative_vectors[ip].dot(h_e * d.relative_vectors[ip]);
        Complex w = 0.0;
        for (int j = 0; j < ne; ++j)
            w += h_se(ip * ne + j, ip * ne + j) * std::norm(d.relative_vectors[ip][j]);
        b.interaction(ip, ip) = w;
    }
    return b;
}

// ---------- energy decomposition ----------

struct EnergyDecomposition {
    double total = 0.0;                  // <Psi|H|Psi>
    std::vector<double> branch_values;   // <E_i> over normalized branches
    std::vector<double> branch_weights;  // |a_i|^2
    double gram_offdiag_max = 0.0;
    double identity_gap = 0.0;  // |total - sum w_i <E_i>|, cross terms of H_S
};

// The gap between <E> and the branch-weighted mean comes only from the H_S
// cross terms a_i a_i'* H_S(i',i) g(i',i): the environment and interaction
// parts decompose exactly. When the Gram matrix is orthogonal within
// ortho_tol the gap must sit under that cross-term bound (plus rounding), and
// a violation is a computation bug, not a physics outcome.
inline EnergyDecomposition energy_decomposition(const qs::PureState& s,
                                                const Matrix& h_s, const Matrix& h_e,
                                                const Matrix& h_se,
                                                double ortho_tol = chain::default_ortho_tol) {
    rel::RelativeStateDecomposition d = rel::decompose(s);
    CouplingBlocks blocks = coupling_elements(h_s, h_e, h_se, d);
    rel::GramMatrix g = rel::gram(d);

    Matrix h = la::kron(h_s, Matrix::Identity(d.dim_env, d.dim_env))
               + la::kron(Matrix::Identity(d.dim_sys, d.dim_sys), h_e) + h_se;
    EnergyDecomposition out;
    out.total = s.vector().dot(h * s.vector()).real();
    out.gram_offdiag_max = g.max_offdiagonal_abs();

    double mean = 0.0, cross_bound = 0.0;
    for (int i = 0; i < d.dim_sys; ++i) {
        double w = std::norm(d.marginal_amplitudes[i]);
        double e = d.support_mask[i]
                       ? (blocks.sys(i, i) + blocks.env(i, i) + blocks.interaction(i, i)).real()
                       : 0.0;
        out.branch_values.push_back(e);
        out.branch_weights.push_back(w);
        mean += w * e;
        for (int ip = 0; ip < d.dim_sys; ++ip)
            if (ip != i)
                cross_bound += std::abs(d.marginal_amplitudes[i])
                               * std::abs(d.marginal_amplitudes[ip]) * std::abs(h_s(ip, i));
    }
    out.identity_gap = std::abs(out.total - mean);
    if (out.gram_offdiag_max <= ortho_tol
        && out.identity_gap > 1e-9 + out.gram_offdiag_max * cross_bound)
        throw std::logic_error("energy_decomposition: branch identity violated");
    return out;
}

// ---------- conservation audit ----------

struct ConservationAudit {
    std::vector<double> times;
    std::vector<double> energies;        // <E>(t) along the run
    int collapse_index = -1;             // grid index of the objective collapse
    int outcome = -1;
    std::vector<double> branch_energies; // <E_k> at the collapse point
    std::vector<double> branch_weights;  // |a_k|^2 just before collapse
    std::vector<double> jumps;           // dE_k = <E> - <E_k>
};

namespace detail {

// All three H components are diagonal for the soluble model, so <E> needs
// only the amplitude moduli; branch k contributes with |R_kj|^2 = |b_j|^2.
// Empty bare-frequency lists count as zero.
inline double dem_branch_energy(const dem::DemSystem& sys, int k) {
    double e = sys.omega_s.empty() ? 0.0 : sys.omega_s[k];
    for (int j = 0; j < sys.n_env(); ++j) {
        double bare = sys.omega_e.empty() ? 0.0 : sys.omega_e[j];
        e += std::norm(sys.b[j]) * (bare + sys.omega[k][j]);
    }
    return e;
}

}  // namespace detail

// Tracks <E> over the grid. Subjective mode never projects and the series is
// constant to rounding. Objective mode applies one Born-sampled collapse at
// the middle grid point (which must be decohered within ortho_tol) and then
// follows the surviving branch, recording every branch energy and jump.
inline ConservationAudit conservation_audit(const dem::DemSystem& sys,
                                            const std::vector<double>& t_grid,
                                            chain::CollapseMode mode,
                                            std::uint64_t seed,
                                            double ortho_tol = chain::default_ortho_tol) {
    sys.validate();
    if (t_grid.empty())
        throw std::invalid_argument("conservation_audit: empty time grid");
    for (std::size_t n = 1; n < t_grid.size(); ++n)
        if (t_grid[n] <= t_grid[n - 1])
            throw std::invalid_argument("conservation_audit: time grid not increasing");

    std::vector<double> weights, branch_e;
    double total = 0.0;
    for (int k = 0; k < sys.n_sys(); ++k) {
        weights.push_back(std::norm(sys.a[k]));
        branch_e.push_back(detail::dem_branch_energy(sys, k));
        total += weights.back() * branch_e.back();
    }

    ConservationAudit audit;
    audit.times = t_grid;
    if (mode == chain::CollapseMode::subjective) {
        audit.energies.assign(t_grid.size(), total);
        return audit;
    }

    std::size_t mid = t_grid.size() / 2;
    double offdiag = dem::gram_offdiag_max(sys, t_grid[mid]);
    if (offdiag > ortho_tol)
        throw std::runtime_error("conservation_audit: NotDecohered (max off-diagonal |g| = "
            + std::to_string(offdiag) + " at t = " + std::to_string(t_grid[mid]) + ")");
    rng::Engine engine(seed);
    int outcome = rng::discrete(engine, weights);

    audit.collapse_index = static_cast<int>(mid);
    audit.outcome = outcome;
    audit.branch_energies = branch_e;
    audit.branch_weights = weights;
    for (int k = 0; k < sys.n_sys(); ++k)
        audit.jumps.push_back(total - branch_e[k]);
    for (std::size_t n = 0; n < t_grid.size(); ++n)
        audit.energies.push_back(n < mid ? total : branch_e[outcome]);
    return audit;
}

// ---------- branch-level Clausius identity ----------

struct ClausiusPair {
    double ds = 0.0;         // entropy change of singling out branch k
    double de_over_t = 0.0;  // energy jump over temperature
};

// With Boltzmann-assigned weights the branch energy is defined as
// E_k = -T ln w_k, so both columns reduce to S_mix + ln w_k. The two sides
// are still computed through separate arithmetic (entropy sums vs energy
// means) and the identity is asserted to 1e-12.
inline std::vector<ClausiusPair> clausius_identity(const std::vector<double>& weights,
                                                   double temperature) {
    if (weights.empty())
        throw std::invalid_argument("clausius_identity: no weights");
    if (!(temperature > 0.0))
        throw std::invalid_argument("clausius_identity: nonpositive temperature");
    double sum = 0.0;
    for (double w : weights) {
        if (w <= 0.0)
            throw std::invalid_argument("clausius_identity: ZeroWeight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("clausius_identity: weights not normalized");

    double s_mix = 0.0;
    for (double w : weights) s_mix -= w * std::log(w);
    std::vector<double> energies;
    double mean_e = 0.0;
    for (double w : weights) {
        energies.push_back(-temperature * std::log(w));
        mean_e += w * energies.back();
    }

    std::vector<ClausiusPair> out;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        ClausiusPair p;
        p.ds = s_mix + std::log(weights[k]);
        p.de_over_t = (mean_e - energies[k]) / temperature;
        if (std::abs(p.ds - p.de_over_t) > 1e-12)
            throw std::logic_error("clausius_identity: identity broken beyond 1e-12");
        out.push_back(p);
    }
    return out;
}

}  // namespace en
}  // namespace entime
