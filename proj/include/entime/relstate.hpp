#pragma once

// Relative-state decomposition of a bipartite pure state, the Gram matrix of
// environment inner products, the reduced density matrix built from it, and a
// finite-difference check of the reduced-evolution law.

#include "entime/linalg.hpp"
#include "entime/quantum_state.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace entime {
namespace rel {

// Marginals below this are treated as zero; their relative states are
// undefined and never fabricated.
inline constexpr double amplitude_floor = 1e-12;

// ---------- decomposition ----------

struct RelativeStateDecomposition {
    int dim_sys = 0;
    int dim_env = 0;
    std::vector<Complex> marginal_amplitudes;  // a_i, phase convention below
    std::vector<Vector> relative_vectors;      // |R_i>, unit norm on support
    std::vector<bool> support_mask;            // |a_i| > amplitude_floor
};

// a_i = sqrt(sum_j |a_ij|^2) times the phase of a_{i j*}, where j* is the
// smallest j with |a_ij| > amplitude_floor. The split between the phase of
// a_i and of |R_i> is otherwise free; fixing it makes runs reproducible.
inline RelativeStateDecomposition decompose(const qs::PureState& s, int split = 1) {
    const la::CompositeIndex& space = s.space();
    if (split < 1 || split >= space.factors())
        throw std::invalid_argument("rel::decompose: NotBipartite (bad split)");
    int d_sys = 1, d_env = 1;
    for (int m = 0; m < split; ++m) d_sys *= space.dim(m);
    for (int m = split; m < space.factors(); ++m) d_env *= space.dim(m);

    RelativeStateDecomposition d;
    d.dim_sys = d_sys;
    d.dim_env = d_env;
    d.marginal_amplitudes.resize(d_sys, Complex(0.0, 0.0));
    d.relative_vectors.assign(d_sys, Vector::Zero(d_env));
    d.support_mask.assign(d_sys, false);

    for (int i = 0; i < d_sys; ++i) {
        Vector row = s.vector().segment(i * d_env, d_env);
        double mod = row.norm();
        if (mod <= amplitude_floor) continue;
        int anchor = -1;
        for (int j = 0; j < d_env; ++j)
            if (std::abs(row[j]) > amplitude_floor) { anchor = j; break; }
        Complex phase = row[anchor] / std::abs(row[anchor]);
        d.marginal_amplitudes[i] = mod * phase;
        d.relative_vectors[i] = row / d.marginal_amplitudes[i];
        d.support_mask[i] = true;
    }
    return d;
}

// ---------- Gram matrix ----------

class GramMatrix {
public:
    GramMatrix(Matrix entries, std::vector<bool> support)
        : entries_(std::move(entries)), support_(std::move(support)) {
        for (int i = 0; i < entries_.rows(); ++i) {
            if (!support_[i]) continue;
            if (std::abs(entries_(i, i) - Complex(1.0, 0.0)) > 1e-10)
                throw std::invalid_argument("GramMatrix: diagonal entry deviates from 1");
            for (int ip = 0; ip < entries_.rows(); ++ip) {
                if (!support_[ip]) continue;
                if (std::abs(entries_(ip, i)) > 1.0 + 1e-10)
                    throw std::invalid_argument("GramMatrix: entry exceeds 1 (Cauchy-Schwarz)");
                if (std::abs(entries_(ip, i) - std::conj(entries_(i, ip))) > 1e-10)
                    throw std::invalid_argument("GramMatrix: not Hermitian");
            }
        }
    }

    int dim() const { return static_cast<int>(entries_.rows()); }

    // g[i'][i] = <R_i'|R_i>
    Complex at(int i_prime, int i) const {
        if (!support_[i_prime] || !support_[i])
            throw std::invalid_argument("GramMatrix: UnsupportedIndex");
        return entries_(i_prime, i);
    }

    bool supported(int i) const { return support_[i]; }
    const Matrix& raw() const { return entries_; }

    double max_offdiagonal_abs() const {
        double m = 0.0;
        for (int a = 0; a < dim(); ++a)
            for (int b = 0; b < dim(); ++b)
                if (a != b && support_[a] && support_[b])
                    m = std::max(m, std::abs(entries_(a, b)));
        return m;
    }

private:
    Matrix entries_;
    std::vector<bool> support_;
};

inline GramMatrix gram(const RelativeStateDecomposition& d) {
    Matrix g = Matrix::Zero(d.dim_sys, d.dim_sys);
    for (int ip = 0; ip < d.dim_sys; ++ip)
        for (int i = 0; i < d.dim_sys; ++i)
            if (d.support_mask[ip] && d.support_mask[i])
                g(ip, i) = d.relative_vectors[ip].dot(d.relative_vectors[i]);
    return GramMatrix(std::move(g), d.support_mask);
}

// ---------- reduced density matrix ----------

// rho_S[i][i'] = a_i a*_{i'} g[i'][i]; phases of the convention cancel, so
// this agrees with the partial trace of the full state.
inline qs::DensityMatrix reduced_rho_via_gram(const RelativeStateDecomposition& d,
                                              const GramMatrix& g) {
    Matrix rho = Matrix::Zero(d.dim_sys, d.dim_sys);
    for (int i = 0; i < d.dim_sys; ++i)
        for (int ip = 0; ip < d.dim_sys; ++ip) {
            if (!d.support_mask[i] || !d.support_mask[ip]) continue;
            rho(i, ip) = d.marginal_amplitudes[i] * std::conj(d.marginal_amplitudes[ip])
                         * g.at(ip, i);
        }
    return qs::DensityMatrix(std::move(rho), la::CompositeIndex({d.dim_sys}));
}

// ---------- evolution-law residual ----------

// Compares a central finite difference of rho_S(t) against
//   -(i/hbar) <phi_i|[H_S, rho_S]|phi_j> + rho_ij d/dt ln<R_j|R_i>.
// The law's split of the dynamics between a_i and |R_i> is consistent only
// when H_S is diagonal in the pointer basis (the H_S coupling must stay
// proportional to |R_i>), so diagonal H_S is required alongside diagonal
// H_SE. H_E may be any Hermitian matrix: each |R_i> is propagated by
// exp(-i (H_E + D_i) t) with D_i the i-th diagonal block of H_SE, which
// makes the Gram log-derivative analytic and free of the phase convention.
inline double drho_dt_residual(const Matrix& h_s, const Matrix& h_e,
                               const Matrix& h_se, const qs::PureState& s,
                               double t, double dt) {
    const la::CompositeIndex& space = s.space();
    if (space.factors() != 2)
        throw std::invalid_argument("drho_dt_residual: NotBipartite");
    const int ns = space.dim(0), ne = space.dim(1);
    if (h_s.rows() != ns || h_e.rows() != ne || h_se.rows() != ns * ne)
        throw std::invalid_argument("drho_dt_residual: dimension mismatch");

    auto require_diag = [](const Matrix& m, const char* block) {
        double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (r != c && std::abs(m(r, c)) > 1e-12 * scale)
                    throw std::invalid_argument(std::string("drho_dt_residual: ")
                        + "NotDiagonalInteraction (" + block + " not diagonal)");
    };
    require_diag(h_se, "H_SE");
    require_diag(h_s, "H_S");
    la::require_hermitian(h_e, "drho_dt_residual");

    // omega_ij from the diagonal coupling.
    std::vector<Vector> d_i(ns, Vector::Zero(ne));
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ne; ++j)
            d_i[i][j] = h_se(i * ne + j, i * ne + j).real();

    Matrix h_full = la::kron(h_s, Matrix::Identity(ne, ne))
                  + la::kron(Matrix::Identity(ns, ns), h_e) + h_se;

    auto rho_at = [&](double tt) {
        Vector psi = la::matrix_exponential_skew(h_full, tt) * s.vector();
        return qs::partial_trace(qs::density_from_pure(qs::PureState(psi, space)), {0});
    };

    RelativeStateDecomposition d0 = decompose(s, 1);
    for (int i = 0; i < ns; ++i)
        if (!d0.support_mask[i])
            throw std::invalid_argument("drho_dt_residual: VanishingAmplitude (branch "
                + std::to_string(i) + ")");

    // Per-branch relative-state propagation.
    std::vector<Vector> r_t(ns);
    for (int i = 0; i < ns; ++i) {
        Matrix gen = h_e + Matrix(d_i[i].asDiagonal());
        r_t[i] = la::matrix_exponential_skew(gen, t) * d0.relative_vectors[i];
    }

    Matrix rho_m = rho_at(t - dt).matrix();
    Matrix rho_0 = rho_at(t).matrix();
    Matrix rho_p = rho_at(t + dt).matrix();
    Matrix lhs = (rho_p - rho_m) / (2.0 * dt);
    Matrix commutator = h_s * rho_0 - rho_0 * h_s;

    double residual = 0.0;
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < ns; ++j) {
            Complex g_ji = r_t[j].dot(r_t[i]);
            // Log derivative is singular at Gram zeros; such pairs are
            // excluded, not silently zeroed.
            if (std::abs(g_ji) < 1e-6) continue;
            Complex dg_ji = Complex(0.0, 1.0)
                          * r_t[j].dot(((d_i[j] - d_i[i]).asDiagonal() * r_t[i]).eval());
            Complex formula = Complex(0.0, -1.0) * commutator(i, j)
                            + rho_0(i, j) * (dg_ji / g_ji);
            residual = std::max(residual, std::abs(lhs(i, j) - formula));
        }
    }
    return residual;
}

}  // namespace rel
}  // namespace entime
