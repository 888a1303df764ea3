#pragma once

// Soluble diagonal energy model: interaction-picture closed-form evolution,
// Gram inner products, sinc and thermal decoherence envelopes, profile
// discretization, and recurrence scanning.

#include "entime/linalg.hpp"
#include "entime/quantum_state.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace entime {
namespace dem {

// ---------- system ----------

struct DemSystem {
    std::vector<Complex> a;        // subsystem amplitudes, sum |a_i|^2 = 1
    std::vector<Complex> b;        // environment amplitudes, sum |b_j|^2 = 1
    std::vector<std::vector<double>> omega;  // interaction frequencies w_ij
    std::vector<double> omega_s;   // bare subsystem frequencies (may be empty)
    std::vector<double> omega_e;   // bare environment frequencies (may be empty)

    int n_sys() const { return static_cast<int>(a.size()); }
    int n_env() const { return static_cast<int>(b.size()); }

    void validate() const {
        if (a.empty() || b.empty())
            throw std::invalid_argument("DemSystem: empty amplitude list");
        double sa = 0.0, sb = 0.0;
        for (const Complex& x : a) sa += std::norm(x);
        for (const Complex& x : b) sb += std::norm(x);
        if (std::abs(sa - 1.0) > 1e-12 || std::abs(sb - 1.0) > 1e-12)
            throw std::invalid_argument("DemSystem: amplitudes not normalized");
        if (static_cast<int>(omega.size()) != n_sys())
            throw std::invalid_argument("DemSystem: omega row count != N_S");
        for (const auto& row : omega) {
            if (static_cast<int>(row.size()) != n_env())
                throw std::invalid_argument("DemSystem: omega column count != N_E");
            for (double w : row)
                if (!std::isfinite(w))
                    throw std::invalid_argument("DemSystem: non-finite omega");
        }
        if (!omega_s.empty() && static_cast<int>(omega_s.size()) != n_sys())
            throw std::invalid_argument("DemSystem: bare subsystem frequency count");
        if (!omega_e.empty() && static_cast<int>(omega_e.size()) != n_env())
            throw std::invalid_argument("DemSystem: bare environment frequency count");
    }
};

// ---------- spectral profiles ----------

struct SpectralProfile {
    enum class Kind { step, thermal, explicit_list };
    Kind kind = Kind::step;
    double center = 0.0;     // step: band center Omega_0
    double bandwidth = 0.0;  // step: band width Omega > 0
    double tau = 0.0;        // thermal: hbar / (k_B T) > 0
    std::vector<std::pair<double, double>> lines;  // explicit: (frequency, weight)

    static SpectralProfile step(double bandwidth, double center = 0.0) {
        if (bandwidth <= 0.0)
            throw std::invalid_argument("SpectralProfile: step bandwidth must be positive");
        SpectralProfile p;
        p.kind = Kind::step;
        p.center = center;
        p.bandwidth = bandwidth;
        return p;
    }
    static SpectralProfile thermal(double tau) {
        if (tau <= 0.0)
            throw std::invalid_argument("SpectralProfile: thermal tau must be positive");
        SpectralProfile p;
        p.kind = Kind::thermal;
        p.tau = tau;
        return p;
    }
    static SpectralProfile explicit_lines(std::vector<std::pair<double, double>> lines) {
        double total = 0.0;
        for (const auto& [f, w] : lines) {
            if (w < 0.0)
                throw std::invalid_argument("SpectralProfile: negative weight");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("SpectralProfile: weights must sum to 1");
        SpectralProfile p;
        p.kind = Kind::explicit_list;
        p.lines = std::move(lines);
        return p;
    }

    // Decoherence timescale: 2 pi / Omega for step, tau for thermal.
    double timescale() const {
        switch (kind) {
        case Kind::step: return 2.0 * M_PI / bandwidth;
        case Kind::thermal: return tau;
        default:
            throw std::invalid_argument("SpectralProfile: no timescale for explicit profile");
        }
    }
};

// Frequencies truncate the thermal tail here; the neglected mass is e^-20.
inline constexpr double thermal_cutoff_factor = 20.0;

// J representative frequencies with weights summing to 1. Step: uniform
// bins, midpoint frequencies. Thermal: equal-probability-mass bins of the
// truncated exponential weight tau e^{-w tau}, midpoint via the inverse CDF.
inline std::pair<std::vector<double>, std::vector<double>>
discretize_profile(const SpectralProfile& p, int j_levels) {
    if (p.kind == SpectralProfile::Kind::explicit_list) {
        std::vector<double> nu, w;
        for (const auto& [f, weight] : p.lines) { nu.push_back(f); w.push_back(weight); }
        return {nu, w};
    }
    if (j_levels < 2)
        throw std::invalid_argument("discretize_profile: J must be at least 2");
    std::vector<double> nu(j_levels), w(j_levels, 1.0 / j_levels);
    if (p.kind == SpectralProfile::Kind::step) {
        for (int k = 0; k < j_levels; ++k)
            nu[k] = p.center - 0.5 * p.bandwidth
                  + p.bandwidth * (k + 0.5) / j_levels;
    } else {
        double mass = 1.0 - std::exp(-thermal_cutoff_factor);
        for (int k = 0; k < j_levels; ++k)
            nu[k] = -std::log(1.0 - mass * (k + 0.5) / j_levels) / p.tau;
    }
    return {nu, w};
}

// Build a DEM system from a profile. Only frequency differences enter the
// Gram sums, so w_ij = i * scale * nu_j: pairwise differences come out as
// (i' - i) times the profile draw. scale defaults to 1, which folds the
// proportionality constant into the time units.
inline DemSystem dem_from_profile(std::vector<Complex> a, const SpectralProfile& p,
                                  int j_levels, double scale = 1.0) {
    auto [nu, w] = discretize_profile(p, j_levels);
    DemSystem sys;
    sys.a = std::move(a);
    const int je = static_cast<int>(nu.size());
    for (int j = 0; j < je; ++j)
        sys.b.push_back(Complex(std::sqrt(w[j]), 0.0));
    sys.omega.assign(sys.a.size(), std::vector<double>(je, 0.0));
    for (int i = 0; i < static_cast<int>(sys.a.size()); ++i)
        for (int j = 0; j < je; ++j)
            sys.omega[i][j] = i * scale * nu[j];
    sys.validate();
    return sys;
}

// ---------- closed-form evolution ----------

// a_ij(t) = a_i b_j exp(-i w_ij t), interaction picture: bare phases are
// absorbed, only the interaction frequencies act.
inline qs::PureState evolve_closed_form(const DemSystem& sys, double t) {
    sys.validate();
    const int ns = sys.n_sys(), ne = sys.n_env();
    Vector psi(ns * ne);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ne; ++j)
            psi[i * ne + j] = sys.a[i] * sys.b[j]
                            * std::exp(Complex(0.0, -sys.omega[i][j] * t));
    return qs::PureState(std::move(psi), la::CompositeIndex({ns, ne}));
}

// <R_i'|R_i>(t) = sum_j |b_j|^2 exp(i (w_i'j - w_ij) t).
inline Complex gram_closed_form(const DemSystem& sys, int i_prime, int i, double t) {
    if (i_prime < 0 || i_prime >= sys.n_sys() || i < 0 || i >= sys.n_sys())
        throw std::out_of_range("gram_closed_form: index out of range");
    if (std::abs(sys.a[i_prime]) == 0.0 || std::abs(sys.a[i]) == 0.0)
        throw std::invalid_argument("gram_closed_form: UnsupportedIndex (zero amplitude)");
    if (i_prime == i || t == 0.0) return Complex(1.0, 0.0);
    Complex g(0.0, 0.0);
    for (int j = 0; j < sys.n_env(); ++j)
        g += std::norm(sys.b[j])
           * std::exp(Complex(0.0, (sys.omega[i_prime][j] - sys.omega[i][j]) * t));
    return g;
}

inline double gram_offdiag_max(const DemSystem& sys, double t) {
    double m = 0.0;
    for (int ip = 0; ip < sys.n_sys(); ++ip)
        for (int i = 0; i < sys.n_sys(); ++i)
            if (ip != i)
                m = std::max(m, std::abs(gram_closed_form(sys, ip, i, t)));
    return m;
}

// ---------- continuum envelopes ----------

// sin(x)/x with the series for small x to avoid cancellation.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

inline Complex envelope_step(double bandwidth, double center, double t) {
    if (bandwidth <= 0.0)
        throw std::invalid_argument("envelope_step: bandwidth must be positive");
    return std::exp(Complex(0.0, center * t)) * sinc(0.5 * bandwidth * t);
}

// exp(i atan(t/tau)) / sqrt(1 + t^2/tau^2), the transform of the thermal
// weight tau e^{-w tau}.
inline Complex envelope_thermal(double tau, double t) {
    if (tau <= 0.0)
        throw std::invalid_argument("envelope_thermal: tau must be positive");
    double r = t / tau;
    return std::exp(Complex(0.0, std::atan(r))) / std::sqrt(1.0 + r * r);
}

// |discrete J-term Gram sum - continuum envelope| at time t.
inline double discretization_error(const SpectralProfile& p, int j_levels, double t) {
    if (p.kind == SpectralProfile::Kind::explicit_list)
        throw std::invalid_argument("discretization_error: profile must be step or thermal");
    if (t == 0.0) return 0.0;  // both sides are exactly 1
    auto [nu, w] = discretize_profile(p, j_levels);
    Complex discrete(0.0, 0.0);
    for (std::size_t k = 0; k < nu.size(); ++k)
        discrete += w[k] * std::exp(Complex(0.0, nu[k] * t));
    Complex continuum = (p.kind == SpectralProfile::Kind::step)
        ? envelope_step(p.bandwidth, p.center, t)
        : envelope_thermal(p.tau, t);
    return std::abs(discrete - continuum);
}

// ---------- recurrence scan ----------

struct RecurrenceReport {
    std::vector<std::pair<double, double>> maxima;  // (time, |g|) after first decay
    bool revival = false;       // some maximum exceeded 0.99
    double revival_time = 0.0;  // first such time
};

// Samples max off-diagonal |Gram| on [0, t_max] and lists local maxima after
// the first decay; commensurate frequencies show up as |g| > 0.99 revivals.
inline RecurrenceReport recurrence_scan(const DemSystem& sys, double t_max, int samples) {
    if (samples < 3)
        throw std::invalid_argument("recurrence_scan: needs at least 3 samples");
    if (t_max <= 0.0)
        throw std::invalid_argument("recurrence_scan: t_max must be positive");
    std::vector<double> g(samples);
    for (int k = 0; k < samples; ++k)
        g[k] = gram_offdiag_max(sys, t_max * k / (samples - 1));
    RecurrenceReport report;
    bool decayed = false;
    for (int k = 1; k + 1 < samples; ++k) {
        if (!decayed && g[k] < g[k - 1]) decayed = true;
        if (decayed && g[k] >= g[k - 1] && g[k] > g[k + 1]) {
            double t = t_max * k / (samples - 1);
            report.maxima.emplace_back(t, g[k]);
            if (!report.revival && g[k] > 0.99) {
                report.revival = true;
                report.revival_time = t;
            }
        }
    }
    return report;
}

}  // namespace dem
}  // namespace entime
