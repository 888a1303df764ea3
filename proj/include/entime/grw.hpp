#pragma once

// Spontaneous localization on a 1-D grid: Gaussian hitting events at Poisson
// times, the resulting master equation for the position density matrix, and
// the scattering-kernel generalization of its decoherence term.

#include "entime/linalg.hpp"
#include "entime/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace entime {
namespace grw {

// ---------- grid wavefunction ----------

// Uniform grid with hard walls; continuum normalization sum |psi|^2 dx = 1.
// Not normalized on construction: hit() legitimately produces unnormalized
// filtered states, so callers assert normalization where they need it.
struct GridWavefunction {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;
    double dx = 0.0;
    Vector values;

    GridWavefunction(double xmin, double xmax, Vector vals)
        : x_min(xmin), x_max(xmax), n_points(static_cast<int>(vals.size())),
          values(std::move(vals)) {
        if (n_points < 2)
            throw std::invalid_argument("GridWavefunction: need at least two points");
        if (!(x_max > x_min))
            throw std::invalid_argument("GridWavefunction: empty interval");
        dx = (x_max - x_min) / (n_points - 1);
    }

    double x(int k) const { return x_min + k * dx; }
    double norm_sq() const { return values.squaredNorm() * dx; }

    GridWavefunction normalized() const {
        GridWavefunction out = *this;
        out.values /= std::sqrt(norm_sq());
        return out;
    }

    // Truncated at the walls, then renormalized.
    static GridWavefunction gaussian(double xmin, double xmax, int n,
                                     double center, double sigma, double k0 = 0.0) {
        if (!(sigma > 0.0))
            throw std::invalid_argument("GridWavefunction: nonpositive sigma");
        GridWavefunction psi(xmin, xmax, Vector::Zero(n));
        for (int k = 0; k < n; ++k) {
            double u = psi.x(k) - center;
            psi.values[k] = std::exp(Complex(-u * u / (4.0 * sigma * sigma), k0 * psi.x(k)));
        }
        return psi.normalized();
    }

    static GridWavefunction uniform(double xmin, double xmax, int n) {
        GridWavefunction psi(xmin, xmax, Vector::Ones(n));
        return psi.normalized();
    }
};

inline void require_normalized(const GridWavefunction& psi, const char* who,
                               double tol = 1e-9) {
    if (std::abs(psi.norm_sq() - 1.0) > tol)
        throw std::invalid_argument(std::string(who) + ": wavefunction not normalized");
}

struct HittingParams {
    double rate = 1.0;       // lambda, hits per unit time
    double alpha = 1.0;      // inverse square localization width
    std::uint64_t seed = 0;

    // rate == 0 is accepted as the degenerate no-hit limit so unitary
    // cross-checks can share the trajectory code path.
    void validate() const {
        if (rate < 0.0)
            throw std::invalid_argument("HittingParams: negative rate");
        if (!(alpha > 0.0))
            throw std::invalid_argument("HittingParams: nonpositive alpha");
    }
};

// ---------- position density matrix ----------

class PositionDensityMatrix {
public:
    PositionDensityMatrix(Matrix rho, double dx) : rho_(std::move(rho)), dx_(dx) {
        if (rho_.rows() != rho_.cols())
            throw std::invalid_argument("PositionDensityMatrix: not square");
        if (!(dx_ > 0.0))
            throw std::invalid_argument("PositionDensityMatrix: nonpositive dx");
        la::require_hermitian(rho_, "PositionDensityMatrix", 1e-8);
        if (std::abs(rho_.trace().real() * dx_ - 1.0) > 1e-8)
            throw std::invalid_argument("PositionDensityMatrix: trace*dx not 1");
        la::HermitianEig eig = la::hermitian_eig(rho_);
        if (eig.eigenvalues.minCoeff() * dx_ < -1e-8)
            throw std::invalid_argument("PositionDensityMatrix: negative eigenvalue");
    }

    const Matrix& rho() const { return rho_; }
    double dx() const { return dx_; }
    int n_points() const { return static_cast<int>(rho_.rows()); }

private:
    Matrix rho_;
    double dx_;
};

inline PositionDensityMatrix density_from_wavefunction(const GridWavefunction& psi) {
    require_normalized(psi, "density_from_wavefunction", 1e-8);
    return PositionDensityMatrix(psi.values * psi.values.adjoint(), psi.dx);
}

// Free particle, mass 1: central-difference Laplacian with Dirichlet walls.
inline Matrix free_particle_hamiltonian(int n_points, double dx) {
    Matrix h = Matrix::Zero(n_points, n_points);
    double c = 1.0 / (2.0 * dx * dx);
    for (int k = 0; k < n_points; ++k) {
        h(k, k) = 2.0 * c;
        if (k > 0) h(k, k - 1) = -c;
        if (k + 1 < n_points) h(k, k + 1) = -c;
    }
    return h;
}

// ---------- hitting events ----------

// Normalization constant K of the hit Gaussian, fixed globally by requiring
// the center distribution P(x') to integrate to 1 over the grid:
//   1/K^2 = sum_k sum_m |psi(x_m)|^2 exp(-alpha (x_m - x_k)^2 / 2) dx dx.
inline double hit_norm_constant(const GridWavefunction& psi, double alpha) {
    double s = 0.0;
    for (int k = 0; k < psi.n_points; ++k)
        for (int m = 0; m < psi.n_points; ++m) {
            double u = psi.x(m) - psi.x(k);
            s += std::norm(psi.values[m]) * std::exp(-0.5 * alpha * u * u);
        }
    s *= psi.dx * psi.dx;
    if (s < 1e-300)
        throw std::invalid_argument("hit_norm_constant: ZeroOverlap");
    return 1.0 / std::sqrt(s);
}

// P(x'_k): probability density for a hit centered at grid point k.
inline std::vector<double> hit_center_distribution(const GridWavefunction& psi,
                                                   double alpha) {
    double k2 = hit_norm_constant(psi, alpha);
    k2 *= k2;
    std::vector<double> p(psi.n_points, 0.0);
    for (int k = 0; k < psi.n_points; ++k) {
        double s = 0.0;
        for (int m = 0; m < psi.n_points; ++m) {
            double u = psi.x(m) - psi.x(k);
            s += std::norm(psi.values[m]) * std::exp(-0.5 * alpha * u * u);
        }
        p[k] = k2 * s * psi.dx;
    }
    return p;
}

struct HitResult {
    GridWavefunction filtered;   // L = psi * K * exp(-alpha (x - x_c)^2 / 4)
    double probability = 0.0;    // P = sum |L|^2 dx
    GridWavefunction collapsed;  // L / sqrt(P), exactly renormalized
};

inline HitResult hit(const GridWavefunction& psi, double x_center, double alpha) {
    if (x_center < psi.x_min || x_center > psi.x_max)
        throw std::invalid_argument("hit: OutOfGrid (center outside [x_min, x_max])");
    double k = hit_norm_constant(psi, alpha);
    GridWavefunction filtered = psi;
    for (int m = 0; m < psi.n_points; ++m) {
        double u = psi.x(m) - x_center;
        filtered.values[m] *= k * std::exp(-0.25 * alpha * u * u);
    }
    double p = filtered.norm_sq();
    if (p < 1e-300)
        throw std::invalid_argument("hit: ZeroOverlap (vanishing hit probability)");
    GridWavefunction collapsed = filtered;
    collapsed.values /= std::sqrt(p);
    return {std::move(filtered), p, std::move(collapsed)};
}

// ---------- stochastic trajectories ----------

struct Trajectory {
    std::vector<double> hit_times;
    std::vector<double> hit_centers;
    std::vector<GridWavefunction> states;  // post-hit states, in hit order
    GridWavefunction final_state;
};

inline Trajectory run_trajectory(const GridWavefunction& psi0,
                                 const HittingParams& params, const Matrix& h,
                                 double t_end, rng::Engine& engine) {
    params.validate();
    require_normalized(psi0, "run_trajectory");
    if (h.rows() != psi0.n_points || h.cols() != psi0.n_points)
        throw std::invalid_argument("run_trajectory: Hamiltonian/grid mismatch");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("run_trajectory: negative t_end");

    la::HermitianEig eig = la::hermitian_eig(h);
    auto evolve = [&](GridWavefunction& psi, double dt) {
        Vector phases(eig.eigenvalues.size());
        for (int i = 0; i < phases.size(); ++i)
            phases[i] = std::exp(Complex(0.0, -eig.eigenvalues[i] * dt));
        psi.values = eig.eigenvectors
                     * (phases.array() * (eig.eigenvectors.adjoint() * psi.values).array()).matrix();
        if (std::abs(psi.norm_sq() - 1.0) > 1e-8)
            throw std::runtime_error("run_trajectory: norm drift beyond 1e-8");
    };

    Trajectory traj{{}, {}, {}, psi0};
    double t = 0.0;
    while (params.rate > 0.0) {
        double wait = rng::exponential(engine, params.rate);
        if (t + wait >= t_end) break;
        t += wait;
        evolve(traj.final_state, wait);
        std::vector<double> centers = hit_center_distribution(traj.final_state, params.alpha);
        for (double& w : centers) w *= traj.final_state.dx;
        int idx = rng::discrete(engine, centers);
        traj.final_state = hit(traj.final_state, traj.final_state.x(idx), params.alpha).collapsed;
        traj.hit_times.push_back(t);
        traj.hit_centers.push_back(traj.final_state.x(idx));
        traj.states.push_back(traj.final_state);
    }
    evolve(traj.final_state, t_end - t);
    return traj;
}

inline Trajectory run_trajectory(const GridWavefunction& psi0,
                                 const HittingParams& params, const Matrix& h,
                                 double t_end) {
    rng::Engine engine(params.seed);
    return run_trajectory(psi0, params, h, t_end, engine);
}

// ---------- master equations ----------

// Decoherence factor of the hitting master equation; exactly 0 at s = 0.
inline double qmsl_suppression(double rate, double alpha, double s) {
    return rate * (1.0 - std::exp(-0.25 * alpha * s * s));
}

namespace detail {

template <class Kernel>
Matrix master_rhs_core(const Matrix& rho, const Matrix& h, double dx, Kernel&& f) {
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
    for (int k = 0; k < rho.rows(); ++k)
        for (int l = 0; l < rho.cols(); ++l) {
            double fv = f((k - l) * dx);
            if (fv < 0.0)
                throw std::invalid_argument("gallis_fleming_rhs: BadScatteringKernel (negative F)");
            out(k, l) -= fv * rho(k, l);
        }
    return out;
}

}  // namespace detail

// d rho / dt = -i [H, rho] - lambda (1 - exp(-alpha (x-x')^2 / 4)) rho.
inline Matrix qmsl_rhs(const PositionDensityMatrix& rho, const Matrix& h,
                       double rate, double alpha) {
    return detail::master_rhs_core(rho.rho(), h, rho.dx(), [&](double s) {
        return qmsl_suppression(rate, alpha, s);
    });
}

// Scattering form: d rho / dt = -i [H, rho] - F(x - x') rho. Choosing
// F(s) = qmsl_suppression(lambda, alpha, s) reproduces qmsl_rhs exactly.
template <class Kernel>
Matrix gallis_fleming_rhs(const PositionDensityMatrix& rho, const Matrix& h,
                          Kernel&& f) {
    if (f(0.0) != 0.0)
        throw std::invalid_argument("gallis_fleming_rhs: BadScatteringKernel (F(0) != 0)");
    return detail::master_rhs_core(rho.rho(), h, rho.dx(), f);
}

// Fixed-step RK4 on the scattering-form master equation, with a hermiticity
// assertion on the running state each step. Callers pick dt so that
// max|rhs| * dt stays at or below 1e-3.
template <class Kernel>
PositionDensityMatrix integrate_master(const PositionDensityMatrix& rho0,
                                       const Matrix& h, Kernel&& f, double t_end,
                                       double dt) {
    if (f(0.0) != 0.0)
        throw std::invalid_argument("integrate_master: BadScatteringKernel (F(0) != 0)");
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw std::invalid_argument("integrate_master: bad time step");
    int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
    double hstep = t_end / steps;
    double dx = rho0.dx();
    auto rhs = [&](const Matrix& m) { return detail::master_rhs_core(m, h, dx, f); };
    Matrix rho = rho0.rho();
    for (int n = 0; n < steps; ++n) {
        Matrix k1 = rhs(rho);
        Matrix k2 = rhs(rho + 0.5 * hstep * k1);
        Matrix k3 = rhs(rho + 0.5 * hstep * k2);
        Matrix k4 = rhs(rho + hstep * k3);
        rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (la::hermitian_deviation(rho) > 1e-8 * std::max(1.0, rho.cwiseAbs().maxCoeff()))
            throw std::runtime_error("integrate_master: hermiticity lost");
    }
    return PositionDensityMatrix(std::move(rho), dx);
}

inline PositionDensityMatrix integrate_qmsl(const PositionDensityMatrix& rho0,
                                            const Matrix& h, double rate,
                                            double alpha, double t_end, double dt) {
    return integrate_master(rho0, h, [&](double s) {
        return qmsl_suppression(rate, alpha, s);
    }, t_end, dt);
}

// A dt satisfying the max|rhs| * dt <= 1e-3 step rule at the initial state.
inline double suggested_rk4_dt(const PositionDensityMatrix& rho0, const Matrix& h,
                               double rate, double alpha) {
    double r = qmsl_rhs(rho0, h, rate, alpha).cwiseAbs().maxCoeff();
    return 1e-3 / std::max(r, 1e-12);
}

// Halving-step convergence probe: max entrywise |sol(dt) - sol(dt/2)| and
// |sol(dt/2) - sol(dt/4)|; their ratio is ~16 for a clean 4th-order run.
template <class Kernel>
std::pair<double, double> halving_check(const PositionDensityMatrix& rho0,
                                        const Matrix& h, Kernel&& f, double t_end,
                                        double dt) {
    Matrix a = integrate_master(rho0, h, f, t_end, dt).rho();
    Matrix b = integrate_master(rho0, h, f, t_end, dt / 2.0).rho();
    Matrix c = integrate_master(rho0, h, f, t_end, dt / 4.0).rho();
    return {(a - b).cwiseAbs().maxCoeff(), (b - c).cwiseAbs().maxCoeff()};
}

// ---------- ensemble vs master equation ----------

inline int thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ENTROPIC_TIME_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    return static_cast<int>(hw);
}

struct EnsembleReport {
    Matrix mc_density;       // mean of |psi><psi| over trajectories
    Matrix master_density;   // RK4 solution of the hitting master equation
    double max_deviation = 0.0;      // max entrywise |difference| * dx
    double statistical_scale = 0.0;  // 1 / sqrt(n_traj)
};

// Averages n_traj hitting trajectories and integrates the master equation
// from the same initial state. A hit multiplies psi by a Gaussian of width
// parameter alpha/4 in the exponent; averaging the resulting channel over
// centers suppresses rho(x,x') by exp(-alpha (x-x')^2 / 8), which is the
// master-equation bracket evaluated at half the hit alpha. The comparison
// therefore integrates with alpha/2, keeping both pinned formulas intact.
inline EnsembleReport ensemble_vs_master(const GridWavefunction& psi0,
                                         const HittingParams& params,
                                         const Matrix& h, double t_end,
                                         int n_traj, double rk4_dt) {
    if (n_traj < 1000)
        throw std::invalid_argument("ensemble_vs_master: need n_traj >= 1000");
    params.validate();
    require_normalized(psi0, "ensemble_vs_master");

    std::vector<Vector> finals(n_traj);
    int workers = std::min(thread_cap(), n_traj);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1)) {
            rng::Engine engine(rng::derive_seed(params.seed, static_cast<std::uint64_t>(i)));
            finals[i] = run_trajectory(psi0, params, h, t_end, engine).final_state.values;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }

    // Index-ordered reduction: the sum is independent of the worker count.
    Matrix mc = Matrix::Zero(psi0.n_points, psi0.n_points);
    for (int i = 0; i < n_traj; ++i) mc += finals[i] * finals[i].adjoint();
    mc /= static_cast<double>(n_traj);

    Matrix master = integrate_qmsl(density_from_wavefunction(psi0), h, params.rate,
                                   params.alpha / 2.0, t_end, rk4_dt).rho();
    double dev = (mc - master).cwiseAbs().maxCoeff() * psi0.dx;
    return {std::move(mc), std::move(master), dev,
            1.0 / std::sqrt(static_cast<double>(n_traj))};
}

}  // namespace grw
}  // namespace entime
