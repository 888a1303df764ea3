#pragma once

// The scenario runner behind the CLI: each scenario builds one deterministic
// CSV (plus optional SVG) from a validated config and returns a manifest of
// checksummed outputs.

#include "entime/classical_thermo.hpp"
#include "entime/dem.hpp"
#include "entime/energetics.hpp"
#include "entime/entropic_chain.hpp"
#include "entime/grw.hpp"
#include "entime/io.hpp"
#include "entime/linalg.hpp"
#include "entime/quantum_state.hpp"
#include "entime/relstate.hpp"
#include "entime/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

namespace entime {
namespace scn {

inline constexpr char artifact_version[] = "0.1.0";

struct RunManifest {
    std::string scenario;
    std::uint64_t config_checksum = 0;
    std::string wall_clock_utc;
    std::vector<std::pair<std::string, std::uint64_t>> files;  // (name, fnv64)
    std::vector<std::string> notes;

    std::string text() const {
        std::string out;
        out += "artifact_version = " + std::string(artifact_version) + "\n";
        out += "scenario = " + scenario + "\n";
        out += "config_checksum = " + io::hex64(config_checksum) + "\n";
        out += "wall_clock_utc = " + wall_clock_utc + "\n";
        for (const auto& [name, sum] : files)
            out += "file " + name + " = " + io::hex64(sum) + "\n";
        for (const std::string& n : notes) out += "note " + n + "\n";
        return out;
    }
};

namespace detail {

struct Column {
    std::string name;
    bool integer = false;
};

// Rows are kept numeric so the same data can feed the CSV writer and the
// plotter; integer columns only change the printed form.
class Table {
public:
    explicit Table(std::vector<Column> cols) : cols_(std::move(cols)) {}

    void add(std::vector<double> row) {
        if (row.size() != cols_.size())
            throw std::logic_error("Table: row width mismatch");
        rows_.push_back(std::move(row));
    }

    io::CsvWriter to_csv(std::uint64_t config_checksum) const {
        std::vector<std::string> names;
        for (const Column& c : cols_) names.push_back(c.name);
        io::CsvWriter csv(names, config_checksum);
        for (const auto& r : rows_) {
            io::CsvWriter::Row out = csv.row();
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (cols_[i].integer)
                    out << static_cast<long>(std::llround(r[i]));
                else
                    out << r[i];
            }
        }
        return csv;
    }

    std::string to_svg(const std::string& title) const {
        std::vector<std::string> names;
        for (const Column& c : cols_) names.push_back(c.name);
        return io::svg_line_plot(title, names, rows_);
    }

private:
    std::vector<Column> cols_;
    std::vector<std::vector<double>> rows_;
};

inline std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

inline int required_int(long v, long lo, const char* what) {
    if (v < lo)
        throw std::invalid_argument(std::string("scenario: ") + what + " too small");
    return static_cast<int>(v);
}

// Equal-or-weighted two-level superposition over a discretized profile.
inline dem::DemSystem two_level_system(double weight0, const dem::SpectralProfile& p,
                                       int j_levels, double scale = 1.0) {
    if (!(weight0 > 0.0) || !(weight0 < 1.0))
        throw std::invalid_argument("scenario: weight0 = " + std::to_string(weight0)
                                    + " must lie strictly between 0 and 1");
    std::vector<Complex> a = {std::sqrt(weight0), std::sqrt(1.0 - weight0)};
    return dem::dem_from_profile(std::move(a), p, j_levels, scale);
}

// Shared curve for the dem-* scenarios: the branch coherence g_10 (whose
// step/thermal envelopes are the documented closed forms) plus both reduced
// entropies. The environment entropy comes from the branch overlap matrix,
// whose nonzero spectrum equals that of rho_E because rho_E has rank <= N_S.
inline void dem_curve(Table& table, const dem::DemSystem& sys, double t_max,
                      int samples) {
    for (int k = 0; k <= samples; ++k) {
        double t = t_max * k / samples;
        Complex g = dem::gram_closed_form(sys, 1, 0, t);
        Matrix rho_s(2, 2);
        rho_s(0, 0) = std::norm(sys.a[0]);
        rho_s(1, 1) = std::norm(sys.a[1]);
        rho_s(0, 1) = sys.a[0] * std::conj(sys.a[1]) * g;
        rho_s(1, 0) = std::conj(rho_s(0, 1));
        double s_sys = qs::von_neumann_entropy(qs::DensityMatrix(rho_s));
        double s_env = qs::von_neumann_entropy(qs::DensityMatrix(rho_s.transpose()));
        table.add({t, g.real(), g.imag(), std::abs(g), s_sys, s_env});
    }
}

inline const std::vector<Column>& dem_columns() {
    static const std::vector<Column> cols = {{"t"},       {"re_g"},  {"im_g"},
                                             {"abs_g"},   {"S_sys"}, {"S_env"}};
    return cols;
}

inline int nearest_grid_index(const grw::GridWavefunction& psi, double x) {
    int k = static_cast<int>(std::lround((x - psi.x_min) / psi.dx));
    return std::clamp(k, 0, psi.n_points - 1);
}

// Symmetric two-packet superposition, the standard coherence test state.
inline grw::GridWavefunction cat_state(double x_min, double x_max, int n,
                                       double x0, double sigma) {
    grw::GridWavefunction psi(x_min, x_max, Vector::Zero(n));
    for (int k = 0; k < n; ++k) {
        double xl = psi.x(k) + x0, xr = psi.x(k) - x0;
        psi.values[k] = std::exp(-xl * xl / (4.0 * sigma * sigma))
                      + std::exp(-xr * xr / (4.0 * sigma * sigma));
    }
    return psi.normalized();
}

}  // namespace detail

// ---------- scenario bodies ----------

namespace detail {

inline Table scenario_dem_step(const io::ScenarioConfig& cfg) {
    dem::SpectralProfile p = dem::SpectralProfile::step(cfg.real("bandwidth", 4.0),
                                                        cfg.real("center", 0.0));
    int n_env = required_int(cfg.integer("n_env", 256), 2, "n_env");
    dem::DemSystem sys = two_level_system(cfg.real("weight0", 0.5), p, n_env);
    int samples = required_int(cfg.integer("samples", 400), 1, "samples");
    double t_max = cfg.real("t_max", 4.0 * p.timescale());
    Table table(dem_columns());
    dem_curve(table, sys, t_max, samples);
    return table;
}

inline Table scenario_dem_thermal(const io::ScenarioConfig& cfg) {
    dem::SpectralProfile p = dem::SpectralProfile::thermal(cfg.real("tau", 1.0));
    int n_env = required_int(cfg.integer("n_env", 1024), 2, "n_env");
    dem::DemSystem sys = two_level_system(cfg.real("weight0", 0.5), p, n_env);
    int samples = required_int(cfg.integer("samples", 400), 1, "samples");
    double t_max = cfg.real("t_max", 5.0 * p.timescale());
    Table table(dem_columns());
    dem_curve(table, sys, t_max, samples);
    return table;
}

inline Table scenario_dem_discrete(const io::ScenarioConfig& cfg, RunManifest& man) {
    std::vector<double> nu = cfg.real_list("frequencies");
    std::vector<double> w = cfg.real_list("weights");
    if (nu.size() != w.size())
        throw std::invalid_argument("scenario: " + std::to_string(nu.size())
            + " frequencies but " + std::to_string(w.size()) + " weights");
    std::vector<std::pair<double, double>> lines;
    for (std::size_t j = 0; j < nu.size(); ++j) lines.emplace_back(nu[j], w[j]);
    dem::SpectralProfile p = dem::SpectralProfile::explicit_lines(std::move(lines));
    dem::DemSystem sys = two_level_system(cfg.real("weight0", 0.5), p,
                                          static_cast<int>(nu.size()));
    double t_max = cfg.real("t_max", 0.0);
    int samples = required_int(cfg.integer("samples", 400), 2, "samples");
    Table table(dem_columns());
    dem_curve(table, sys, t_max, samples);

    dem::RecurrenceReport rec = dem::recurrence_scan(sys, t_max, samples + 1);
    if (rec.revival)
        man.notes.push_back("revival |g| > 0.99 at t = " + std::to_string(rec.revival_time));
    else
        man.notes.push_back("no revival within t_max = " + std::to_string(t_max));
    for (std::size_t i = 0; i < rec.maxima.size() && i < 3; ++i)
        man.notes.push_back("coherence maximum at t = " + std::to_string(rec.maxima[i].first)
                            + " with |g| = " + std::to_string(rec.maxima[i].second));
    return table;
}

inline Table scenario_epoch_chain(const io::ScenarioConfig& cfg) {
    dem::SpectralProfile p = dem::SpectralProfile::step(cfg.real("bandwidth", 8.0));
    int n_env = required_int(cfg.integer("n_env", 64), 2, "n_env");
    dem::DemSystem sys = two_level_system(cfg.real("weight0", 0.5), p, n_env);
    int epochs = required_int(cfg.integer("epochs", 4), 1, "epochs");
    // Default spacing is one decoherence time: the step envelope has an
    // exact zero there, so every epoch lands on a decohered state.
    double spacing = cfg.real("spacing", p.timescale());
    std::vector<double> times;
    for (int n = 1; n <= epochs; ++n) times.push_back(n * spacing);

    std::string mode_text = cfg.text_value("mode", "objective");
    if (mode_text != "objective" && mode_text != "subjective")
        throw std::invalid_argument("scenario: mode must be subjective or objective, got '"
                                    + mode_text + "'");
    chain::CollapseMode mode = mode_text == "objective" ? chain::CollapseMode::objective
                                                        : chain::CollapseMode::subjective;
    std::string remix = cfg.text_value("remix", "true");
    std::optional<Matrix> refresh;
    if (remix == "true" || remix == "1") {
        Matrix v(2, 2);
        v << 1, 1, 1, -1;
        refresh = v / std::sqrt(2.0);
    }

    chain::EpochRun run = chain::run_epochs(sys, times, mode, cfg.seed(),
                                            chain::default_ortho_tol, refresh,
                                            p.timescale());
    Table table({{"n", true}, {"t_n"}, {"outcome", true}, {"p_cond"}, {"I_nats"}});
    for (const chain::Epoch& e : run.epochs)
        table.add({static_cast<double>(e.index), e.parametric_time,
                   static_cast<double>(e.outcome), e.probability,
                   e.cumulative_information});
    return table;
}

inline Table scenario_multipartite_chain(const io::ScenarioConfig& cfg) {
    std::vector<int> dims;
    if (cfg.has("dims")) {
        for (double d : cfg.real_list("dims")) {
            if (d < 2.0 || d != std::floor(d))
                throw std::invalid_argument("scenario: dims must be integers >= 2");
            dims.push_back(static_cast<int>(d));
        }
    } else {
        dims = {2, 3, 2, 8};
    }
    if (dims.size() < 2)
        throw std::invalid_argument("scenario: dims needs subsystems plus environment");

    rng::Engine engine(cfg.seed());
    int total = 1;
    for (int d : dims) total *= d;
    chain::MultipartiteState m(rng::random_unit_vector(engine, total),
                               la::CompositeIndex(dims));
    std::vector<double> s_chain = chain::entropy_chain(m);

    // One Born-sampled outcome tuple, drawn subsystem by subsystem so the
    // information column follows a single consistent history.
    std::vector<int> prefix;
    Table table({{"k", true}, {"S_chain"}, {"I_chain"}});
    for (int k = 0; k < m.subsystems(); ++k) {
        std::vector<double> weights;
        for (int o = 0; o < dims[k]; ++o) {
            prefix.push_back(o);
            weights.push_back(chain::marginal_probability(m, prefix));
            prefix.pop_back();
        }
        prefix.push_back(rng::discrete(engine, weights));
        double info = -std::log(chain::marginal_probability(m, prefix));
        table.add({static_cast<double>(k + 1), s_chain[k], info});
    }
    return table;
}

inline Table scenario_grw_trajectory(const io::ScenarioConfig& cfg) {
    int n = required_int(cfg.integer("n_points", 128), 2, "n_points");
    grw::GridWavefunction psi0 = grw::GridWavefunction::gaussian(
        cfg.real("x_min", -10.0), cfg.real("x_max", 10.0), n,
        cfg.real("center", 0.0), cfg.real("sigma", 1.0));
    bool free_h = cfg.text_value("free_h", "true") != "false";
    Matrix h = free_h ? grw::free_particle_hamiltonian(n, psi0.dx)
                      : Matrix::Zero(n, n);
    grw::HittingParams params{cfg.real("rate", 1.0), cfg.real("alpha", 1.0), cfg.seed()};
    double t_end = cfg.real("t_end", 5.0);
    int samples = required_int(cfg.integer("samples", 200), 1, "samples");

    grw::Trajectory traj = grw::run_trajectory(psi0, params, h, t_end);
    la::HermitianEig eig = la::hermitian_eig(h);
    auto evolve = [&](const grw::GridWavefunction& from, double dt) {
        grw::GridWavefunction out = from;
        Vector phases(eig.eigenvalues.size());
        for (int i = 0; i < phases.size(); ++i)
            phases[i] = std::exp(Complex(0.0, -eig.eigenvalues[i] * dt));
        out.values = eig.eigenvectors
                     * (phases.array() * (eig.eigenvectors.adjoint() * from.values).array()).matrix();
        return out;
    };

    Table table({{"t"}, {"x_mean"}, {"x_var"}, {"n_hits_so_far", true}});
    for (int j = 0; j <= samples; ++j) {
        double t = t_end * j / samples;
        std::size_t idx = 0;
        while (idx < traj.hit_times.size() && traj.hit_times[idx] <= t) ++idx;
        const grw::GridWavefunction& base = idx == 0 ? psi0 : traj.states[idx - 1];
        double t_base = idx == 0 ? 0.0 : traj.hit_times[idx - 1];
        grw::GridWavefunction psi = evolve(base, t - t_base);
        double mean = 0.0, second = 0.0;
        for (int k = 0; k < n; ++k) {
            double w = std::norm(psi.values[k]) * psi.dx;
            mean += psi.x(k) * w;
            second += psi.x(k) * psi.x(k) * w;
        }
        table.add({t, mean, second - mean * mean, static_cast<double>(idx)});
    }
    return table;
}

// Monte-Carlo coherence decay against the master-equation curve at the
// branch-separation pair of grid points. Hits multiply the state by a
// quarter-alpha-exponent Gaussian; averaging that channel over centers gives
// the master-equation suppression at half the hit alpha, so the comparison
// integrates with alpha/2 (both pinned formulas stay verbatim).
inline Table scenario_grw_ensemble(const io::ScenarioConfig& cfg) {
    int n = required_int(cfg.integer("n_points", 64), 2, "n_points");
    double x0 = cfg.real("x0", 3.0);
    grw::GridWavefunction psi0 = cat_state(cfg.real("x_min", -8.0),
                                           cfg.real("x_max", 8.0), n, x0,
                                           cfg.real("sigma", 0.7));
    grw::HittingParams params{cfg.real("rate", 1.0), cfg.real("alpha", 1.0), cfg.seed()};
    params.validate();
    double t_end = cfg.real("t_end", 2.0);
    int samples = required_int(cfg.integer("samples", 40), 1, "samples");
    int n_traj = required_int(cfg.integer("n_traj", 2000), 1000, "n_traj");
    int ia = nearest_grid_index(psi0, -x0), ib = nearest_grid_index(psi0, x0);

    // H = 0 throughout: stochastic part only, as in the coherence analysis.
    std::vector<std::vector<Complex>> per_traj(n_traj);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1)) {
            rng::Engine engine(rng::derive_seed(params.seed, static_cast<std::uint64_t>(i)));
            grw::GridWavefunction psi = psi0;
            double next_hit = params.rate > 0.0
                                  ? rng::exponential(engine, params.rate)
                                  : std::numeric_limits<double>::infinity();
            std::vector<Complex> coh(samples + 1);
            for (int j = 0; j <= samples; ++j) {
                double t = t_end * j / samples;
                while (next_hit <= t) {
                    std::vector<double> centers = grw::hit_center_distribution(psi, params.alpha);
                    int idx = rng::discrete(engine, centers);
                    psi = grw::hit(psi, psi.x(idx), params.alpha).collapsed;
                    next_hit += rng::exponential(engine, params.rate);
                }
                coh[j] = psi.values[ia] * std::conj(psi.values[ib]);
            }
            per_traj[i] = std::move(coh);
        }
    };
    int workers = std::min(grw::thread_cap(), n_traj);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    std::vector<Complex> mc(samples + 1, Complex(0.0, 0.0));
    for (int i = 0; i < n_traj; ++i)  // index order, thread-count independent
        for (int j = 0; j <= samples; ++j) mc[j] += per_traj[i][j];
    for (Complex& c : mc) c /= static_cast<double>(n_traj);

    Matrix h = Matrix::Zero(n, n);
    grw::PositionDensityMatrix rho = grw::density_from_wavefunction(psi0);
    double rk4_dt = cfg.real("rk4_dt", 0.0);
    if (rk4_dt <= 0.0)
        rk4_dt = grw::suggested_rk4_dt(rho, h, params.rate, params.alpha / 2.0);

    Table table({{"t"}, {"x"}, {"xprime"}, {"abs_rho_mc"}, {"abs_rho_master"}});
    for (int j = 0; j <= samples; ++j) {
        double t = t_end * j / samples;
        table.add({t, psi0.x(ia), psi0.x(ib), std::abs(mc[j]), std::abs(rho.rho()(ia, ib))});
        if (j < samples)
            rho = grw::integrate_qmsl(rho, h, params.rate, params.alpha / 2.0,
                                      t_end / samples, rk4_dt);
    }
    return table;
}

inline Table scenario_master_eq(const io::ScenarioConfig& cfg) {
    int n = required_int(cfg.integer("n_points", 64), 2, "n_points");
    double x0 = cfg.real("x0", 3.0);
    grw::GridWavefunction psi0 = cat_state(cfg.real("x_min", -8.0),
                                           cfg.real("x_max", 8.0), n, x0,
                                           cfg.real("sigma", 0.7));
    double rate = cfg.real("rate", 1.0), alpha = cfg.real("alpha", 1.0);
    double t_end = cfg.real("t_end", 2.0);
    int samples = required_int(cfg.integer("samples", 40), 1, "samples");
    bool free_h = cfg.text_value("free_h", "false") != "false";
    Matrix h = free_h ? grw::free_particle_hamiltonian(n, psi0.dx)
                      : Matrix::Zero(n, n);
    int ia = nearest_grid_index(psi0, -x0), ib = nearest_grid_index(psi0, x0);

    grw::PositionDensityMatrix rho = grw::density_from_wavefunction(psi0);
    double rk4_dt = cfg.real("rk4_dt", 0.0);
    if (rk4_dt <= 0.0) rk4_dt = grw::suggested_rk4_dt(rho, h, rate, alpha);

    Table table({{"t"}, {"x"}, {"xprime"}, {"abs_rho"}});
    for (int j = 0; j <= samples; ++j) {
        double t = t_end * j / samples;
        table.add({t, psi0.x(ia), psi0.x(ib), std::abs(rho.rho()(ia, ib))});
        if (j < samples)
            rho = grw::integrate_qmsl(rho, h, rate, alpha, t_end / samples, rk4_dt);
    }
    return table;
}

inline Table scenario_energy_audit(const io::ScenarioConfig& cfg) {
    // A nonzero band center gives the two branches different mean interaction
    // energies, so the objective jumps are visible by default.
    dem::SpectralProfile p = dem::SpectralProfile::step(cfg.real("bandwidth", 8.0),
                                                       cfg.real("center", 2.0));
    int n_env = required_int(cfg.integer("n_env", 64), 2, "n_env");
    dem::DemSystem sys = two_level_system(cfg.real("weight0", 0.3), p, n_env,
                                          cfg.real("scale", 1.0));
    std::string mode_text = cfg.text_value("mode", "objective");
    if (mode_text != "objective" && mode_text != "subjective")
        throw std::invalid_argument("scenario: mode must be subjective or objective, got '"
                                    + mode_text + "'");
    chain::CollapseMode mode = mode_text == "objective" ? chain::CollapseMode::objective
                                                        : chain::CollapseMode::subjective;
    int samples = required_int(cfg.integer("samples", 100), 2, "samples");
    // Default window puts the collapse grid midpoint on the envelope zero at
    // one decoherence time.
    double t_max = cfg.real("t_max", 2.0 * p.timescale());
    std::vector<double> grid;
    for (int j = 0; j <= samples; ++j) grid.push_back(t_max * j / samples);

    en::ConservationAudit audit = en::conservation_audit(sys, grid, mode, cfg.seed());
    Table table({{"t"}, {"E_total"}, {"branch", true}, {"E_branch"}, {"dE"}});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (mode == chain::CollapseMode::subjective) {
            table.add({grid[j], audit.energies[j], -1.0, audit.energies[j], 0.0});
        } else {
            for (std::size_t k = 0; k < audit.branch_energies.size(); ++k)
                table.add({grid[j], audit.energies[j], static_cast<double>(k),
                           audit.branch_energies[k], audit.jumps[k]});
        }
    }
    return table;
}

inline Table scenario_bipartite_random(const io::ScenarioConfig& cfg) {
    int ds = required_int(cfg.integer("dim_s", 6), 2, "dim_s");
    int de = required_int(cfg.integer("dim_e", 12), 2, "dim_e");
    int trials = required_int(cfg.integer("trials", 50), 1, "trials");
    rng::Engine engine(cfg.seed());

    Table table({{"trial", true}, {"dim_s", true}, {"dim_e", true},
                 {"S_sys"}, {"S_env"}, {"diff"}});
    for (int trial = 0; trial < trials; ++trial) {
        qs::PureState s(rng::random_unit_vector(engine, ds * de),
                        la::CompositeIndex({ds, de}));
        qs::DensityMatrix rho = qs::density_from_pure(s);
        double s_sys = qs::von_neumann_entropy(qs::partial_trace(rho, {0}));
        double s_env = qs::von_neumann_entropy(qs::partial_trace(rho, {1}));
        table.add({static_cast<double>(trial), static_cast<double>(ds),
                   static_cast<double>(de), s_sys, s_env, std::abs(s_sys - s_env)});
    }
    return table;
}

inline Table scenario_thermo_clausius(const io::ScenarioConfig& cfg) {
    thermo::BoxSpectrum spec(required_int(cfg.integer("n_levels", 50), 1, "n_levels"),
                             cfg.real("V", 1.0));
    double temperature = cfg.real("T", 1.0);
    double dv = cfg.real("dv", 1e-4);
    int halvings = required_int(cfg.integer("halvings", 6), 1, "halvings");

    Table table({{"dV"}, {"dS"}, {"dQ_over_T"}, {"residual"}});
    for (int i = 0; i < halvings; ++i) {
        double step = dv / std::pow(2.0, i);
        thermo::ClausiusCheck c = thermo::clausius_check(spec, temperature, step);
        table.add({step, c.ds_gibbs, c.dq_over_t, c.residual});
    }
    return table;
}

inline Table scenario_gas_mixing(const io::ScenarioConfig& cfg) {
    int n = static_cast<int>(cfg.integer("N", 1));
    double temperature = cfg.real("T", 1.0);
    double dt = cfg.real("dT", 0.0);
    int samples = required_int(cfg.integer("samples", 1), 1, "samples");

    Table table({{"N", true}, {"T"}, {"dT"}, {"dS"}});
    for (int i = 0; i <= samples; ++i) {
        double dti = dt * i / samples;
        table.add({static_cast<double>(n), temperature, dti,
                   thermo::gas_mixing_entropy(n, temperature, dti)});
    }
    return table;
}

}  // namespace detail

// ---------- dispatch ----------

inline RunManifest run_scenario(const io::ScenarioConfig& cfg,
                                const std::string& out_dir, bool plot) {
    RunManifest man;
    man.scenario = cfg.scenario;
    man.config_checksum = io::fnv1a64(cfg.text);
    man.wall_clock_utc = detail::utc_now();

    detail::Table table = [&]() -> detail::Table {
        if (cfg.scenario == "dem-step") return detail::scenario_dem_step(cfg);
        if (cfg.scenario == "dem-thermal") return detail::scenario_dem_thermal(cfg);
        if (cfg.scenario == "dem-discrete") return detail::scenario_dem_discrete(cfg, man);
        if (cfg.scenario == "epoch-chain") return detail::scenario_epoch_chain(cfg);
        if (cfg.scenario == "multipartite-chain") return detail::scenario_multipartite_chain(cfg);
        if (cfg.scenario == "grw-trajectory") return detail::scenario_grw_trajectory(cfg);
        if (cfg.scenario == "grw-ensemble") return detail::scenario_grw_ensemble(cfg);
        if (cfg.scenario == "master-eq") return detail::scenario_master_eq(cfg);
        if (cfg.scenario == "energy-audit") return detail::scenario_energy_audit(cfg);
        if (cfg.scenario == "bipartite-random") return detail::scenario_bipartite_random(cfg);
        if (cfg.scenario == "thermo-clausius") return detail::scenario_thermo_clausius(cfg);
        if (cfg.scenario == "gas-mixing") return detail::scenario_gas_mixing(cfg);
        throw std::invalid_argument("run_scenario: unknown scenario '" + cfg.scenario + "'");
    }();

    std::string name = cfg.text_value("output", cfg.scenario + ".csv");
    std::string path = out_dir.empty() ? name : out_dir + "/" + name;
    io::CsvWriter csv = table.to_csv(man.config_checksum);
    csv.save(path);
    man.files.emplace_back(name, csv.checksum());

    if (plot) {
        std::string svg = table.to_svg(cfg.scenario);
        std::string svg_name = name;
        if (svg_name.size() > 4 && svg_name.substr(svg_name.size() - 4) == ".csv")
            svg_name.resize(svg_name.size() - 4);
        svg_name += ".svg";
        std::string svg_path = out_dir.empty() ? svg_name : out_dir + "/" + svg_name;
        std::ofstream out(svg_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("run_scenario: cannot open '" + svg_path + "'");
        out << svg;
        man.files.emplace_back(svg_name, io::fnv1a64(svg));
    }

    std::string man_path = path + ".manifest";
    std::ofstream mf(man_path, std::ios::binary);
    if (!mf)
        throw std::runtime_error("run_scenario: cannot open '" + man_path + "'");
    mf << man.text();
    return man;
}

}  // namespace scn
}  // namespace entime
