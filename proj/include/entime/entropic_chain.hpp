#pragma once

// Information-gain bookkeeping: collapse epochs on a bipartite system,
// multipartite entropy/information chains, and the fact-set partial order.

#include "entime/dem.hpp"
#include "entime/linalg.hpp"
#include "entime/quantum_state.hpp"
#include "entime/relstate.hpp"
#include "entime/rng.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace entime {
namespace chain {

// Decoherence is asymptotic; an epoch is declared once the max off-diagonal
// Gram modulus falls below this (configurable per call).
inline constexpr double default_ortho_tol = 1e-3;

enum class CollapseMode { subjective, objective };

struct Epoch {
    int index = 0;                       // n, ordering label of entropic time
    int outcome = 0;                     // sampled subsystem index
    double probability = 0.0;            // conditional probability of the outcome
    double cumulative_information = 0.0; // I(t_n) in nats
    double parametric_time = 0.0;        // t_n
    double timescale = 0.0;              // decoherence tau, metadata only
};

struct EpochRun {
    std::vector<Epoch> epochs;
    qs::PureState final_state;  // objective: branch product; subjective: retained vector
};

namespace detail {

// Interaction-picture DEM phases act diagonally on any (entangled) vector.
inline void advance(Vector& psi, const dem::DemSystem& sys, double dt) {
    for (int i = 0; i < sys.n_sys(); ++i)
        for (int j = 0; j < sys.n_env(); ++j)
            psi[i * sys.n_env() + j] *= std::exp(Complex(0.0, -sys.omega[i][j] * dt));
}

inline void apply_refresh(Vector& psi, const Matrix& v, int ne) {
    Vector out = Vector::Zero(psi.size());
    for (int ip = 0; ip < v.rows(); ++ip)
        for (int i = 0; i < v.cols(); ++i)
            out.segment(ip * ne, ne) += v(ip, i) * psi.segment(i * ne, ne);
    psi = out;
}

// Born weights of the subsystem blocks.
inline std::vector<double> branch_weights(const Vector& psi, int ns, int ne) {
    std::vector<double> p(ns);
    for (int i = 0; i < ns; ++i)
        p[i] = psi.segment(i * ne, ne).squaredNorm();
    return p;
}

inline void check_decohered(const Vector& psi, int ns, int ne, double ortho_tol,
                            double t) {
    qs::PureState s(psi, la::CompositeIndex({ns, ne}));
    double offdiag = rel::gram(rel::decompose(s, 1)).max_offdiagonal_abs();
    if (offdiag > ortho_tol)
        throw std::runtime_error("run_epochs: NotDecohered (max off-diagonal |g| = "
            + std::to_string(offdiag) + " at t = " + std::to_string(t) + ")");
}

// Project onto subsystem outcome k and renormalize.
inline Vector condition_on(const Vector& psi, int k, int ne) {
    Vector out = Vector::Zero(psi.size());
    double w = psi.segment(k * ne, ne).norm();
    out.segment(k * ne, ne) = psi.segment(k * ne, ne) / w;
    return out;
}

}  // namespace detail

// Runs a chain of collapse epochs. Between epochs the diagonal interaction
// evolves the state; an optional subsystem rotation is applied at the start
// of each segment (a stand-in for H_S re-mixing the pointer basis, without
// which every epoch after the first would repeat the same outcome). At each
// epoch time the branch state must be decohered, an outcome is sampled from
// the Born weights by inverse CDF in index order, and I accumulates
// -ln(conditional probability). Objective mode carries the projected branch
// forward as the state; subjective mode also keeps the fully unitary vector
// and returns it as the final state.
inline EpochRun run_epochs(const dem::DemSystem& sys,
                           const std::vector<double>& epoch_times,
                           CollapseMode mode, std::uint64_t seed,
                           double ortho_tol = default_ortho_tol,
                           const std::optional<Matrix>& refresh = std::nullopt,
                           double timescale = 0.0) {
    sys.validate();
    if (epoch_times.empty())
        throw std::invalid_argument("run_epochs: no epoch times");
    double prev = 0.0;
    for (double t : epoch_times) {
        if (t <= prev)
            throw std::invalid_argument("run_epochs: epoch times must be strictly increasing");
        prev = t;
    }
    const int ns = sys.n_sys(), ne = sys.n_env();
    if (refresh) {
        if (refresh->rows() != ns || refresh->cols() != ns)
            throw std::invalid_argument("run_epochs: refresh dimension mismatch");
        if ((refresh->adjoint() * (*refresh) - Matrix::Identity(ns, ns))
                .cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("run_epochs: refresh not unitary");
    }

    Vector branch(ns * ne);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ne; ++j)
            branch[i * ne + j] = sys.a[i] * sys.b[j];
    Vector retained = branch;

    rng::Engine engine(seed);
    EpochRun run{{}, qs::PureState(branch, la::CompositeIndex({ns, ne}))};
    double info = 0.0;
    double t_prev = 0.0;
    for (std::size_t n = 0; n < epoch_times.size(); ++n) {
        double dt = epoch_times[n] - t_prev;
        if (refresh) {
            detail::apply_refresh(branch, *refresh, ne);
            detail::apply_refresh(retained, *refresh, ne);
        }
        detail::advance(branch, sys, dt);
        detail::advance(retained, sys, dt);
        detail::check_decohered(branch, ns, ne, ortho_tol, epoch_times[n]);

        std::vector<double> p = detail::branch_weights(branch, ns, ne);
        int outcome = rng::discrete(engine, p);
        info -= std::log(p[outcome]);
        run.epochs.push_back({static_cast<int>(n), outcome, p[outcome], info,
                              epoch_times[n], timescale});
        branch = detail::condition_on(branch, outcome, ne);
        t_prev = epoch_times[n];
    }
    const Vector& fin = (mode == CollapseMode::objective) ? branch : retained;
    run.final_state = qs::PureState(fin, la::CompositeIndex({ns, ne}));
    return run;
}

// Exact Born joint distribution over outcome sequences, from the same
// unitary dynamics run_epochs samples: the probability of a sequence is the
// product of its conditional branch weights, i.e. the squared norm of the
// projected path vector. Sequences are listed lexicographically.
inline std::vector<std::pair<std::vector<int>, double>>
joint_distribution(const dem::DemSystem& sys, const std::vector<double>& epoch_times,
                   double ortho_tol = default_ortho_tol,
                   const std::optional<Matrix>& refresh = std::nullopt) {
    sys.validate();
    const int ns = sys.n_sys(), ne = sys.n_env();
    std::vector<std::pair<std::vector<int>, double>> out;
    std::vector<int> path;

    std::function<void(Vector, double, double, std::size_t)> walk =
        [&](Vector branch, double weight, double t_prev, std::size_t n) {
            if (n == epoch_times.size()) {
                out.emplace_back(path, weight);
                return;
            }
            if (refresh) detail::apply_refresh(branch, *refresh, ne);
            detail::advance(branch, sys, epoch_times[n] - t_prev);
            detail::check_decohered(branch, ns, ne, ortho_tol, epoch_times[n]);
            std::vector<double> p = detail::branch_weights(branch, ns, ne);
            for (int k = 0; k < ns; ++k) {
                if (p[k] <= 0.0) continue;
                path.push_back(k);
                walk(detail::condition_on(branch, k, ne), weight * p[k],
                     epoch_times[n], n + 1);
                path.pop_back();
            }
        };

    Vector start(ns * ne);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ne; ++j)
            start[i * ne + j] = sys.a[i] * sys.b[j];
    walk(std::move(start), 1.0, 0.0, 0);
    return out;
}

// ---------- multipartite chains ----------

// Amplitude tensor over M subsystem indices plus one environment index
// (environment last, slowest index first).
class MultipartiteState {
public:
    MultipartiteState(Vector amplitudes, la::CompositeIndex space)
        : space_(std::move(space)) {
        if (space_.factors() < 2)
            throw std::invalid_argument("MultipartiteState: need subsystems plus environment");
        if (amplitudes.size() != space_.flat_dim())
            throw std::invalid_argument("MultipartiteState: amplitude/space mismatch");
        double n = amplitudes.norm();
        if (std::abs(n - 1.0) > 1e-10) {
            if (n < 1e-6)
                throw std::invalid_argument("MultipartiteState: norm below 1e-6");
            amplitudes /= n;
        }
        amplitudes_ = std::move(amplitudes);
    }

    int subsystems() const { return space_.factors() - 1; }
    const la::CompositeIndex& space() const { return space_; }
    const Vector& amplitudes() const { return amplitudes_; }

private:
    Vector amplitudes_;
    la::CompositeIndex space_;
};

struct Fact {
    int subsystem = 0;  // 0-based subsystem id
    int outcome = 0;
};

class FactSet {
public:
    FactSet() = default;
    explicit FactSet(std::vector<Fact> facts) : facts_(std::move(facts)) {
        for (std::size_t a = 0; a < facts_.size(); ++a)
            for (std::size_t b = a + 1; b < facts_.size(); ++b)
                if (facts_[a].subsystem == facts_[b].subsystem)
                    throw std::invalid_argument("FactSet: two facts share a subsystem");
    }

    const std::vector<Fact>& facts() const { return facts_; }

    bool subset_of(const FactSet& other) const {
        for (const Fact& f : facts_) {
            bool found = false;
            for (const Fact& g : other.facts_)
                if (g.subsystem == f.subsystem && g.outcome == f.outcome) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    }

private:
    std::vector<Fact> facts_;
};

// Joint probability of an arbitrary set of (subsystem, outcome) facts; all
// unfixed subsystem indices and the environment are summed out.
inline double joint_probability(const MultipartiteState& m, const FactSet& facts) {
    const la::CompositeIndex& space = m.space();
    for (const Fact& f : facts.facts()) {
        if (f.subsystem < 0 || f.subsystem >= m.subsystems())
            throw std::invalid_argument("joint_probability: BadAssignment (subsystem id)");
        if (f.outcome < 0 || f.outcome >= space.dim(f.subsystem))
            throw std::invalid_argument("joint_probability: BadAssignment (outcome)");
    }
    double p = 0.0;
    for (int k = 0; k < space.flat_dim(); ++k) {
        std::vector<int> idx = space.unflatten(k);
        bool match = true;
        for (const Fact& f : facts.facts())
            if (idx[f.subsystem] != f.outcome) { match = false; break; }
        if (match) p += std::norm(m.amplitudes()[k]);
    }
    return p;
}

// Marginal over the first k subsystems at the given outcomes.
inline double marginal_probability(const MultipartiteState& m,
                                   const std::vector<int>& fixed_prefix) {
    if (static_cast<int>(fixed_prefix.size()) > m.subsystems())
        throw std::invalid_argument("marginal_probability: BadAssignment (too many indices)");
    if (fixed_prefix.empty()) return 1.0;
    std::vector<Fact> facts;
    for (std::size_t k = 0; k < fixed_prefix.size(); ++k)
        facts.push_back({static_cast<int>(k), fixed_prefix[k]});
    return joint_probability(m, FactSet(std::move(facts)));
}

// S_{1..k} for k = 1..M: entropy of the marginal distribution over the
// first k subsystems. Each step adds the conditional entropy of subsystem
// k+1 given the first k, hence the chain never decreases.
inline std::vector<double> entropy_chain(const MultipartiteState& m) {
    std::vector<double> out;
    std::vector<int> idx;
    for (int k = 1; k <= m.subsystems(); ++k) {
        idx.assign(k, 0);
        double s = 0.0;
        while (true) {
            double p = marginal_probability(m, idx);
            if (p > 0.0) s -= p * std::log(p);
            int m2 = k - 1;
            while (m2 >= 0 && ++idx[m2] == m.space().dim(m2)) idx[m2--] = 0;
            if (m2 < 0) break;
        }
        out.push_back(s);
    }
    return out;
}

inline double information_of(const FactSet& f, const MultipartiteState& m) {
    if (f.facts().empty()) return 0.0;
    double p = joint_probability(m, f);
    if (p <= 0.0)
        throw std::invalid_argument("information_of: ZeroProbabilityFact");
    return -std::log(p);
}

// ---------- fact-set partial order ----------

enum class Relation { subset, superset, equal, incomparable };

struct PosetReport {
    struct PairOrder {
        int a = 0, b = 0;
        Relation relation = Relation::incomparable;
    };
    std::vector<PairOrder> pairs;
    bool information_monotone = true;  // I(subset) <= I(superset) on every edge
};

// Pairwise containment report. Set inclusion already enforces the rule that
// two different outcomes for the same subsystem are incomparable.
inline PosetReport poset_check(const std::vector<FactSet>& sets,
                               const MultipartiteState& m) {
    PosetReport report;
    std::vector<double> info;
    for (const FactSet& f : sets) info.push_back(information_of(f, m));
    for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            bool ab = sets[a].subset_of(sets[b]);
            bool ba = sets[b].subset_of(sets[a]);
            Relation r = ab && ba ? Relation::equal
                       : ab      ? Relation::subset
                       : ba      ? Relation::superset
                                 : Relation::incomparable;
            report.pairs.push_back({static_cast<int>(a), static_cast<int>(b), r});
            if (r == Relation::subset && info[a] > info[b] + 1e-12)
                report.information_monotone = false;
            if (r == Relation::superset && info[b] > info[a] + 1e-12)
                report.information_monotone = false;
        }
    }
    return report;
}

}  // namespace chain
}  // namespace entime
