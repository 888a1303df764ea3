#include <catch2/catch_amalgamated.hpp>

#include "entime/entropic_chain.hpp"

#include <cmath>

using namespace entime;

namespace {

// Two equal branches over a flat 64-line band; decohered at multiples of
// the band timescale, where the discrete Gram sum crosses zero.
dem::DemSystem band_system(double w0 = 0.5) {
    std::vector<Complex> a = {Complex(std::sqrt(w0), 0.0), Complex(std::sqrt(1.0 - w0), 0.0)};
    return dem::dem_from_profile(a, dem::SpectralProfile::step(8.0), 64);
}

double band_tau() { return dem::SpectralProfile::step(8.0).timescale(); }

// Rotation sending (cos 15deg, sin 15deg) to equal weights; its columns
// carry weights (1/4, 3/4), which makes the two-epoch information ln 8.
Matrix tilted_refresh() {
    Matrix v(2, 2);
    v << 0.5, std::sqrt(3.0) / 2.0, std::sqrt(3.0) / 2.0, -0.5;
    return v;
}

dem::DemSystem tilted_system() {
    double theta = 15.0 * M_PI / 180.0;
    return dem::dem_from_profile({Complex(std::cos(theta), 0.0), Complex(std::sin(theta), 0.0)},
                                 dem::SpectralProfile::step(8.0), 64);
}

}  // namespace

TEST_CASE("a single equal-weight epoch gains ln 2", "[entropic_chain]") {
    chain::EpochRun run = chain::run_epochs(band_system(), {band_tau()},
                                            chain::CollapseMode::subjective, 3,
                                            chain::default_ortho_tol, std::nullopt,
                                            band_tau());
    REQUIRE(run.epochs.size() == 1);
    const chain::Epoch& e = run.epochs[0];
    REQUIRE((e.outcome == 0 || e.outcome == 1));
    REQUIRE(e.probability == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(e.cumulative_information == Catch::Approx(std::log(2.0)).margin(1e-12));
    REQUIRE(e.parametric_time == Catch::Approx(band_tau()));
    REQUIRE(e.timescale == Catch::Approx(band_tau()));
}

TEST_CASE("without re-mixing, later epochs are certain and add nothing", "[entropic_chain]") {
    double tau = band_tau();
    chain::EpochRun run = chain::run_epochs(band_system(0.3), {tau, 2.0 * tau},
                                            chain::CollapseMode::objective, 11);
    REQUIRE(run.epochs.size() == 2);
    REQUIRE(run.epochs[1].outcome == run.epochs[0].outcome);
    REQUIRE(run.epochs[1].probability == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(run.epochs[1].cumulative_information
            == Catch::Approx(run.epochs[0].cumulative_information).margin(1e-12));

    // Objective mode hands back the conditioned branch product.
    const Vector& fin = run.final_state.vector();
    int k = run.epochs[1].outcome;
    REQUIRE(fin.segment(k * 64, 64).norm() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(fin.segment((1 - k) * 64, 64).norm() <= 1e-9);
}

TEST_CASE("a tilted refresh makes the two-epoch chain worth ln 8", "[entropic_chain]") {
    double tau = band_tau();
    std::vector<double> times = {tau, 2.0 * tau};
    bool found = false;
    for (std::uint64_t seed = 0; seed < 100 && !found; ++seed) {
        chain::EpochRun run = chain::run_epochs(tilted_system(), times,
                                                chain::CollapseMode::subjective, seed,
                                                chain::default_ortho_tol, tilted_refresh());
        if (run.epochs[0].outcome != 0 || run.epochs[1].outcome != 0) continue;
        found = true;
        REQUIRE(run.epochs[0].probability == Catch::Approx(0.5).margin(1e-9));
        REQUIRE(run.epochs[1].probability == Catch::Approx(0.25).margin(1e-9));
        REQUIRE(run.epochs[1].cumulative_information
                == Catch::Approx(std::log(8.0)).margin(1e-9));

        // Subjective mode keeps the unitary vector: both branches survive.
        const Vector& fin = run.final_state.vector();
        REQUIRE(fin.segment(0, 64).squaredNorm() == Catch::Approx(0.5).margin(0.05));
        REQUIRE(fin.segment(64, 64).squaredNorm() == Catch::Approx(0.5).margin(0.05));
    }
    REQUIRE(found);  // outcome (0, 0) has probability 1/8 per seed
}

TEST_CASE("epochs refuse to fire before decoherence", "[entropic_chain]") {
    REQUIRE_THROWS_AS(chain::run_epochs(band_system(), {band_tau() / 10.0},
                                        chain::CollapseMode::subjective, 1),
                      std::runtime_error);
}

TEST_CASE("run_epochs validates its schedule and refresh", "[entropic_chain]") {
    dem::DemSystem sys = band_system();
    REQUIRE_THROWS_AS(chain::run_epochs(sys, {}, chain::CollapseMode::subjective, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(chain::run_epochs(sys, {band_tau(), band_tau()},
                                        chain::CollapseMode::subjective, 1),
                      std::invalid_argument);

    Matrix not_unitary = Matrix::Constant(2, 2, Complex(0.5, 0.0));
    REQUIRE_THROWS_AS(chain::run_epochs(sys, {band_tau()}, chain::CollapseMode::subjective,
                                        1, chain::default_ortho_tol, not_unitary),
                      std::invalid_argument);
    Matrix wrong_dim = Matrix::Identity(3, 3);
    REQUIRE_THROWS_AS(chain::run_epochs(sys, {band_tau()}, chain::CollapseMode::subjective,
                                        1, chain::default_ortho_tol, wrong_dim),
                      std::invalid_argument);
}

TEST_CASE("the exact joint distribution matches the sampled chain", "[entropic_chain]") {
    double tau = band_tau();
    std::vector<double> times = {tau, 2.0 * tau};
    auto joint = chain::joint_distribution(tilted_system(), times,
                                           chain::default_ortho_tol, tilted_refresh());

    REQUIRE(joint.size() == 4);
    double total = 0.0;
    for (const auto& [path, p] : joint) total += p;
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));

    // Lexicographic sequence order with path weights 1/8, 3/8, 3/8, 1/8.
    REQUIRE(joint[0].first == std::vector<int>{0, 0});
    REQUIRE(joint[0].second == Catch::Approx(0.125).margin(1e-9));
    REQUIRE(joint[1].first == std::vector<int>{0, 1});
    REQUIRE(joint[1].second == Catch::Approx(0.375).margin(1e-9));
    REQUIRE(joint[2].second == Catch::Approx(0.375).margin(1e-9));
    REQUIRE(joint[3].second == Catch::Approx(0.125).margin(1e-9));

    // A sampled run's cumulative information is -ln of its path weight.
    chain::EpochRun run = chain::run_epochs(tilted_system(), times,
                                            chain::CollapseMode::subjective, 17,
                                            chain::default_ortho_tol, tilted_refresh());
    std::vector<int> path = {run.epochs[0].outcome, run.epochs[1].outcome};
    for (const auto& [seq, p] : joint)
        if (seq == path)
            REQUIRE(std::exp(-run.epochs[1].cumulative_information)
                    == Catch::Approx(p).margin(1e-12));
}

TEST_CASE("marginal probabilities sum and nest correctly", "[entropic_chain]") {
    rng::Engine g(13);
    chain::MultipartiteState m(rng::random_unit_vector(g, 16),
                               la::CompositeIndex({2, 2, 4}));
    REQUIRE(chain::marginal_probability(m, {}) == 1.0);
    REQUIRE(chain::marginal_probability(m, {0}) + chain::marginal_probability(m, {1})
            == Catch::Approx(1.0).margin(1e-12));
    for (int i = 0; i < 2; ++i) {
        double nested = chain::marginal_probability(m, {i, 0})
                      + chain::marginal_probability(m, {i, 1});
        REQUIRE(nested == Catch::Approx(chain::marginal_probability(m, {i})).margin(1e-12));
    }
    REQUIRE_THROWS_AS(chain::marginal_probability(m, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("entropy chains match hand-computed marginals", "[entropic_chain]") {
    // Two subsystems, trivial environment, weights 0.1/0.2/0.3/0.4.
    Vector v(4);
    v << std::sqrt(0.1), std::sqrt(0.2), std::sqrt(0.3), std::sqrt(0.4);
    chain::MultipartiteState m(v, la::CompositeIndex({2, 2, 1}));
    std::vector<double> s = chain::entropy_chain(m);
    REQUIRE(s.size() == 2);
    double s1 = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7));
    double s12 = -(0.1 * std::log(0.1) + 0.2 * std::log(0.2)
                 + 0.3 * std::log(0.3) + 0.4 * std::log(0.4));
    REQUIRE(s[0] == Catch::Approx(s1).margin(1e-12));
    REQUIRE(s[1] == Catch::Approx(s12).margin(1e-12));

    // Uniform three-qubit state: each step adds exactly ln 2.
    chain::MultipartiteState uniform(Vector::Constant(8, Complex(1.0, 0.0)),
                                     la::CompositeIndex({2, 2, 2, 1}));
    std::vector<double> su = chain::entropy_chain(uniform);
    for (int k = 0; k < 3; ++k)
        REQUIRE(su[k] == Catch::Approx((k + 1) * std::log(2.0)).margin(1e-12));

    // Correlated branches: after the first ln 2 the chain goes flat.
    Vector ghz = Vector::Zero(8);
    ghz[0] = 1.0;
    ghz[7] = 1.0;
    std::vector<double> sg =
        chain::entropy_chain(chain::MultipartiteState(ghz, la::CompositeIndex({2, 2, 2, 1})));
    for (double sk : sg) REQUIRE(sk == Catch::Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("information of fact sets follows -ln p", "[entropic_chain]") {
    chain::MultipartiteState uniform(Vector::Constant(8, Complex(1.0, 0.0)),
                                     la::CompositeIndex({2, 2, 2, 1}));
    REQUIRE(chain::information_of(chain::FactSet(), uniform) == 0.0);
    chain::FactSet one({{0, 0}});
    REQUIRE(chain::information_of(one, uniform) == Catch::Approx(std::log(2.0)).margin(1e-12));
    chain::FactSet two({{0, 0}, {2, 1}});
    REQUIRE(chain::information_of(two, uniform)
            == Catch::Approx(2.0 * std::log(2.0)).margin(1e-12));
    REQUIRE(chain::information_of(two, uniform) >= chain::information_of(one, uniform));

    Vector ghz = Vector::Zero(8);
    ghz[0] = 1.0;
    ghz[7] = 1.0;
    chain::MultipartiteState g(ghz, la::CompositeIndex({2, 2, 2, 1}));
    chain::FactSet impossible({{0, 0}, {1, 1}});
    REQUIRE_THROWS_AS(chain::information_of(impossible, g), std::invalid_argument);

    REQUIRE_THROWS_AS(chain::FactSet({{0, 0}, {0, 1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(chain::joint_probability(uniform, chain::FactSet({{5, 0}})),
                      std::invalid_argument);
}

TEST_CASE("fact-set containment orders information gain", "[entropic_chain]") {
    chain::MultipartiteState uniform(Vector::Constant(8, Complex(1.0, 0.0)),
                                     la::CompositeIndex({2, 2, 2, 1}));
    std::vector<chain::FactSet> sets = {
        chain::FactSet({{0, 0}}),           // 0
        chain::FactSet({{0, 0}, {1, 1}}),   // 1: superset of 0
        chain::FactSet({{0, 1}}),           // 2: same subsystem, other outcome
        chain::FactSet({{0, 0}}),           // 3: equal to 0
    };
    chain::PosetReport report = chain::poset_check(sets, uniform);
    REQUIRE(report.pairs.size() == 6);

    auto relation = [&](int a, int b) {
        for (const auto& pr : report.pairs)
            if (pr.a == a && pr.b == b) return pr.relation;
        throw std::logic_error("pair not found");
    };
    REQUIRE(relation(0, 1) == chain::Relation::subset);
    REQUIRE(relation(0, 2) == chain::Relation::incomparable);
    REQUIRE(relation(0, 3) == chain::Relation::equal);
    REQUIRE(relation(1, 2) == chain::Relation::incomparable);
    REQUIRE(report.information_monotone);
}
