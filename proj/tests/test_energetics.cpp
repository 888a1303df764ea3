#include <catch2/catch_amalgamated.hpp>

#include "entime/energetics.hpp"

#include <cmath>

using namespace entime;

namespace {

Vector basis(int dim, int k) {
    Vector v = Vector::Zero(dim);
    v[k] = 1.0;
    return v;
}

// DEM over a flat 64-line band; decoheres completely at the band timescale.
dem::DemSystem audit_system(double center) {
    std::vector<Complex> a = {Complex(std::sqrt(0.3), 0.0), Complex(std::sqrt(0.7), 0.0)};
    return dem::dem_from_profile(a, dem::SpectralProfile::step(8.0, center), 64);
}

std::vector<double> uniform_grid(double t_end, int points) {
    std::vector<double> grid;
    for (int n = 0; n < points; ++n) grid.push_back(t_end * n / (points - 1));
    return grid;
}

}  // namespace

TEST_CASE("coupling blocks match full-space matrix elements", "[energetics]") {
    rng::Engine g(3);
    const int ns = 3, ne = 4;
    Matrix h_s = rng::random_hermitian(g, ns);
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(ns * ne, ns * ne);
    for (int k = 0; k < ns * ne; ++k) h_se(k, k) = rng::standard_normal(g);

    qs::PureState s(rng::random_unit_vector(g, ns * ne), la::CompositeIndex({ns, ne}));
    rel::RelativeStateDecomposition d = rel::decompose(s);
    en::CouplingBlocks b = en::coupling_elements(h_s, h_e, h_se, d);

    Matrix full_s = la::kron(h_s, Matrix::Identity(ne, ne));
    Matrix full_e = la::kron(Matrix::Identity(ns, ns), h_e);
    for (int ip = 0; ip < ns; ++ip)
        for (int i = 0; i < ns; ++i) {
            Vector l = la::kron(basis(ns, ip), d.relative_vectors[ip]);
            Vector r = la::kron(basis(ns, i), d.relative_vectors[i]);
            REQUIRE(std::abs(b.sys(ip, i) - l.dot(full_s * r)) <= 1e-10);
            REQUIRE(std::abs(b.env(ip, i) - l.dot(full_e * r)) <= 1e-10);
            REQUIRE(std::abs(b.interaction(ip, i) - l.dot(h_se * r)) <= 1e-10);
        }
}

TEST_CASE("coupling blocks vanish where structure demands", "[energetics]") {
    rng::Engine g(9);
    const int ne = 4;

    // Zero system part leaves only branch-diagonal blocks.
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(2 * ne, 2 * ne);
    qs::PureState s(rng::random_unit_vector(g, 2 * ne), la::CompositeIndex({2, ne}));
    rel::RelativeStateDecomposition d = rel::decompose(s);
    en::CouplingBlocks b = en::coupling_elements(Matrix::Zero(2, 2), h_e, h_se, d);
    REQUIRE(b.sys.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(std::abs(b.env(0, 1)) == 0.0);
    REQUIRE(std::abs(b.env(1, 0)) == 0.0);

    // Orthogonal relative states kill the system cross terms.
    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    rel::RelativeStateDecomposition db =
        rel::decompose(qs::PureState(bell, la::CompositeIndex({2, 2})));
    Matrix h_s = rng::random_hermitian(g, 2);
    en::CouplingBlocks bb =
        en::coupling_elements(h_s, Matrix::Zero(2, 2), Matrix::Zero(4, 4), db);
    REQUIRE(std::abs(bb.sys(0, 1)) <= 1e-12);
    REQUIRE(std::abs(bb.sys(1, 0)) <= 1e-12);

    Matrix coupled = Matrix::Zero(4, 4);
    coupled(0, 1) = 0.3;
    coupled(1, 0) = 0.3;
    REQUIRE_THROWS_AS(en::coupling_elements(h_s, Matrix::Zero(2, 2), coupled, db),
                      std::invalid_argument);
}

TEST_CASE("a single-branch state satisfies the energy identity exactly", "[energetics]") {
    rng::Engine g(15);
    const int ne = 5;
    Vector v = Vector::Zero(2 * ne);
    v.segment(0, ne) = rng::random_unit_vector(g, ne);
    qs::PureState s(v, la::CompositeIndex({2, ne}));

    Matrix h_s = rng::random_hermitian(g, 2);
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(2 * ne, 2 * ne);
    for (int k = 0; k < 2 * ne; ++k) h_se(k, k) = rng::standard_normal(g);

    en::EnergyDecomposition e = en::energy_decomposition(s, h_s, h_e, h_se);
    REQUIRE(e.branch_weights[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(e.branch_weights[1] <= 1e-12);
    REQUIRE(e.identity_gap <= 1e-10);
}

TEST_CASE("branch energies average to the total once decohered", "[energetics]") {
    dem::DemSystem sys = audit_system(0.0);
    double tau = dem::SpectralProfile::step(8.0).timescale();
    qs::PureState s = dem::evolve_closed_form(sys, tau);

    Matrix h_s = Matrix::Zero(2, 2);
    h_s(0, 1) = 0.3;  // off-diagonal terms are the only source of a gap
    h_s(1, 0) = 0.3;
    Matrix h_e = Matrix::Zero(64, 64);
    Matrix h_se = Matrix::Zero(128, 128);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 64; ++j)
            h_se(i * 64 + j, i * 64 + j) = sys.omega[i][j];

    en::EnergyDecomposition e = en::energy_decomposition(s, h_s, h_e, h_se);
    REQUIRE(e.gram_offdiag_max <= 1e-12);
    REQUIRE(e.identity_gap <= 1e-9);

    double mean = 0.0;
    for (std::size_t k = 0; k < e.branch_values.size(); ++k)
        mean += e.branch_weights[k] * e.branch_values[k];
    REQUIRE(std::abs(e.total - mean) <= 1e-9);
}

TEST_CASE("before decoherence the gap stays within the cross-term bound", "[energetics]") {
    dem::DemSystem sys = audit_system(0.0);
    double tau = dem::SpectralProfile::step(8.0).timescale();
    qs::PureState s = dem::evolve_closed_form(sys, tau / 10.0);

    Matrix h_s = Matrix::Zero(2, 2);
    h_s(0, 1) = 0.3;
    h_s(1, 0) = 0.3;
    Matrix h_e = Matrix::Zero(64, 64);
    Matrix h_se = Matrix::Zero(128, 128);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 64; ++j)
            h_se(i * 64 + j, i * 64 + j) = sys.omega[i][j];

    en::EnergyDecomposition e = en::energy_decomposition(s, h_s, h_e, h_se);
    REQUIRE(e.gram_offdiag_max > 0.9);
    REQUIRE(e.identity_gap > 0.01);
    double cross_bound = 2.0 * std::sqrt(0.3 * 0.7) * 0.3;
    REQUIRE(e.identity_gap <= e.gram_offdiag_max * cross_bound + 1e-9);
}

TEST_CASE("subjective audits report a constant expectation value", "[energetics]") {
    dem::DemSystem sys = audit_system(2.0);
    sys.omega_s = {0.2, -0.4};
    auto [nu, w] = dem::discretize_profile(dem::SpectralProfile::step(8.0, 2.0), 64);
    sys.omega_e = nu;

    double tau = dem::SpectralProfile::step(8.0).timescale();
    en::ConservationAudit audit = en::conservation_audit(
        sys, uniform_grid(2.0 * tau, 101), chain::CollapseMode::subjective, 1);
    REQUIRE(audit.energies.size() == 101);
    REQUIRE(audit.collapse_index == -1);

    // Independent route: weights times (bare system + mean environment + coupling).
    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
        double e_k = sys.omega_s[k];
        for (int j = 0; j < 64; ++j)
            e_k += std::norm(sys.b[j]) * (sys.omega_e[j] + sys.omega[k][j]);
        expected += std::norm(sys.a[k]) * e_k;
    }
    for (double e : audit.energies)
        REQUIRE(std::abs(e - expected) <= 1e-9);
}

TEST_CASE("a symmetric band collapses with no energy jump", "[energetics]") {
    dem::DemSystem sys = audit_system(0.0);  // band centered on zero
    double tau = dem::SpectralProfile::step(8.0).timescale();
    en::ConservationAudit audit = en::conservation_audit(
        sys, uniform_grid(2.0 * tau, 101), chain::CollapseMode::objective, 5);
    for (double j : audit.jumps) REQUIRE(std::abs(j) <= 1e-12);
}

TEST_CASE("an off-center band produces balanced objective jumps", "[energetics]") {
    dem::DemSystem sys = audit_system(2.0);
    double tau = dem::SpectralProfile::step(8.0).timescale();
    en::ConservationAudit audit = en::conservation_audit(
        sys, uniform_grid(2.0 * tau, 101), chain::CollapseMode::objective, 5);

    REQUIRE(audit.collapse_index == 50);
    double max_jump = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < audit.jumps.size(); ++k) {
        max_jump = std::max(max_jump, std::abs(audit.jumps[k]));
        weighted += audit.branch_weights[k] * audit.jumps[k];
    }
    REQUIRE(max_jump > 1e-6);
    REQUIRE(std::abs(weighted) <= 1e-10);

    // The series steps from the mean to the surviving branch at the collapse.
    REQUIRE(audit.energies[49] == Catch::Approx(0.7 * 2.0).margin(1e-9));
    REQUIRE(audit.energies[50]
            == Catch::Approx(audit.branch_energies[audit.outcome]).margin(1e-12));

    REQUIRE_THROWS_AS(en::conservation_audit(sys, uniform_grid(tau / 10.0, 11),
                                             chain::CollapseMode::objective, 5),
                      std::runtime_error);
    REQUIRE_THROWS_AS(en::conservation_audit(sys, {}, chain::CollapseMode::objective, 5),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(en::conservation_audit(sys, {0.0, 0.0},
                                             chain::CollapseMode::objective, 5),
                      std::invalid_argument);
}

TEST_CASE("branch entropy change equals the energy jump over temperature", "[energetics]") {
    auto uniform = en::clausius_identity({0.25, 0.25, 0.25, 0.25}, 1.7);
    for (const en::ClausiusPair& p : uniform) {
        REQUIRE(std::abs(p.ds) <= 1e-12);
        REQUIRE(std::abs(p.de_over_t) <= 1e-12);
    }

    std::vector<double> w = {0.25, 0.75};
    auto skew = en::clausius_identity(w, 0.9);
    double s_mix = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
    REQUIRE(skew[0].ds == Catch::Approx(s_mix + std::log(0.25)).margin(1e-12));
    double weighted = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        REQUIRE(std::abs(skew[k].ds - skew[k].de_over_t) <= 1e-12);
        weighted += w[k] * skew[k].ds;
    }
    REQUIRE(std::abs(weighted) <= 1e-12);  // jumps balance in the mean

    rng::Engine g(21);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng::canonical(g) * 5);
        std::vector<double> rw(n);
        double total = 0.0;
        for (double& x : rw) { x = 0.05 + rng::canonical(g); total += x; }
        for (double& x : rw) x /= total;
        for (const en::ClausiusPair& p : en::clausius_identity(rw, 0.5 + rng::canonical(g)))
            REQUIRE(std::abs(p.ds - p.de_over_t) <= 1e-12);
    }

    REQUIRE_THROWS_AS(en::clausius_identity({0.5, 0.5, 0.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(en::clausius_identity({0.5, 0.4}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(en::clausius_identity({1.0}, -2.0), std::invalid_argument);
}
