#include <catch2/catch_amalgamated.hpp>

#include "entime/relstate.hpp"
#include "entime/rng.hpp"

#include <cmath>

using namespace entime;
using qs::PureState;

namespace {

PureState bell_pair() {
    Vector v = Vector::Zero(4);
    v[0] = 1.0 / std::sqrt(2.0);
    v[3] = 1.0 / std::sqrt(2.0);
    return PureState(v, la::CompositeIndex({2, 2}));
}

}  // namespace

TEST_CASE("product states give an all-ones Gram matrix", "[relstate]") {
    rng::Engine g(1);
    Vector a(2);
    a << Complex(0.6, 0.0), Complex(0.0, 0.8);
    Vector b = rng::random_unit_vector(g, 6);
    PureState s(la::kron(a, b), la::CompositeIndex({2, 6}));

    rel::RelativeStateDecomposition d = rel::decompose(s);
    rel::GramMatrix gm = rel::gram(d);
    for (int ip = 0; ip < 2; ++ip)
        for (int i = 0; i < 2; ++i)
            REQUIRE(std::abs(gm.at(ip, i) - Complex(1.0, 0.0)) <= 1e-12);
    REQUIRE(std::abs(std::abs(d.marginal_amplitudes[0]) - 0.6) <= 1e-12);
    REQUIRE(std::abs(std::abs(d.marginal_amplitudes[1]) - 0.8) <= 1e-12);
}

TEST_CASE("maximally entangled states give an identity Gram matrix", "[relstate]") {
    rel::GramMatrix gm = rel::gram(rel::decompose(bell_pair()));
    REQUIRE(std::abs(gm.at(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
    REQUIRE(std::abs(gm.at(1, 1) - Complex(1.0, 0.0)) <= 1e-12);
    REQUIRE(gm.max_offdiagonal_abs() <= 1e-12);
}

TEST_CASE("decomposition reconstructs each branch of the state", "[relstate]") {
    rng::Engine g(7);
    PureState s(rng::random_unit_vector(g, 32), la::CompositeIndex({4, 8}));
    rel::RelativeStateDecomposition d = rel::decompose(s);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(d.support_mask[i]);
        REQUIRE(std::abs(d.relative_vectors[i].norm() - 1.0) <= 1e-12);
        Vector branch = d.marginal_amplitudes[i] * d.relative_vectors[i];
        REQUIRE((branch - s.vector().segment(i * 8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("vanishing marginals are masked, not fabricated", "[relstate]") {
    rng::Engine g(11);
    Vector b = rng::random_unit_vector(g, 5);
    Vector v = Vector::Zero(10);
    v.segment(0, 5) = b;  // branch 1 carries no amplitude
    PureState s(v, la::CompositeIndex({2, 5}));

    rel::RelativeStateDecomposition d = rel::decompose(s);
    REQUIRE(d.support_mask[0]);
    REQUIRE_FALSE(d.support_mask[1]);

    rel::GramMatrix gm = rel::gram(d);
    REQUIRE(std::abs(gm.at(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
    REQUIRE_THROWS_AS(gm.at(1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(gm.at(0, 1), std::invalid_argument);
}

TEST_CASE("Gram matrix construction enforces its invariants", "[relstate]") {
    std::vector<bool> all{true, true};

    Matrix bad_diag = Matrix::Identity(2, 2);
    bad_diag(0, 0) = 0.9;
    REQUIRE_THROWS_AS(rel::GramMatrix(bad_diag, all), std::invalid_argument);

    Matrix too_big = Matrix::Identity(2, 2);
    too_big(0, 1) = 1.5;
    too_big(1, 0) = 1.5;
    REQUIRE_THROWS_AS(rel::GramMatrix(too_big, all), std::invalid_argument);

    Matrix skew = Matrix::Identity(2, 2);
    skew(0, 1) = Complex(0.0, 0.3);
    skew(1, 0) = Complex(0.0, 0.3);  // conjugate would be -0.3i
    REQUIRE_THROWS_AS(rel::GramMatrix(skew, all), std::invalid_argument);
}

TEST_CASE("Gram route to the reduced density matrix matches the partial trace", "[relstate]") {
    rng::Engine g(5);
    for (int trial = 0; trial < 200; ++trial) {
        int ns = 2 + static_cast<int>(rng::canonical(g) * 7);    // 2..8
        int ne = 2 + static_cast<int>(rng::canonical(g) * 15);   // 2..16
        PureState s(rng::random_unit_vector(g, ns * ne), la::CompositeIndex({ns, ne}));

        rel::RelativeStateDecomposition d = rel::decompose(s);
        Matrix via_gram = rel::reduced_rho_via_gram(d, rel::gram(d)).matrix();
        Matrix via_trace = qs::partial_trace(qs::density_from_pure(s), {0}).matrix();
        REQUIRE((via_gram - via_trace).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("reduced evolution law is exact for an uncoupled pair", "[relstate]") {
    rng::Engine g(19);
    const int ns = 2, ne = 4;
    Matrix h_s = Matrix::Zero(ns, ns);
    h_s(0, 0) = 0.3;
    h_s(1, 1) = -0.7;
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(ns * ne, ns * ne);

    PureState s(rng::random_unit_vector(g, ns * ne), la::CompositeIndex({ns, ne}));
    REQUIRE(rel::drho_dt_residual(h_s, h_e, h_se, s, 0.5, 1e-4) <= 1e-8);
}

TEST_CASE("evolution-law residual shrinks quadratically in the step", "[relstate]") {
    rng::Engine g(29);
    const int ns = 2, ne = 5;
    Matrix h_s = Matrix::Zero(ns, ns);
    h_s(0, 0) = 0.9;
    h_s(1, 1) = -0.4;
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(ns * ne, ns * ne);
    for (int k = 0; k < ns * ne; ++k)
        h_se(k, k) = rng::standard_normal(g);

    PureState s(rng::random_unit_vector(g, ns * ne), la::CompositeIndex({ns, ne}));
    double coarse = rel::drho_dt_residual(h_s, h_e, h_se, s, 0.4, 1e-3);
    double fine = rel::drho_dt_residual(h_s, h_e, h_se, s, 0.4, 5e-4);
    REQUIRE(fine > 0.0);
    double ratio = coarse / fine;
    REQUIRE(ratio >= 3.5);
    REQUIRE(ratio <= 4.5);
}

TEST_CASE("evolution law rejects non-diagonal couplings and dead branches", "[relstate]") {
    rng::Engine g(31);
    const int ns = 2, ne = 3;
    Matrix h_s = Matrix::Zero(ns, ns);
    Matrix h_e = rng::random_hermitian(g, ne);
    Matrix h_se = Matrix::Zero(ns * ne, ns * ne);
    PureState s(rng::random_unit_vector(g, ns * ne), la::CompositeIndex({ns, ne}));

    Matrix coupled = h_se;
    coupled(0, 1) = 0.2;
    coupled(1, 0) = 0.2;
    REQUIRE_THROWS_AS(rel::drho_dt_residual(h_s, h_e, coupled, s, 0.1, 1e-4),
                      std::invalid_argument);

    Matrix tilted = h_s;
    tilted(0, 1) = 0.1;
    tilted(1, 0) = 0.1;
    REQUIRE_THROWS_AS(rel::drho_dt_residual(tilted, h_e, h_se, s, 0.1, 1e-4),
                      std::invalid_argument);

    Vector dead = Vector::Zero(ns * ne);
    dead.segment(0, ne) = rng::random_unit_vector(g, ne);
    PureState one_branch(dead, la::CompositeIndex({ns, ne}));
    REQUIRE_THROWS_AS(rel::drho_dt_residual(h_s, h_e, h_se, one_branch, 0.1, 1e-4),
                      std::invalid_argument);
}
