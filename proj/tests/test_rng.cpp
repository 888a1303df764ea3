#include <catch2/catch_amalgamated.hpp>

#include "entime/rng.hpp"

#include <cmath>
#include <set>

using namespace entime;

TEST_CASE("engines with the same seed replay the same stream", "[rng]") {
    rng::Engine a(1234), b(1234);
    for (int k = 0; k < 100; ++k) REQUIRE(rng::canonical(a) == rng::canonical(b));
}

TEST_CASE("canonical draws stay in the unit interval", "[rng]") {
    rng::Engine g(5);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        double u = rng::canonical(g);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("standard normal has the right first two moments", "[rng]") {
    rng::Engine g(17);
    const int n = 100000;
    double mean = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
        double x = rng::standard_normal(g);
        mean += x;
        sq += x * x;
    }
    mean /= n;
    REQUIRE(std::abs(mean) < 0.02);
    REQUIRE(std::abs(sq / n - mean * mean - 1.0) < 0.03);
}

TEST_CASE("exponential waits have mean 1/rate and reject bad rates", "[rng]") {
    rng::Engine g(23);
    const int n = 100000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += rng::exponential(g, 2.5);
    REQUIRE(std::abs(sum / n - 0.4) < 0.01);
    REQUIRE_THROWS_AS(rng::exponential(g, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(rng::exponential(g, -1.0), std::invalid_argument);
}

TEST_CASE("discrete sampling follows the weights", "[rng]") {
    rng::Engine g(31);
    std::vector<double> w = {0.2, 0.3, 0.5};
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int k = 0; k < n; ++k) counts[rng::discrete(g, w)]++;
    for (int k = 0; k < 3; ++k) {
        double sigma = std::sqrt(n * w[k] * (1.0 - w[k]));
        REQUIRE(std::abs(counts[k] - n * w[k]) < 3.0 * sigma);
    }
}

TEST_CASE("discrete sampling never lands on zero-weight entries", "[rng]") {
    rng::Engine g(37);
    std::vector<double> w = {0.0, 1.0, 0.0};
    for (int k = 0; k < 1000; ++k) REQUIRE(rng::discrete(g, w) == 1);
    REQUIRE_THROWS_AS(rng::discrete(g, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("derived per-index seeds do not collide", "[rng]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i)
        seen.insert(rng::derive_seed(424242, i));
    REQUIRE(seen.size() == 1000);
    REQUIRE(rng::derive_seed(1, 0) != rng::derive_seed(2, 0));
}

TEST_CASE("random unit vectors and Hermitian draws have the advertised shape", "[rng]") {
    rng::Engine g(43);
    Vector v = rng::random_unit_vector(g, 9);
    REQUIRE(std::abs(v.norm() - 1.0) <= 1e-12);
    Matrix h = rng::random_hermitian(g, 5);
    REQUIRE(la::hermitian_deviation(h) <= 1e-14);
}
