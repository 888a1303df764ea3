#pragma once

// Seeded sampling utilities. std::mt19937_64 supplies the raw stream; all
// distributions are implemented explicitly because the std:: distribution
// algorithms are implementation-defined and would break run reproducibility.

#include "entime/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace entime {
namespace rng {

using Engine = std::mt19937_64;

// SplitMix64 step, used to derive per-trajectory seeds from a master seed:
// seed_k = splitmix64(master ^ golden * (k + 1)). Documented splitting rule;
// changing it changes every seeded result downstream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double canonical(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Box-Muller; one draw per call, pairs consumed in order.
inline double standard_normal(Engine& g) {
    double u1 = canonical(g);
    double u2 = canonical(g);
    while (u1 == 0.0) u1 = canonical(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Exponential inter-arrival time with the given rate.
inline double exponential(Engine& g, double rate) {
    if (rate <= 0.0)
        throw std::invalid_argument("rng::exponential: nonpositive rate");
    double u = canonical(g);
    while (u == 0.0) u = canonical(g);
    return -std::log(u) / rate;
}

// Inverse-CDF draw over nonnegative weights, scanned in index order.
// Weights need not be normalized; the last positive bin absorbs rounding.
inline int discrete(Engine& g, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0)
            throw std::invalid_argument("rng::discrete: negative weight");
        total += w;
    }
    if (total <= 0.0)
        throw std::invalid_argument("rng::discrete: all weights zero");
    double target = canonical(g) * total;
    double cum = 0.0;
    int last_positive = 0;
    for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
        if (weights[k] > 0.0) last_positive = k;
        cum += weights[k];
        if (target < cum) return k;
    }
    return last_positive;
}

// Gaussian-amplitude state, normalized.
inline Vector random_unit_vector(Engine& g, int dim) {
    Vector v(dim);
    for (int k = 0; k < dim; ++k)
        v[k] = Complex(standard_normal(g), standard_normal(g));
    double n = v.norm();
    while (n == 0.0) {  // astronomically unlikely; redraw rather than divide by zero
        for (int k = 0; k < dim; ++k)
            v[k] = Complex(standard_normal(g), standard_normal(g));
        n = v.norm();
    }
    return v / n;
}

inline Matrix random_hermitian(Engine& g, int dim) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = Complex(standard_normal(g), standard_normal(g));
    return 0.5 * (a + a.adjoint());
}

}  // namespace rng
}  // namespace entime
