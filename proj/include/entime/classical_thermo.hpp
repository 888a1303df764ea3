#pragma once

// Classical entropy toolkit: Gibbs and Shannon measures, Boltzmann-factor
// ensembles, a volume-parameterized spectrum for the Gibbs-to-Clausius
// differential check, and the two-temperature gas-mixing formula.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace entime {
namespace thermo {

// ---------- entropy measures ----------

// -sum p ln p in nats, with 0 ln 0 = 0.
inline double gibbs_entropy(const std::vector<double>& p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0)
            throw std::invalid_argument("gibbs_entropy: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("gibbs_entropy: NotNormalized");
    double s = 0.0;
    for (double v : p)
        if (v > 0.0) s -= v * std::log(v);
    return s;
}

// -log2 p in bits; additive over independent events.
inline double shannon_information(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("shannon_information: OutOfRange (need 0 < p <= 1)");
    return -std::log2(p);
}

// ---------- Boltzmann ensembles ----------

class DiscreteEnsemble {
public:
    DiscreteEnsemble(std::vector<double> energies, double temperature)
        : energies_(std::move(energies)), temperature_(temperature) {
        if (energies_.empty())
            throw std::invalid_argument("DiscreteEnsemble: no energy levels");
        if (!(temperature_ > 0.0))
            throw std::invalid_argument("DiscreteEnsemble: nonpositive temperature");
        // Shifted exponentials keep the weights in range; Z = W exp(-E_min/T).
        double e_min = energies_[0];
        for (double e : energies_) e_min = std::min(e_min, e);
        double w_sum = 0.0;
        for (double e : energies_) {
            probabilities_.push_back(std::exp(-(e - e_min) / temperature_));
            w_sum += probabilities_.back();
        }
        for (double& p : probabilities_) p /= w_sum;
        log_z_ = std::log(w_sum) - e_min / temperature_;
    }

    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    double temperature() const { return temperature_; }
    double log_partition() const { return log_z_; }
    double partition_function() const { return std::exp(log_z_); }

    double mean_energy() const {
        double e = 0.0;
        for (std::size_t i = 0; i < energies_.size(); ++i)
            e += probabilities_[i] * energies_[i];
        return e;
    }

    double entropy() const { return gibbs_entropy(probabilities_); }

private:
    std::vector<double> energies_;
    std::vector<double> probabilities_;
    double temperature_ = 0.0;
    double log_z_ = 0.0;
};

// Particle-in-a-box levels E_i = c i^2 V^(-2/3), i = 1..n: the simplest
// spectrum with an explicit volume dependence, so dE_i/dV has a closed form
// for the work term.
class BoxSpectrum {
public:
    BoxSpectrum(int n_levels, double volume, double scale = 1.0)
        : n_(n_levels), volume_(volume), scale_(scale) {
        if (n_ < 1)
            throw std::invalid_argument("BoxSpectrum: need at least one level");
        if (!(volume_ > 0.0))
            throw std::invalid_argument("BoxSpectrum: nonpositive volume");
        if (!(scale_ > 0.0))
            throw std::invalid_argument("BoxSpectrum: nonpositive scale");
    }

    int n_levels() const { return n_; }
    double volume() const { return volume_; }

    std::vector<double> energies() const {
        std::vector<double> e;
        for (int i = 1; i <= n_; ++i)
            e.push_back(scale_ * i * i * std::pow(volume_, -2.0 / 3.0));
        return e;
    }

    // dE_i/dV, the per-level pressure term.
    std::vector<double> energy_slopes() const {
        std::vector<double> s;
        for (int i = 1; i <= n_; ++i)
            s.push_back(-(2.0 / 3.0) * scale_ * i * i * std::pow(volume_, -5.0 / 3.0));
        return s;
    }

    BoxSpectrum with_volume(double volume) const {
        return BoxSpectrum(n_, volume, scale_);
    }

private:
    int n_ = 0;
    double volume_ = 0.0;
    double scale_ = 1.0;
};

// ---------- Gibbs to Clausius ----------

struct ClausiusCheck {
    double ds_gibbs = 0.0;   // S(V + dV) - S(V) at fixed T
    double dq_over_t = 0.0;  // (d<E> - <dW>) / T
    double residual = 0.0;   // |ds_gibbs - dq_over_t|, second order in dV
};

// Isothermal volume step on a Boltzmann ensemble: the Gibbs entropy change
// matches the heat over temperature up to O(dV^2), with the work term taken
// from the analytic level slopes at the starting volume.
inline ClausiusCheck clausius_check(const BoxSpectrum& spec, double temperature,
                                    double dv) {
    DiscreteEnsemble before(spec.energies(), temperature);
    DiscreteEnsemble after(spec.with_volume(spec.volume() + dv).energies(), temperature);

    double dw = 0.0;
    std::vector<double> slopes = spec.energy_slopes();
    for (std::size_t i = 0; i < slopes.size(); ++i)
        dw += before.probabilities()[i] * slopes[i] * dv;

    ClausiusCheck out;
    out.ds_gibbs = after.entropy() - before.entropy();
    out.dq_over_t = (after.mean_energy() - before.mean_energy() - dw) / temperature;
    out.residual = std::abs(out.ds_gibbs - out.dq_over_t);
    return out;
}

// ---------- gas mixing ----------

// Entropy gain from equalizing two equal ideal-gas samples prepared at
// T + dT and T - dT: (3/2) N ln(T^2 / (T^2 - dT^2)), zero only at dT = 0.
inline double gas_mixing_entropy(int n_particles, double temperature, double dt) {
    if (n_particles < 0)
        throw std::invalid_argument("gas_mixing_entropy: negative particle count");
    if (!(temperature > 0.0))
        throw std::invalid_argument("gas_mixing_entropy: nonpositive temperature");
    if (dt < 0.0 || dt >= temperature)
        throw std::invalid_argument("gas_mixing_entropy: OutOfRange (dT = "
            + std::to_string(dt) + " outside [0, T = " + std::to_string(temperature) + "))");
    double t2 = temperature * temperature;
    return 1.5 * n_particles * std::log(t2 / (t2 - dt * dt));
}

}  // namespace thermo
}  // namespace entime
