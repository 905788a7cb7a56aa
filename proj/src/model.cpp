#include "nesslab/model.hpp"

#include "nesslab/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nesslab::model {

ChainSpec ChainSpec::uniform(int n_levels, double delta0) {
    if (n_levels < 2) {
        throw InvalidParameter("ChainSpec: need at least two levels, got " + std::to_string(n_levels));
    }
    if (!(delta0 > 0.0) || !std::isfinite(delta0)) {
        throw InvalidParameter("ChainSpec: level spacing must be positive and finite");
    }
    ChainSpec chain;
    chain.n_levels = n_levels;
    chain.delta0 = delta0;
    chain.energies.resize(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        chain.energies(n) = n * delta0;
    }
    return chain;
}

void BathSpec::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw InvalidParameter("BathSpec: temperature must be positive and finite");
    }
    if (!(w_beta >= 0.0) || !std::isfinite(w_beta)) {
        throw InvalidParameter("BathSpec: w_beta must be >= 0");
    }
    if (!(gamma_phi >= 0.0) || !std::isfinite(gamma_phi)) {
        throw InvalidParameter("BathSpec: gamma_phi must be >= 0");
    }
}

double DrivingSpec::sparsity() const { return std::exp(-sigma * sigma); }

double DrivingSpec::mu() const { return 2.0 * std::log(epsilon) - 0.5 * sigma * sigma; }

void DrivingSpec::validate() const {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw InvalidParameter("DrivingSpec: epsilon must be finite and >= 0");
    }
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw InvalidParameter("DrivingSpec: sigma must be finite and >= 0");
    }
}

double DrivingSpec::sigma_for_sparsity(double s) {
    if (!(s > 0.0 && s <= 1.0)) {
        throw InvalidParameter("sparsity must lie in (0, 1]");
    }
    return std::sqrt(-std::log(s));
}

Couplings Couplings::from_rates(Eigen::VectorXd rates, DrivingSpec spec) {
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
        if (!(rates(k) >= 0.0) || !std::isfinite(rates(k))) {
            throw InvalidParameter("Couplings: rates must be finite and >= 0");
        }
    }
    return Couplings{std::move(rates), spec};
}

double NormalStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Couplings sample_couplings(const ChainSpec& chain, const DrivingSpec& driving) {
    driving.validate();
    NormalStream stream(driving.seed);
    const double eps2 = driving.epsilon * driving.epsilon;
    const double shift = -0.5 * driving.sigma * driving.sigma;
    Couplings out;
    out.spec = driving;
    out.rates.resize(chain.n_bonds());
    for (int k = 0; k < chain.n_bonds(); ++k) {
        out.rates(k) = eps2 * std::exp(shift + driving.sigma * stream.next());
    }
    return out;
}

Eigen::VectorXd canonical_distribution(const ChainSpec& chain, double temperature) {
    if (!(temperature > 0.0) || std::isnan(temperature)) {
        throw InvalidParameter("canonical_distribution: temperature must be positive");
    }
    Eigen::VectorXd p(chain.n_levels);
    for (int n = 0; n < chain.n_levels; ++n) {
        p(n) = std::exp(-(chain.energies(n) - chain.energies(0)) / temperature);
    }
    return p / p.sum();
}

Eigen::MatrixXd build_perturbation_matrix(const ChainSpec& chain, const Couplings& couplings,
                                          const DrivingSpec& driving) {
    if (couplings.size() != chain.n_bonds()) {
        throw InvalidParameter("build_perturbation_matrix: couplings do not match the chain");
    }
    if (!(driving.epsilon > 0.0) || !std::isfinite(driving.epsilon)) {
        throw InvalidParameter("build_perturbation_matrix: epsilon must be positive");
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(chain.n_levels, chain.n_levels);
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const double amplitude = std::sqrt(couplings.rates(k)) / driving.epsilon;
        v(k, k + 1) = amplitude;
        v(k + 1, k) = amplitude;
    }
    return v;
}

} // namespace nesslab::model
