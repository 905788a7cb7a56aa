// model.hpp: energy ladder, bath and driving parameters, and the log-normal
// coupling sampler shared by the stochastic and quantum pictures.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace nesslab::model {

/// Uniform energy ladder E_n = n * delta0, n = 0..N-1.
struct ChainSpec {
    int n_levels{0};
    double delta0{1.0};
    Eigen::VectorXd energies;

    /// Throws InvalidParameter unless n_levels >= 2 and delta0 > 0.
    static ChainSpec uniform(int n_levels, double delta0);

    int n_bonds() const noexcept { return n_levels - 1; }
    /// max(E) - min(E)
    double span() const { return energies(n_levels - 1) - energies(0); }
    /// Width of the energy window covered by the ladder, N * delta0.
    double window() const noexcept { return n_levels * delta0; }
    double gap(int bond) const { return energies(bond + 1) - energies(bond); }
};

struct BathSpec {
    double temperature{10.0};  ///< T_B (k_B = 1)
    double w_beta{0.1};        ///< bath coupling rate
    double gamma_phi{0.0};     ///< extra pure dephasing

    /// Dephasing applied uniformly to every coherence.
    double gamma_beta() const noexcept { return w_beta + gamma_phi; }
    void validate() const;
};

/// Driving intensity and sparsity of the log-normal coupling ensemble.
struct DrivingSpec {
    double epsilon{1.0};
    double sigma{0.0};
    std::uint64_t seed{0};

    double sparsity() const;
    /// Location of ln(w_n) that makes the ensemble mean of w_n equal eps^2.
    double mu() const;
    void validate() const;

    static double sigma_for_sparsity(double s);
};

/// Nearest-neighbour driving rates; rates(k) couples levels k and k+1.
struct Couplings {
    Eigen::VectorXd rates;
    DrivingSpec spec;

    /// Wrap hand-built rates (tests, reference cases). Rates must be >= 0.
    static Couplings from_rates(Eigen::VectorXd rates, DrivingSpec spec = {});

    int size() const noexcept { return static_cast<int>(rates.size()); }
};

/// Standard normal stream on top of mt19937_64.
///
/// Stream semantics: uniforms are (x >> 11) * 2^-53 of consecutive engine
/// outputs; normals come from Box-Muller on consecutive uniform pairs
/// (u1, u2), emitting sqrt(-2 ln(1-u1)) cos(2 pi u2) then the matching sine.
/// The k-th variate is therefore fixed by the seed on every platform with an
/// IEEE libm, unlike std::normal_distribution.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double next();

private:
    std::mt19937_64 engine_;
    double cached_{0.0};
    bool has_cached_{false};
};

/// Draws w_n = eps^2 exp(-sigma^2/2 + sigma z_n) for the N-1 bonds of the
/// chain, z_n the first N-1 variates of NormalStream(seed). Because z does
/// not depend on eps or sigma, a seed fixes one realization that is rescaled
/// along any eps/sigma sweep.
Couplings sample_couplings(const ChainSpec& chain, const DrivingSpec& driving);

/// p_n proportional to exp(-(E_n - E_0)/T).
Eigen::VectorXd canonical_distribution(const ChainSpec& chain, double temperature);

/// Real symmetric V with V(k, k+1) = sqrt(w_k)/eps and zero elsewhere.
Eigen::MatrixXd build_perturbation_matrix(const ChainSpec& chain, const Couplings& couplings,
                                          const DrivingSpec& driving);

} // namespace nesslab::model
