// kinetics.hpp: stochastic rate-equation picture of the driven chain.
//
// The generator combines driving-induced rates (symmetric) with bath rates
// obeying detailed balance at T_B. Steady states are solved in binary128 so
// that bond currents, which at strong driving are differences of populations
// agreeing to ~13 digits, keep their leading digits.

#pragma once

#include "nesslab/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace nesslab::kinetics {

using Extended = __float128;

/// Probability vector stored in extended precision with a double view.
class Populations {
public:
    Populations() = default;
    Populations(const Eigen::VectorXd& p);  // NOLINT: implicit on purpose
    explicit Populations(std::vector<Extended> p);

    int size() const noexcept { return static_cast<int>(exact_.size()); }
    double operator()(int n) const { return rounded_(n); }
    const Eigen::VectorXd& values() const noexcept { return rounded_; }
    const std::vector<Extended>& extended() const noexcept { return exact_; }

    /// ln(p(k+1) / p(k)), accurate even when the ratio is 1 - 1e-13.
    double log_ratio(int k) const;

private:
    std::vector<Extended> exact_;
    Eigen::VectorXd rounded_;
};

/// Bath-induced rate for a transition from energy e_from to e_to:
/// 2 w_beta / (1 + exp((e_to - e_from) / T_B)).
double bath_rate(const model::BathSpec& bath, double e_to, double e_from);

/// Generator of dp/dt = W p. Entry (n, m) is the m -> n rate; the diagonal
/// holds minus the column sums. The driving and bath parts are kept apart so
/// that energy currents can be split without re-deriving them.
struct RateMatrix {
    Eigen::MatrixXd driving_rates;
    Eigen::MatrixXd bath_rates;
    Eigen::MatrixXd generator;
    model::ChainSpec chain;
    model::BathSpec bath;
    model::Couplings couplings;

    int dim() const noexcept { return chain.n_levels; }
};

/// Flat record of the steady-state diagnostics (one CSV row).
struct NessReport {
    double ear{0.0};              ///< energy absorption rate from the driving
    double cooling{0.0};          ///< energy flow into the bath
    double balance{0.0};          ///< |ear - cooling| / max(|ear|, 1e-30)
    Eigen::VectorXd micro_temps;  ///< T_k of bond (k, k+1), from populations
    double t_sys{0.0};            ///< bath-weighted harmonic mean of T_k
    double t_sys_unweighted{0.0}; ///< plain harmonic mean of T_k
    double t_sys_closed{0.0};     ///< high-temperature closed form from the rates
    double d_eff{0.0};            ///< ear * t_sys
    double d_eff_closed{0.0};     ///< closed-form effective diffusion
    double d_lrt{0.0};
    double d_slrt{0.0};
    double d_bath{0.0};
};

struct StochasticNess {
    Populations populations;
    double residual{0.0};  ///< max |W p|
    NessReport report;
};

struct Diffusion {
    double d_eff{0.0};
    double d_lrt{0.0};
    double d_slrt{0.0};
};

struct AppendixCheck {
    double cooling_exact{0.0};
    double cooling_linearized{0.0};
    double ear_exact{0.0};
    double ear_linearized{0.0};
    double cooling_deviation{0.0};  ///< relative
    double ear_deviation{0.0};      ///< relative
};

RateMatrix build_rate_matrix(const model::ChainSpec& chain, const model::BathSpec& bath,
                             const model::Couplings& couplings);

/// Dense solve of W p = 0 with the first row replaced by sum(p) = 1.
/// Throws DegenerateSteadyState when the null space is not one-dimensional.
StochasticNess solve_ness(const RateMatrix& w);

/// Classic RK4 integration of dp/dt = W p up to time t.
/// Requires dt * max|W_nn| < 0.1, otherwise throws StiffnessError.
Eigen::VectorXd evolve(const RateMatrix& w, const Eigen::VectorXd& p0, double t, double dt);

/// Sum over ordered pairs of (E_n - E_m) w^eps_nm p_m.
double ear(const model::ChainSpec& chain, const model::Couplings& couplings, const Populations& p);

/// Minus the sum over ordered pairs of (E_n - E_m) w^beta_nm p_m.
double cooling_rate(const model::ChainSpec& chain, const model::BathSpec& bath, const Populations& p);

/// T_k = -(E_{k+1} - E_k) / ln(p_{k+1}/p_k); +inf for equal populations.
Eigen::VectorXd micro_temperatures(const model::ChainSpec& chain, const Populations& p);

/// T_k = T_B (w_k + w_beta) / w_beta.
Eigen::VectorXd micro_temperatures_closed_form(const model::BathSpec& bath,
                                               const model::Couplings& couplings);

/// 1/T_sys = sum_k pbar_k wbar_k dE_k^2 / T_k / sum_k pbar_k wbar_k dE_k^2,
/// with pbar_k = (p_k + p_{k+1})/2 and wbar_k the mean of the two bath rates.
double effective_temperature(const model::ChainSpec& chain, const model::BathSpec& bath,
                             const Populations& p);

double harmonic_mean_temperature(const Eigen::VectorXd& temps);

/// T_B / mean(w_beta / (w_beta + w_k)).
double effective_temperature_closed_form(const model::BathSpec& bath, const model::Couplings& couplings);

/// Effective (series network with bath shunt), LRT and SLRT diffusion.
Diffusion diffusion_coefficient(const model::ChainSpec& chain, const model::BathSpec& bath,
                                const model::Couplings& couplings);

/// D_B = w_beta * delta0^2.
double bath_diffusion(const model::ChainSpec& chain, const model::BathSpec& bath);

/// (1/2) sum_{n,m} p_m w^eps_nm (E_n - E_m)^2: the LRT diffusion averaged over p.
double lrt_diffusion(const model::ChainSpec& chain, const model::Couplings& couplings, const Populations& p);

/// Compares the exact energy currents with their linearized-tanh forms.
AppendixCheck appendix_cross_check(const model::ChainSpec& chain, const model::BathSpec& bath,
                                   const model::Couplings& couplings, const Populations& p);

double relative_balance(double ear, double cooling);

/// All diagnostics for populations p of the given model.
NessReport make_report(const model::ChainSpec& chain, const model::BathSpec& bath,
                       const model::Couplings& couplings, const Populations& p);

} // namespace nesslab::kinetics
