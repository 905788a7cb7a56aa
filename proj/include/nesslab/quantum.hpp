// quantum.hpp: master equation for the driven chain with a thermal bath:
//
//   d rho/dt = -i [H0, rho] - (eps^2/2) [V, [V, rho]] + W_bath rho
//
// H0 = diag(E_n). W_bath applies the bath rates of the stochastic picture to
// the populations and a uniform decay gamma_beta = w_beta + gamma_phi to every
// coherence. The density matrix is vectorized column by column:
// rho(row, col) sits at index row + N * col.

#pragma once

#include "nesslab/kinetics.hpp"
#include "nesslab/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nesslab::quantum {

inline int vec_index(int row, int col, int n) { return row + n * col; }

/// Linear map on vectorized density matrices (N^2 x N^2, complex).
struct Superoperator {
    Eigen::MatrixXcd matrix;
    int n{0};

    /// Populations -> populations (real, columns sum to zero).
    Eigen::MatrixXd population_block() const;
    /// Coherences -> populations. Columns follow coherence_labels().
    Eigen::MatrixXcd coherence_to_population() const;
    /// Populations -> coherences. Rows follow coherence_labels().
    Eigen::MatrixXcd population_to_coherence() const;
    /// Coherences -> coherences.
    Eigen::MatrixXcd coherence_block() const;
    /// (row, col) of every off-diagonal element, in vectorization order.
    std::vector<std::pair<int, int>> coherence_labels() const;

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
};

struct DensityMatrix {
    Eigen::MatrixXcd rho;
    double residual{0.0};        ///< max |W rho|
    double generator_norm{0.0};  ///< max |W entry|
    int refinement_steps{0};

    Eigen::VectorXd populations() const { return rho.diagonal().real(); }
    double trace_error() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
};

struct EigenbasisAnalysis {
    Eigen::VectorXd eigenvalues;    ///< of V, ascending
    Eigen::MatrixXd eigvecs;        ///< columns |r>
    Eigen::VectorXd mean_energies;  ///< <E>_r
    Eigen::VectorXd weights;        ///< p_r = <r|rho|r>
    std::optional<double> t_mix;    ///< empty when the fit is undefined
    double spectral_span_r{0.0};    ///< max <E>_r - min <E>_r
};

struct SaturationEstimate {
    double t_inf{0.0};          ///< T_sys at the largest driving
    double ear_inf{0.0};        ///< EAR at the largest driving
    bool converged{false};      ///< last two grid points within 1%
    double span_r{0.0};         ///< Delta(E_r)
    double span_n{0.0};         ///< Delta(E_n), the window N * delta0
    double lower_bound{0.0};    ///< span_n / span_r * T_B
};

/// Builds the superoperator column by column by applying each term of the
/// master equation to the basis matrices |a><b|.
Superoperator build_superoperator(const model::ChainSpec& chain, const model::BathSpec& bath,
                                  const Eigen::MatrixXd& v, const model::DrivingSpec& driving);

/// Null vector of the superoperator with unit trace. Solved in the real
/// coordinates (p_n, Re rho_ab, Im rho_ab; a < b) of Hermitian matrices with
/// the p_0 equation replaced by the trace condition, then refined with
/// long-double residuals.
DensityMatrix solve_quantum_ness(const Superoperator& s);

/// Driving-induced rates eps^2 |V_{k,k+1}|^2 of the chain bonds.
model::Couplings couplings_from_perturbation(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                                             const model::DrivingSpec& driving);

/// Energy delivered by the driving term, sum_n E_n [-(eps^2/2)[V,[V,rho]]]_nn.
double driving_power(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                     const model::DrivingSpec& driving, const Eigen::MatrixXcd& rho);

/// Diagnostics of a quantum steady state. The EAR is identified with the
/// cooling rate; `balance` compares it with driving_power().
kinetics::NessReport quantum_ness_report(const model::ChainSpec& chain, const model::BathSpec& bath,
                                         const Eigen::MatrixXd& v, const model::DrivingSpec& driving,
                                         const DensityMatrix& rho);

EigenbasisAnalysis eigenbasis_analysis(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                                       const Eigen::MatrixXcd& rho);

/// Saturation estimate from an already computed T_sys(eps) series.
SaturationEstimate estimate_saturation(const model::ChainSpec& chain, const model::BathSpec& bath,
                                       std::span<const double> t_sys, std::span<const double> ear,
                                       double span_r);

/// Solves the quantum steady state along the driving grid (ascending) with V
/// held fixed and reports T_inf with its lower bound.
SaturationEstimate saturation_temperature(const model::ChainSpec& chain, const model::BathSpec& bath,
                                          const Eigen::MatrixXd& v, std::span<const double> driving_grid);

} // namespace nesslab::quantum
