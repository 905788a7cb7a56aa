#include "nesslab/quantum.hpp"

#include "nesslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace nesslab::quantum {

namespace {

using cd = std::complex<double>;
using cld = std::complex<long double>;

void require_square(const Eigen::MatrixXd& v, int n) {
    if (v.rows() != n || v.cols() != n) {
        throw InvalidParameter("perturbation matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
        throw InvalidParameter("perturbation matrix must be symmetric");
    }
}

// Real coordinates of a Hermitian matrix: p_n first, then Re and Im of the
// upper-triangle coherences in the order of `pairs`.
struct HermitianCoordinates {
    int n;
    std::vector<std::pair<int, int>> pairs;

    explicit HermitianCoordinates(int dim) : n(dim) {
        for (int col = 0; col < n; ++col) {
            for (int row = 0; row < col; ++row) {
                pairs.emplace_back(row, col);
            }
        }
    }
    int size() const { return n * n; }
    int re(std::size_t k) const { return n + static_cast<int>(k); }
    int im(std::size_t k) const { return n + static_cast<int>(pairs.size() + k); }
};

} // namespace

Eigen::MatrixXd Superoperator::population_block() const {
    Eigen::MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            out(r, c) = matrix(vec_index(r, r, n), vec_index(c, c, n)).real();
        }
    }
    return out;
}

std::vector<std::pair<int, int>> Superoperator::coherence_labels() const {
    std::vector<std::pair<int, int>> labels;
    for (int col = 0; col < n; ++col) {
        for (int row = 0; row < n; ++row) {
            if (row != col) {
                labels.emplace_back(row, col);
            }
        }
    }
    return labels;
}

Eigen::MatrixXcd Superoperator::coherence_to_population() const {
    const auto labels = coherence_labels();
    Eigen::MatrixXcd out(n, static_cast<Eigen::Index>(labels.size()));
    for (int r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < labels.size(); ++c) {
            out(r, c) = matrix(vec_index(r, r, n), vec_index(labels[c].first, labels[c].second, n));
        }
    }
    return out;
}

Eigen::MatrixXcd Superoperator::population_to_coherence() const {
    const auto labels = coherence_labels();
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(labels.size()), n);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        for (int c = 0; c < n; ++c) {
            out(r, c) = matrix(vec_index(labels[r].first, labels[r].second, n), vec_index(c, c, n));
        }
    }
    return out;
}

Eigen::MatrixXcd Superoperator::coherence_block() const {
    const auto labels = coherence_labels();
    const auto m = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXcd out(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            out(r, c) = matrix(vec_index(labels[r].first, labels[r].second, n),
                               vec_index(labels[c].first, labels[c].second, n));
        }
    }
    return out;
}

Eigen::MatrixXcd Superoperator::apply(const Eigen::MatrixXcd& rho) const {
    const Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    Eigen::VectorXcd out = matrix * flat;
    return Eigen::Map<Eigen::MatrixXcd>(out.data(), n, n);
}

Superoperator build_superoperator(const model::ChainSpec& chain, const model::BathSpec& bath,
                                  const Eigen::MatrixXd& v, const model::DrivingSpec& driving) {
    bath.validate();
    driving.validate();
    const int n = chain.n_levels;
    require_square(v, n);

    const double eps2 = driving.epsilon * driving.epsilon;
    const Eigen::MatrixXd v2 = v * v;
    const double gamma_beta = bath.gamma_beta();

    // Nonzero pattern of V per column, to keep the V rho V term sparse.
    std::vector<std::vector<int>> support(n);
    for (int a = 0; a < n; ++a) {
        for (int k = 0; k < n; ++k) {
            if (v(k, a) != 0.0) {
                support[a].push_back(k);
            }
        }
    }

    Superoperator s;
    s.n = n;
    s.matrix = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            // Column for the basis matrix |a><b|.
            const int j = vec_index(a, b, n);
            auto col = s.matrix.col(j);

            col(j) += cd(0.0, -(chain.energies(a) - chain.energies(b)));

            if (eps2 != 0.0) {
                for (int k = 0; k < n; ++k) {
                    col(vec_index(k, b, n)) -= 0.5 * eps2 * v2(k, a);
                    col(vec_index(a, k, n)) -= 0.5 * eps2 * v2(b, k);
                }
                for (int k : support[a]) {
                    for (int l : support[b]) {
                        col(vec_index(k, l, n)) += eps2 * v(k, a) * v(b, l);
                    }
                }
            }

            if (a == b) {
                for (int k = 0; k < n; ++k) {
                    if (k == a || std::abs(k - a) != 1) {
                        continue;
                    }
                    const double rate = kinetics::bath_rate(bath, chain.energies(k), chain.energies(a));
                    col(vec_index(k, k, n)) += rate;
                    col(j) -= rate;
                }
            } else {
                col(j) -= gamma_beta;
            }
        }
    }
    return s;
}

DensityMatrix solve_quantum_ness(const Superoperator& s) {
    const int n = s.n;
    const HermitianCoordinates coords(n);
    const int dim = coords.size();
    const cd i_unit(0.0, 1.0);

    // Real matrix of the superoperator restricted to Hermitian matrices.
    Eigen::MatrixXd real_gen(dim, dim);
    auto scatter = [&](int column, const Eigen::VectorXcd& image) {
        for (int r = 0; r < n; ++r) {
            real_gen(r, column) = image(vec_index(r, r, n)).real();
        }
        for (std::size_t k = 0; k < coords.pairs.size(); ++k) {
            const cd z = image(vec_index(coords.pairs[k].first, coords.pairs[k].second, n));
            real_gen(coords.re(k), column) = z.real();
            real_gen(coords.im(k), column) = z.imag();
        }
    };
    for (int d = 0; d < n; ++d) {
        scatter(d, s.matrix.col(vec_index(d, d, n)));
    }
    for (std::size_t k = 0; k < coords.pairs.size(); ++k) {
        const auto [a, b] = coords.pairs[k];
        const auto upper = s.matrix.col(vec_index(a, b, n));
        const auto lower = s.matrix.col(vec_index(b, a, n));
        scatter(coords.re(k), upper + lower);
        scatter(coords.im(k), i_unit * (upper - lower));
    }

    Eigen::MatrixXd system = real_gen;
    system.row(0).setZero();
    system.row(0).head(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    rhs(0) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    Eigen::VectorXd x = lu.solve(rhs);

    auto residual_of = [&](const Eigen::VectorXd& guess) {
        std::vector<long double> acc(rhs.data(), rhs.data() + dim);
        for (int c = 0; c < dim; ++c) {
            const long double xc = guess(c);
            if (xc == 0.0L) {
                continue;
            }
            for (int row = 0; row < dim; ++row) {
                acc[row] -= static_cast<long double>(system(row, c)) * xc;
            }
        }
        Eigen::VectorXd r(dim);
        for (int row = 0; row < dim; ++row) {
            r(row) = static_cast<double>(acc[row]);
        }
        return r;
    };

    const double system_norm = system.cwiseAbs().maxCoeff();
    int steps = 0;
    bool healthy = x.allFinite();
    // A consistent singular system can still leave a tiny residual; a pivot at
    // rounding level sends it to the rank-revealing check.
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (healthy && pivots.minCoeff() <= 1e-13 * pivots.maxCoeff()) {
        Eigen::FullPivLU<Eigen::MatrixXd> full(system);
        full.setThreshold(1e-13);
        healthy = full.isInvertible();
    }
    if (healthy) {
        Eigen::VectorXd r = residual_of(x);
        for (; steps < 4; ++steps) {
            if (r.cwiseAbs().maxCoeff() <= 1e-15 * system_norm * x.cwiseAbs().maxCoeff()) {
                break;
            }
            const Eigen::VectorXd next = x + lu.solve(r);
            if (!next.allFinite()) {
                break;
            }
            const Eigen::VectorXd next_r = residual_of(next);
            if (next_r.cwiseAbs().maxCoeff() >= r.cwiseAbs().maxCoeff()) {
                break;
            }
            x = next;
            r = next_r;
        }
        healthy = r.cwiseAbs().maxCoeff() <= 1e-10 * system_norm * x.cwiseAbs().maxCoeff();
    }
    if (!healthy) {
        Eigen::FullPivLU<Eigen::MatrixXd> full(real_gen);
        full.setThreshold(1e-12);
        const long null_dim = static_cast<long>(full.dimensionOfKernel());
        throw DegenerateSteadyState("solve_quantum_ness: steady state is not unique (null space dimension " +
                                        std::to_string(null_dim) + ")",
                                    null_dim);
    }

    DensityMatrix out;
    out.rho = Eigen::MatrixXcd::Zero(n, n);
    for (int d = 0; d < n; ++d) {
        out.rho(d, d) = x(d);
    }
    for (std::size_t k = 0; k < coords.pairs.size(); ++k) {
        const auto [a, b] = coords.pairs[k];
        out.rho(a, b) = cd(x(coords.re(k)), x(coords.im(k)));
        out.rho(b, a) = std::conj(out.rho(a, b));
    }
    out.refinement_steps = steps;
    out.generator_norm = s.matrix.cwiseAbs().maxCoeff();
    out.residual = s.apply(out.rho).cwiseAbs().maxCoeff();
    return out;
}

double DensityMatrix::trace_error() const { return std::abs(rho.trace() - cd(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

model::Couplings couplings_from_perturbation(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                                             const model::DrivingSpec& driving) {
    require_square(v, chain.n_levels);
    Eigen::VectorXd rates(chain.n_bonds());
    const double eps2 = driving.epsilon * driving.epsilon;
    for (int k = 0; k < chain.n_bonds(); ++k) {
        rates(k) = eps2 * v(k, k + 1) * v(k, k + 1);
    }
    return model::Couplings{rates, driving};
}

double driving_power(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                     const model::DrivingSpec& driving, const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd vc = v.cast<cd>();
    const Eigen::MatrixXcd v2 = vc * vc;
    const Eigen::MatrixXcd term = v2 * rho + rho * v2 - 2.0 * vc * rho * vc;
    double total = 0.0;
    for (int n = 0; n < chain.n_levels; ++n) {
        total += chain.energies(n) * term(n, n).real();
    }
    return -0.5 * driving.epsilon * driving.epsilon * total;
}

kinetics::NessReport quantum_ness_report(const model::ChainSpec& chain, const model::BathSpec& bath,
                                         const Eigen::MatrixXd& v, const model::DrivingSpec& driving,
                                         const DensityMatrix& rho) {
    const model::Couplings couplings = couplings_from_perturbation(chain, v, driving);
    const kinetics::Populations p(rho.populations());
    kinetics::NessReport r = kinetics::make_report(chain, bath, couplings, p);
    r.ear = r.cooling;
    r.balance = kinetics::relative_balance(driving_power(chain, v, driving, rho.rho), r.cooling);
    r.d_eff = r.ear * r.t_sys;
    return r;
}

EigenbasisAnalysis eigenbasis_analysis(const model::ChainSpec& chain, const Eigen::MatrixXd& v,
                                       const Eigen::MatrixXcd& rho) {
    require_square(v, chain.n_levels);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigenbasis_analysis: eigendecomposition failed");
    }
    EigenbasisAnalysis out;
    out.eigenvalues = es.eigenvalues();
    out.eigvecs = es.eigenvectors();
    const int n = chain.n_levels;
    out.mean_energies = out.eigvecs.cwiseAbs2().transpose() * chain.energies;
    out.weights.resize(n);
    for (int r = 0; r < n; ++r) {
        const Eigen::VectorXcd ket = out.eigvecs.col(r).cast<cd>();
        out.weights(r) = (ket.adjoint() * rho * ket)(0, 0).real();
    }
    out.spectral_span_r = out.mean_energies.maxCoeff() - out.mean_energies.minCoeff();

    // ln p_r = c - <E>_r / T_mix, weighted by p_r.
    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::vector<int> used;
    for (int r = 0; r < n; ++r) {
        if (out.weights(r) > 1e-12) {
            used.push_back(r);
            sw += out.weights(r);
            sx += out.weights(r) * out.mean_energies(r);
            sy += out.weights(r) * std::log(out.weights(r));
        }
    }
    const double tiny_span = 1e-9 * std::max(1.0, chain.span());
    if (used.size() >= 2 && out.spectral_span_r > tiny_span) {
        const double xbar = sx / sw;
        const double ybar = sy / sw;
        double sxx = 0.0, sxy = 0.0;
        for (int r : used) {
            const double dx = out.mean_energies(r) - xbar;
            sxx += out.weights(r) * dx * dx;
            sxy += out.weights(r) * dx * (std::log(out.weights(r)) - ybar);
        }
        if (sxx > tiny_span * tiny_span * sw) {
            const double slope = sxy / sxx;
            out.t_mix = slope == 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / slope;
        }
    }
    return out;
}

SaturationEstimate estimate_saturation(const model::ChainSpec& chain, const model::BathSpec& bath,
                                       std::span<const double> t_sys, std::span<const double> ear,
                                       double span_r) {
    if (t_sys.empty() || t_sys.size() != ear.size()) {
        throw InvalidParameter("estimate_saturation: need matching, non-empty series");
    }
    SaturationEstimate out;
    out.t_inf = t_sys.back();
    out.ear_inf = ear.back();
    if (t_sys.size() >= 2) {
        const double prev = t_sys[t_sys.size() - 2];
        out.converged = std::isfinite(out.t_inf) && std::abs(out.t_inf - prev) < 0.01 * std::abs(out.t_inf);
    }
    out.span_r = span_r;
    out.span_n = chain.window();
    // Same cut as eigenbasis_analysis: a span at rounding level is zero.
    out.lower_bound = span_r > 1e-9 * std::max(1.0, chain.span()) ? out.span_n / span_r * bath.temperature
                                                                   : std::numeric_limits<double>::infinity();
    return out;
}

SaturationEstimate saturation_temperature(const model::ChainSpec& chain, const model::BathSpec& bath,
                                          const Eigen::MatrixXd& v, std::span<const double> driving_grid) {
    if (driving_grid.empty()) {
        throw InvalidParameter("saturation_temperature: empty driving grid");
    }
    std::vector<double> t_sys;
    std::vector<double> ear;
    DensityMatrix last;
    for (double eps : driving_grid) {
        model::DrivingSpec driving;
        driving.epsilon = eps;
        const Superoperator s = build_superoperator(chain, bath, v, driving);
        last = solve_quantum_ness(s);
        const kinetics::NessReport report = quantum_ness_report(chain, bath, v, driving, last);
        t_sys.push_back(report.t_sys);
        ear.push_back(report.ear);
    }
    const EigenbasisAnalysis eig = eigenbasis_analysis(chain, v, last.rho);
    return estimate_saturation(chain, bath, t_sys, ear, eig.spectral_span_r);
}

} // namespace nesslab::quantum
