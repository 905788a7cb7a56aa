#include "nesslab/kinetics.hpp"

#include "nesslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nesslab::kinetics {

namespace {

constexpr double kBalanceFloor = 1e-30;

Extended ext_abs(Extended x) { return x < 0 ? -x : x; }

// Gaussian elimination with partial pivoting on a row-major n x n system.
// Returns false when a pivot falls below `floor`.
template <typename T>
bool gaussian_solve(std::vector<T>& a, std::vector<T>& b, int n, T floor) {
    auto at = [&](int r, int c) -> T& { return a[static_cast<std::size_t>(r) * n + c]; };
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        T best = ext_abs(at(col, col));
        for (int r = col + 1; r < n; ++r) {
            const T cand = ext_abs(at(r, col));
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (!(best > floor)) {
            return false;
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(at(col, c), at(pivot, c));
            }
            std::swap(b[col], b[pivot]);
        }
        const T inv = T(1) / at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const T factor = at(r, col) * inv;
            if (factor == T(0)) {
                continue;
            }
            at(r, col) = T(0);
            for (int c = col + 1; c < n; ++c) {
                at(r, c) -= factor * at(col, c);
            }
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        T acc = b[r];
        for (int c = r + 1; c < n; ++c) {
            acc -= at(r, c) * b[c];
        }
        b[r] = acc / at(r, r);
    }
    return true;
}

void require_matching(const model::ChainSpec& chain, const model::Couplings& couplings) {
    if (couplings.size() != chain.n_bonds()) {
        throw InvalidParameter("couplings have " + std::to_string(couplings.size()) +
                               " bonds, chain has " + std::to_string(chain.n_bonds()));
    }
}

void require_matching(const model::ChainSpec& chain, const Populations& p) {
    if (p.size() != chain.n_levels) {
        throw InvalidParameter("population vector does not match the chain");
    }
}

Extended bond_mean(const Populations& p, int k) {
    return (p.extended()[k] + p.extended()[k + 1]) / 2;
}

} // namespace

Populations::Populations(const Eigen::VectorXd& p) : exact_(p.size()), rounded_(p) {
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        exact_[n] = p(n);
    }
}

Populations::Populations(std::vector<Extended> p) : exact_(std::move(p)), rounded_(exact_.size()) {
    for (std::size_t n = 0; n < exact_.size(); ++n) {
        rounded_(static_cast<Eigen::Index>(n)) = static_cast<double>(exact_[n]);
    }
}

double Populations::log_ratio(int k) const {
    const Extended lo = exact_[k];
    const Extended hi = exact_[k + 1];
    if (lo <= 0 || hi <= 0) {
        if (lo <= 0 && hi <= 0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return hi <= 0 ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
    }
    return std::log1p(static_cast<double>((hi - lo) / lo));
}

double bath_rate(const model::BathSpec& bath, double e_to, double e_from) {
    return 2.0 * bath.w_beta / (1.0 + std::exp((e_to - e_from) / bath.temperature));
}

RateMatrix build_rate_matrix(const model::ChainSpec& chain, const model::BathSpec& bath,
                             const model::Couplings& couplings) {
    bath.validate();
    require_matching(chain, couplings);
    const int n = chain.n_levels;
    RateMatrix w;
    w.chain = chain;
    w.bath = bath;
    w.couplings = couplings;
    w.driving_rates = Eigen::MatrixXd::Zero(n, n);
    w.bath_rates = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < chain.n_bonds(); ++k) {
        w.driving_rates(k + 1, k) = couplings.rates(k);
        w.driving_rates(k, k + 1) = couplings.rates(k);
        w.bath_rates(k + 1, k) = bath_rate(bath, chain.energies(k + 1), chain.energies(k));
        w.bath_rates(k, k + 1) = bath_rate(bath, chain.energies(k), chain.energies(k + 1));
    }
    w.generator = w.driving_rates + w.bath_rates;
    for (int m = 0; m < n; ++m) {
        w.generator(m, m) = 0.0;
        w.generator(m, m) = -w.generator.col(m).sum();
    }
    return w;
}

StochasticNess solve_ness(const RateMatrix& w) {
    const int n = w.dim();
    std::vector<Extended> gen(static_cast<std::size_t>(n) * n, Extended(0));
    auto g = [&](int r, int c) -> Extended& { return gen[static_cast<std::size_t>(r) * n + c]; };
    Extended scale = 0;
    for (int m = 0; m < n; ++m) {
        Extended column = 0;
        for (int r = 0; r < n; ++r) {
            if (r == m) {
                continue;
            }
            g(r, m) = Extended(w.driving_rates(r, m)) + Extended(w.bath_rates(r, m));
            column += g(r, m);
        }
        g(m, m) = -column;
        scale = std::max(scale, ext_abs(column));
    }

    std::vector<Extended> a = gen;
    std::vector<Extended> p(n, Extended(0));
    for (int c = 0; c < n; ++c) {
        a[c] = 1;
    }
    p[0] = 1;
    if (!(scale > 0) || !gaussian_solve(a, p, n, scale * Extended(1e-30))) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(w.generator);
        lu.setThreshold(1e-12);
        const long dim = static_cast<long>(lu.dimensionOfKernel());
        throw DegenerateSteadyState("solve_ness: steady state is not unique (null space dimension " +
                                        std::to_string(dim) + ")",
                                    dim);
    }

    Extended residual = 0;
    for (int r = 0; r < n; ++r) {
        Extended acc = 0;
        for (int c = 0; c < n; ++c) {
            acc += g(r, c) * p[c];
        }
        residual = std::max(residual, ext_abs(acc));
    }

    StochasticNess out;
    out.populations = Populations(std::move(p));
    out.residual = static_cast<double>(residual);
    out.report = make_report(w.chain, w.bath, w.couplings, out.populations);
    return out;
}

Eigen::VectorXd evolve(const RateMatrix& w, const Eigen::VectorXd& p0, double t, double dt) {
    if (p0.size() != w.dim()) {
        throw InvalidParameter("evolve: initial vector does not match the generator");
    }
    if (!(t >= 0.0) || !(dt > 0.0)) {
        throw InvalidParameter("evolve: need t >= 0 and dt > 0");
    }
    const double stiffest = w.generator.diagonal().cwiseAbs().maxCoeff();
    if (dt * stiffest >= 0.1) {
        const double suggested = 0.05 / stiffest;
        throw StiffnessError("evolve: dt * max|W_nn| must stay below 0.1; try dt <= " +
                                 std::to_string(suggested),
                             suggested);
    }
    Eigen::VectorXd p = p0;
    if (t == 0.0) {
        return p;
    }
    const auto steps = static_cast<long long>(std::ceil(t / dt));
    const double h = t / static_cast<double>(steps);
    const Eigen::MatrixXd& gen = w.generator;
    Eigen::VectorXd k1(p.size()), k2(p.size()), k3(p.size()), k4(p.size());
    for (long long s = 0; s < steps; ++s) {
        k1.noalias() = gen * p;
        k2.noalias() = gen * (p + 0.5 * h * k1);
        k3.noalias() = gen * (p + 0.5 * h * k2);
        k4.noalias() = gen * (p + h * k3);
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

double ear(const model::ChainSpec& chain, const model::Couplings& couplings, const Populations& p) {
    require_matching(chain, couplings);
    require_matching(chain, p);
    const auto& q = p.extended();
    Extended total = 0;
    for (int k = 0; k < chain.n_bonds(); ++k) {
        total += Extended(chain.gap(k)) * Extended(couplings.rates(k)) * (q[k] - q[k + 1]);
    }
    return static_cast<double>(total);
}

double cooling_rate(const model::ChainSpec& chain, const model::BathSpec& bath, const Populations& p) {
    require_matching(chain, p);
    const auto& q = p.extended();
    Extended total = 0;
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const Extended up = bath_rate(bath, chain.energies(k + 1), chain.energies(k));
        const Extended down = bath_rate(bath, chain.energies(k), chain.energies(k + 1));
        total += Extended(chain.gap(k)) * (down * q[k + 1] - up * q[k]);
    }
    return static_cast<double>(total);
}

Eigen::VectorXd micro_temperatures(const model::ChainSpec& chain, const Populations& p) {
    require_matching(chain, p);
    Eigen::VectorXd temps(chain.n_bonds());
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const double lr = p.log_ratio(k);
        temps(k) = lr == 0.0 ? std::numeric_limits<double>::infinity() : -chain.gap(k) / lr;
    }
    return temps;
}

Eigen::VectorXd micro_temperatures_closed_form(const model::BathSpec& bath,
                                               const model::Couplings& couplings) {
    return ((couplings.rates.array() + bath.w_beta) / bath.w_beta * bath.temperature).matrix();
}

double effective_temperature(const model::ChainSpec& chain, const model::BathSpec& bath,
                             const Populations& p) {
    require_matching(chain, p);
    double weighted = 0.0;
    double norm = 0.0;
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const double gap = chain.gap(k);
        const double wbar = 0.5 * (bath_rate(bath, chain.energies(k + 1), chain.energies(k)) +
                                   bath_rate(bath, chain.energies(k), chain.energies(k + 1)));
        const double weight = static_cast<double>(bond_mean(p, k)) * wbar * gap * gap;
        weighted += weight * (-p.log_ratio(k) / gap);
        norm += weight;
    }
    if (norm == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return norm / weighted;
}

double harmonic_mean_temperature(const Eigen::VectorXd& temps) {
    if (temps.size() == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return static_cast<double>(temps.size()) / temps.cwiseInverse().sum();
}

double effective_temperature_closed_form(const model::BathSpec& bath, const model::Couplings& couplings) {
    const double mean = (bath.w_beta / (bath.w_beta + couplings.rates.array())).mean();
    return bath.temperature / mean;
}

Diffusion diffusion_coefficient(const model::ChainSpec& chain, const model::BathSpec& bath,
                                const model::Couplings& couplings) {
    require_matching(chain, couplings);
    const auto& w = couplings.rates.array();
    const double d2 = chain.delta0 * chain.delta0;
    const bool broken = (w == 0.0).any();
    if (bath.w_beta == 0.0 && broken) {
        throw DegenerateNetwork("diffusion_coefficient: zero connector with no bath shunt");
    }
    Diffusion d;
    d.d_lrt = w.mean() * d2;
    d.d_slrt = broken ? 0.0 : d2 / w.inverse().mean();
    const auto shunted = w + bath.w_beta;
    d.d_eff = (w / shunted).mean() / shunted.inverse().mean() * d2;
    return d;
}

double bath_diffusion(const model::ChainSpec& chain, const model::BathSpec& bath) {
    return bath.w_beta * chain.delta0 * chain.delta0;
}

double lrt_diffusion(const model::ChainSpec& chain, const model::Couplings& couplings, const Populations& p) {
    require_matching(chain, couplings);
    require_matching(chain, p);
    double total = 0.0;
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const double gap = chain.gap(k);
        total += couplings.rates(k) * gap * gap * (p(k) + p(k + 1));
    }
    return 0.5 * total;
}

AppendixCheck appendix_cross_check(const model::ChainSpec& chain, const model::BathSpec& bath,
                                   const model::Couplings& couplings, const Populations& p) {
    require_matching(chain, couplings);
    AppendixCheck out;
    out.cooling_exact = cooling_rate(chain, bath, p);
    out.ear_exact = ear(chain, couplings, p);
    for (int k = 0; k < chain.n_bonds(); ++k) {
        const double gap = chain.gap(k);
        const double pbar = static_cast<double>(bond_mean(p, k));
        const double wbar = 0.5 * (bath_rate(bath, chain.energies(k + 1), chain.energies(k)) +
                                   bath_rate(bath, chain.energies(k), chain.energies(k + 1)));
        const double inv_tk = -p.log_ratio(k) / gap;
        out.cooling_linearized += pbar * wbar * gap * gap * (1.0 / bath.temperature - inv_tk);
        out.ear_linearized += pbar * couplings.rates(k) * gap * gap * inv_tk;
    }
    auto rel = [](double approx, double exact) {
        return std::abs(approx - exact) / std::max(std::abs(exact), kBalanceFloor);
    };
    out.cooling_deviation = rel(out.cooling_linearized, out.cooling_exact);
    out.ear_deviation = rel(out.ear_linearized, out.ear_exact);
    return out;
}

double relative_balance(double ear_value, double cooling) {
    return std::abs(ear_value - cooling) / std::max(std::abs(ear_value), kBalanceFloor);
}

NessReport make_report(const model::ChainSpec& chain, const model::BathSpec& bath,
                       const model::Couplings& couplings, const Populations& p) {
    NessReport r;
    r.ear = ear(chain, couplings, p);
    r.cooling = cooling_rate(chain, bath, p);
    r.balance = relative_balance(r.ear, r.cooling);
    r.micro_temps = micro_temperatures(chain, p);
    r.t_sys = effective_temperature(chain, bath, p);
    r.t_sys_unweighted = harmonic_mean_temperature(r.micro_temps);
    r.t_sys_closed = effective_temperature_closed_form(bath, couplings);
    r.d_eff = r.ear * r.t_sys;
    try {
        const Diffusion d = diffusion_coefficient(chain, bath, couplings);
        r.d_eff_closed = d.d_eff;
        r.d_lrt = d.d_lrt;
        r.d_slrt = d.d_slrt;
    } catch (const DegenerateNetwork&) {
        r.d_eff_closed = r.d_lrt = r.d_slrt = std::numeric_limits<double>::quiet_NaN();
    }
    r.d_bath = bath_diffusion(chain, bath);
    return r;
}

} // namespace nesslab::kinetics
