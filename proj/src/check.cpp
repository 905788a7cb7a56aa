#include "nesslab/check.hpp"

#include "nesslab/kinetics.hpp"
#include "nesslab/model.hpp"
#include "nesslab/quantum.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>

namespace nesslab::check {

namespace {

using model::BathSpec;
using model::ChainSpec;
using model::DrivingSpec;

CheckResult expect_below(std::string name, double value, double limit) {
    return {std::move(name), value <= limit, fmt::format("{:.3e} (limit {:.1e})", value, limit)};
}

double max_relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return ((a - b).array().abs() / b.array().abs()).maxCoeff();
}

} // namespace

std::vector<CheckResult> run_checks() {
    std::vector<CheckResult> out;
    const ChainSpec chain = ChainSpec::uniform(25, 1.0);
    const BathSpec bath;

    auto guarded = [&](const std::string& name, const std::function<CheckResult()>& body) {
        try {
            out.push_back(body());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    guarded("undriven chain relaxes to the canonical state", [&] {
        const auto c = model::sample_couplings(chain, DrivingSpec{0.0, 1.0, 1});
        const auto ness = kinetics::solve_ness(kinetics::build_rate_matrix(chain, bath, c));
        return expect_below("undriven chain relaxes to the canonical state",
                            max_relative(ness.populations.values(),
                                         model::canonical_distribution(chain, bath.temperature)),
                            1e-12);
    });

    guarded("stochastic energy balance", [&] {
        double worst = 0.0;
        for (double eps : {1e-3, 1.0, 1e2, 1e5}) {
            const auto c = model::sample_couplings(chain, DrivingSpec{eps, 2.0, 3});
            const auto ness = kinetics::solve_ness(kinetics::build_rate_matrix(chain, bath, c));
            worst = std::max(worst, ness.report.balance);
        }
        return expect_below("stochastic energy balance", worst, 1e-10);
    });

    guarded("stochastic heating above the bath", [&] {
        const auto c = model::sample_couplings(chain, DrivingSpec{3.0, 1.0, 2});
        const auto ness = kinetics::solve_ness(kinetics::build_rate_matrix(chain, bath, c));
        return CheckResult{"stochastic heating above the bath", ness.report.t_sys > bath.temperature &&
                                                                     ness.report.ear > 0.0,
                           fmt::format("T_sys = {:.6g}, EAR = {:.6g}", ness.report.t_sys, ness.report.ear)};
    });

    guarded("superoperator preserves the trace", [&] {
        const DrivingSpec d{1.0, 1.0, 4};
        const auto v = model::build_perturbation_matrix(chain, model::sample_couplings(chain, d), d);
        const auto s = quantum::build_superoperator(chain, bath, v, d);
        double worst = 0.0;
        for (int col = 0; col < s.matrix.cols(); ++col) {
            std::complex<double> sum = 0.0;
            for (int n = 0; n < chain.n_levels; ++n) {
                sum += s.matrix(quantum::vec_index(n, n, chain.n_levels), col);
            }
            worst = std::max(worst, std::abs(sum));
        }
        return expect_below("superoperator preserves the trace", worst, 1e-12);
    });

    guarded("quantum steady state is a density matrix", [&] {
        const DrivingSpec d{1.0, 1.0, 4};
        const auto v = model::build_perturbation_matrix(chain, model::sample_couplings(chain, d), d);
        const auto rho = quantum::solve_quantum_ness(quantum::build_superoperator(chain, bath, v, d));
        const double err = std::max({rho.trace_error(), rho.hermiticity_error(), -rho.min_eigenvalue()});
        return expect_below("quantum steady state is a density matrix", err, 1e-10);
    });

    guarded("weak quantum driving keeps the canonical state", [&] {
        const DrivingSpec unit{1.0, 1.0, 5};
        const auto v = model::build_perturbation_matrix(chain, model::sample_couplings(chain, unit), unit);
        const DrivingSpec weak{1e-5, 1.0, 5};
        const auto rho = quantum::solve_quantum_ness(quantum::build_superoperator(chain, bath, v, weak));
        return expect_below("weak quantum driving keeps the canonical state",
                            max_relative(rho.populations(), model::canonical_distribution(chain, bath.temperature)),
                            1e-6);
    });

    guarded("coupling stream is reproducible", [&] {
        const auto a = model::sample_couplings(chain, DrivingSpec{2.0, 1.5, 11});
        const auto b = model::sample_couplings(chain, DrivingSpec{2.0, 1.5, 11});
        return CheckResult{"coupling stream is reproducible", a.rates == b.rates,
                           a.rates == b.rates ? "identical" : "differs"};
    });

    return out;
}

} // namespace nesslab::check
