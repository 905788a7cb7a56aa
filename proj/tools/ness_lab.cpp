// ness-lab: run parameter sweeps, render figures, self-check the solvers.

#include "nesslab/check.hpp"
#include "nesslab/errors.hpp"
#include "nesslab/plot.hpp"
#include "nesslab/sweep.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfigError = 2;

std::vector<nesslab::sweep::Picture> parse_pictures(const std::string& list) {
    std::vector<nesslab::sweep::Picture> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(nesslab::sweep::picture_from_string(item));
        }
    }
    if (out.empty()) {
        throw nesslab::ConfigError("--pictures: empty list");
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven-chain steady states in the stochastic and quantum pictures"};
    app.require_subcommand(1);

    std::string config_path, out_dir, pictures;
    int workers = -1;
    long long seed_base = -1;
    auto* run = app.add_subcommand("run", "run a parameter sweep");
    run->add_option("--config", config_path, "sweep configuration file")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--workers", workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    run->add_option("--pictures", pictures, "comma-separated subset of stochastic,quantum");
    run->add_option("--seed-base", seed_base, "offset added to every seed")->check(CLI::NonNegativeNumber);

    std::string in_dir;
    auto* plot = app.add_subcommand("plot", "render SVG figures from a sweep directory");
    plot->add_option("--in", in_dir, "sweep output directory")->required();

    auto* check = app.add_subcommand("check", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    if (*run) {
        nesslab::sweep::SweepConfig config;
        try {
            config = nesslab::sweep::SweepConfig::from_file(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (workers >= 0) config.workers = workers;
            if (!pictures.empty()) config.pictures = parse_pictures(pictures);
            if (seed_base >= 0) config.seed_base = static_cast<std::uint64_t>(seed_base);
            config.validate();
        } catch (const nesslab::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kConfigError;
        }
        try {
            const auto manifest = nesslab::sweep::run_sweep(config);
            const std::size_t failed = manifest.failures();
            std::cout << fmt::format("{} instances, {} failed, {:.1f} s, output in {}\n", manifest.records.size(),
                                     failed, manifest.seconds, config.out_dir.string());
            for (const auto& r : manifest.records) {
                if (!r.ok) {
                    std::cerr << fmt::format("failed: {} sigma={} seed={} eps={}: {}\n",
                                             nesslab::sweep::to_string(r.picture), r.sigma, r.seed, r.epsilon,
                                             r.error);
                }
            }
            return failed == 0 ? kOk : kPartial;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kPartial;
        }
    }

    if (*plot) {
        try {
            const auto result = nesslab::plot::render_figures(in_dir);
            for (const auto& w : result.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            for (const auto& f : result.figures) {
                std::cout << "wrote " << (std::filesystem::path(in_dir) / f).string() << '\n';
            }
            return kOk;
        } catch (const nesslab::SchemaError& e) {
            std::cerr << "schema error: " << e.what() << '\n';
            return kConfigError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kConfigError;
        }
    }

    if (*check) {
        bool all = true;
        for (const auto& r : nesslab::check::run_checks()) {
            std::cout << fmt::format("[{}] {}: {}\n", r.ok ? "PASS" : "FAIL", r.name, r.detail);
            all = all && r.ok;
        }
        return all ? kOk : kPartial;
    }
    return kOk;
}
