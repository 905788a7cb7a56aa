// sweep.hpp: deterministic parameter sweeps over (picture, gamma_phi, sigma,
// seed, eps) with CSV datasets and a JSON run manifest.

#pragma once

#include "nesslab/kinetics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nesslab::sweep {

enum class Picture { stochastic, quantum };

const char* to_string(Picture p);
Picture picture_from_string(const std::string& name);

struct SweepConfig {
    int n_levels{25};
    double delta0{1.0};
    double temperature_b{10.0};
    double w_beta{0.1};
    /// Pure dephasing values of the quantum picture; the stochastic picture
    /// does not depend on it and runs once (gamma_phi reported as nan).
    std::vector<double> gamma_phi{0.0};

    /// Explicit driving grid; when empty a log-spaced grid is derived.
    std::vector<double> epsilon_grid;
    int epsilon_points{60};
    std::vector<double> sigma_list;
    std::vector<std::uint64_t> seeds;
    std::uint64_t seed_base{0};
    std::vector<Picture> pictures;
    /// Grid points closest to these eps values get population dumps.
    std::vector<double> snapshot_epsilon;

    std::filesystem::path out_dir{"ness-out"};
    int workers{0};  ///< 0: hardware concurrency

    /// N=25, delta0=1, T_B=10, w_beta=0.1, sigma in {0, 1, 2, sqrt(ln 1e5)},
    /// seeds 1..5, both pictures, 60 grid points, snapshot at eps = 9.3.
    static SweepConfig reference_default();

    /// Reads a `key = value` file ('#' comments, [a, b] arrays). Keys that are
    /// absent keep their reference_default() values. Throws ConfigError.
    static SweepConfig from_file(const std::filesystem::path& path);
    static SweepConfig from_string(const std::string& text);

    /// 60 log-spaced points from sqrt(w_beta)/1e3 to sqrt(w_beta/s_min)*1e3,
    /// s_min the smallest sparsity in the sigma list.
    std::vector<double> resolved_epsilon_grid() const;
    std::uint64_t effective_seed(std::size_t index) const { return seed_base + seeds.at(index); }

    /// Throws ConfigError on empty grids or out-of-domain parameters.
    void validate() const;
    /// Canonical text form of the configuration (round-trips through from_string).
    std::string to_text() const;
};

std::vector<double> default_epsilon_grid(double w_beta, const std::vector<double>& sigma_list, int points);

struct InstanceRecord {
    std::size_t index{0};
    Picture picture{Picture::stochastic};
    double gamma_phi{0.0};
    double sigma{0.0};
    std::uint64_t seed{0};
    double epsilon{0.0};
    bool ok{false};
    bool snapshot{false};
    std::string error;
    double residual{0.0};
    double balance{0.0};
    double trace_error{0.0};
    double hermiticity_error{0.0};
    double min_eigenvalue{0.0};
    double seconds{0.0};
    kinetics::NessReport report;
};

struct RunManifest {
    std::string config_text;
    std::string version;
    std::vector<InstanceRecord> records;
    std::vector<std::string> files;
    double seconds{0.0};

    std::size_t failures() const;
    std::string to_json() const;
};

/// Runs every instance, writes the CSV datasets into config.out_dir and
/// returns the manifest (also written as manifest.json). Failed instances are
/// recorded and skipped.
RunManifest run_sweep(const SweepConfig& config);

std::string format_double(double x);

} // namespace nesslab::sweep
