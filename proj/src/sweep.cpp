#include "nesslab/sweep.hpp"

#include "nesslab/errors.hpp"
#include "nesslab/model.hpp"
#include "nesslab/quantum.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace nesslab::sweep {

namespace {

constexpr const char* kVersion = "0.3.0";

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

std::vector<std::string> split_values(const std::string& key, const std::string& raw) {
    std::vector<std::string> items;
    if (raw.empty()) {
        throw ConfigError("config: key '" + key + "' has no value");
    }
    if (raw.front() != '[') {
        items.push_back(unquote(raw));
        return items;
    }
    if (raw.back() != ']') {
        throw ConfigError("config: unterminated array for key '" + key + "'");
    }
    std::stringstream body(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(unquote(item));
        }
    }
    return items;
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + text + "'");
    }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a non-negative integer, got '" + text + "'");
    }
}

const std::string& single(const std::string& key, const std::vector<std::string>& values) {
    if (values.size() != 1) {
        throw ConfigError("config: key '" + key + "' expects a single value");
    }
    return values.front();
}

std::string join_numbers(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? ", " : "") + format_double(xs[i]);
    }
    return out + "]";
}

double median(std::vector<double> xs) {
    xs.erase(std::remove_if(xs.begin(), xs.end(), [](double x) { return std::isnan(x); }), xs.end());
    if (xs.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

struct InstanceResult {
    InstanceRecord record;
    Eigen::VectorXd populations;
    std::optional<quantum::EigenbasisAnalysis> eigen;
};

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out_ << header << '\n';
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }

    std::ofstream out_;
};

} // namespace

const char* to_string(Picture p) { return p == Picture::stochastic ? "stochastic" : "quantum"; }

Picture picture_from_string(const std::string& name) {
    if (name == "stochastic") {
        return Picture::stochastic;
    }
    if (name == "quantum") {
        return Picture::quantum;
    }
    throw ConfigError("unknown picture '" + name + "' (expected stochastic or quantum)");
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

SweepConfig SweepConfig::reference_default() {
    SweepConfig c;
    c.sigma_list = {0.0, 1.0, 2.0, model::DrivingSpec::sigma_for_sparsity(1e-5)};
    c.seeds = {1, 2, 3, 4, 5};
    c.pictures = {Picture::stochastic, Picture::quantum};
    c.snapshot_epsilon = {9.3};
    return c;
}

SweepConfig SweepConfig::from_string(const std::string& text) {
    SweepConfig c = reference_default();
    std::map<std::string, std::vector<std::string>> entries;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty() || line.front() == '[') {
            continue;  // blank, comment or section header
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        entries[key] = split_values(key, trim(line.substr(eq + 1)));
    }

    std::vector<double> sigmas;
    bool sigma_given = false;
    for (const auto& [key, values] : entries) {
        if (key == "n_levels") {
            c.n_levels = static_cast<int>(parse_unsigned(key, single(key, values)));
        } else if (key == "delta0") {
            c.delta0 = parse_number(key, single(key, values));
        } else if (key == "temperature_b") {
            c.temperature_b = parse_number(key, single(key, values));
        } else if (key == "w_beta") {
            c.w_beta = parse_number(key, single(key, values));
        } else if (key == "gamma_phi") {
            c.gamma_phi.clear();
            for (const auto& v : values) {
                c.gamma_phi.push_back(parse_number(key, v));
            }
        } else if (key == "epsilon") {
            c.epsilon_grid.clear();
            for (const auto& v : values) {
                c.epsilon_grid.push_back(parse_number(key, v));
            }
        } else if (key == "epsilon_points") {
            c.epsilon_points = static_cast<int>(parse_unsigned(key, single(key, values)));
        } else if (key == "sigma" || key == "sparsity") {
            sigma_given = true;
        } else if (key == "seeds") {
            c.seeds.clear();
            for (const auto& v : values) {
                c.seeds.push_back(parse_unsigned(key, v));
            }
        } else if (key == "seed_base") {
            c.seed_base = parse_unsigned(key, single(key, values));
        } else if (key == "pictures") {
            c.pictures.clear();
            for (const auto& v : values) {
                c.pictures.push_back(picture_from_string(v));
            }
        } else if (key == "snapshot_epsilon") {
            c.snapshot_epsilon.clear();
            for (const auto& v : values) {
                c.snapshot_epsilon.push_back(parse_number(key, v));
            }
        } else if (key == "out") {
            c.out_dir = single(key, values);
        } else if (key == "workers") {
            c.workers = static_cast<int>(parse_unsigned(key, single(key, values)));
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (sigma_given) {
        if (auto it = entries.find("sigma"); it != entries.end()) {
            for (const auto& v : it->second) {
                sigmas.push_back(parse_number("sigma", v));
            }
        }
        if (auto it = entries.find("sparsity"); it != entries.end()) {
            for (const auto& v : it->second) {
                try {
                    sigmas.push_back(model::DrivingSpec::sigma_for_sparsity(parse_number("sparsity", v)));
                } catch (const InvalidParameter& e) {
                    throw ConfigError(std::string("config: ") + e.what());
                }
            }
        }
        c.sigma_list = sigmas;
    }
    return c;
}

SweepConfig SweepConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

std::string SweepConfig::to_text() const {
    std::string out;
    out += fmt::format("n_levels = {}\n", n_levels);
    out += "delta0 = " + format_double(delta0) + "\n";
    out += "temperature_b = " + format_double(temperature_b) + "\n";
    out += "w_beta = " + format_double(w_beta) + "\n";
    out += "gamma_phi = " + join_numbers(gamma_phi) + "\n";
    if (!epsilon_grid.empty()) {
        out += "epsilon = " + join_numbers(epsilon_grid) + "\n";
    }
    out += fmt::format("epsilon_points = {}\n", epsilon_points);
    out += "sigma = " + join_numbers(sigma_list) + "\n";
    out += "seeds = [";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(seeds[i]);
    }
    out += "]\n";
    out += fmt::format("seed_base = {}\n", seed_base);
    out += "pictures = [";
    for (std::size_t i = 0; i < pictures.size(); ++i) {
        out += std::string(i ? ", " : "") + "\"" + to_string(pictures[i]) + "\"";
    }
    out += "]\n";
    out += "snapshot_epsilon = " + join_numbers(snapshot_epsilon) + "\n";
    out += "out = \"" + out_dir.string() + "\"\n";
    out += fmt::format("workers = {}\n", workers);
    return out;
}

std::vector<double> default_epsilon_grid(double w_beta, const std::vector<double>& sigma_list, int points) {
    const double sigma_max = sigma_list.empty() ? 0.0 : *std::max_element(sigma_list.begin(), sigma_list.end());
    const double s_min = std::exp(-sigma_max * sigma_max);
    const double lo = std::log(std::sqrt(w_beta) * 1e-3);
    const double hi = std::log(std::sqrt(w_beta / s_min) * 1e3);
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * i / (points - 1));
    }
    return grid;
}

std::vector<double> SweepConfig::resolved_epsilon_grid() const {
    if (!epsilon_grid.empty()) {
        return epsilon_grid;
    }
    return default_epsilon_grid(w_beta, sigma_list, epsilon_points);
}

void SweepConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (n_levels < 2) fail("n_levels must be >= 2");
    if (!(delta0 > 0.0)) fail("delta0 must be positive");
    if (!(temperature_b > 0.0) || !std::isfinite(temperature_b)) fail("temperature_b must be positive");
    if (!(w_beta > 0.0) || !std::isfinite(w_beta)) fail("w_beta must be positive");
    if (gamma_phi.empty()) fail("gamma_phi list is empty");
    for (double g : gamma_phi) {
        if (!(g >= 0.0) || !std::isfinite(g)) fail("gamma_phi values must be finite and >= 0");
    }
    if (sigma_list.empty()) fail("sigma list is empty");
    for (double s : sigma_list) {
        if (!(s >= 0.0) || !std::isfinite(s)) fail("sigma values must be finite and >= 0");
    }
    if (seeds.empty()) fail("seed list is empty");
    if (pictures.empty()) fail("no picture selected");
    if (epsilon_grid.empty() && epsilon_points < 2) fail("epsilon_points must be >= 2");
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        if (!(epsilon_grid[i] >= 0.0) || !std::isfinite(epsilon_grid[i])) fail("epsilon values must be >= 0");
        if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1])) fail("epsilon grid must be ascending");
    }
}

std::size_t RunManifest::failures() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const InstanceRecord& r) { return !r.ok; }));
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json doc;
    doc["version"] = version;
    doc["config"] = config_text;
    doc["seconds"] = seconds;
    doc["instance_count"] = records.size();
    doc["failure_count"] = failures();
    auto& list = doc["instances"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json item;
        item["index"] = r.index;
        item["picture"] = to_string(r.picture);
        item["gamma_phi"] = r.gamma_phi;
        item["sigma"] = r.sigma;
        item["seed"] = r.seed;
        item["epsilon"] = r.epsilon;
        item["ok"] = r.ok;
        if (!r.ok) {
            item["error"] = r.error;
        }
        item["snapshot"] = r.snapshot;
        item["residual"] = r.residual;
        item["balance"] = r.balance;
        if (r.picture == Picture::quantum) {
            item["trace_error"] = r.trace_error;
            item["hermiticity_error"] = r.hermiticity_error;
        }
        item["min_eigenvalue"] = r.min_eigenvalue;
        item["seconds"] = r.seconds;
        list.push_back(std::move(item));
    }
    doc["files"] = files;
    return doc.dump(2) + "\n";
}

RunManifest run_sweep(const SweepConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.out_dir);

    const model::ChainSpec chain = model::ChainSpec::uniform(config.n_levels, config.delta0);
    const std::vector<double> grid = config.resolved_epsilon_grid();
    const std::size_t n_sigma = config.sigma_list.size();
    const std::size_t n_seed = config.seeds.size();
    const std::size_t n_eps = grid.size();
    const std::size_t n_pic = config.pictures.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto bath_for = [&](double gamma_phi) {
        model::BathSpec bath;
        bath.temperature = config.temperature_b;
        bath.w_beta = config.w_beta;
        bath.gamma_phi = std::isnan(gamma_phi) ? 0.0 : gamma_phi;
        return bath;
    };
    const model::BathSpec base_bath = bath_for(0.0);

    std::vector<bool> snapshot(n_eps, false);
    for (double target : config.snapshot_epsilon) {
        std::size_t best = 0;
        for (std::size_t e = 1; e < n_eps; ++e) {
            if (std::abs(grid[e] - target) < std::abs(grid[best] - target)) {
                best = e;
            }
        }
        snapshot[best] = true;
    }

    // Unit-driving realization per (sigma, seed); every eps rescales it.
    std::vector<model::Couplings> unit(n_sigma * n_seed);
    std::vector<Eigen::MatrixXd> perturbation(n_sigma * n_seed);
    for (std::size_t si = 0; si < n_sigma; ++si) {
        for (std::size_t k = 0; k < n_seed; ++k) {
            const model::DrivingSpec d{1.0, config.sigma_list[si], config.effective_seed(k)};
            unit[si * n_seed + k] = model::sample_couplings(chain, d);
            perturbation[si * n_seed + k] = model::build_perturbation_matrix(chain, unit[si * n_seed + k], d);
        }
    }

    // Row order: picture, gamma_phi, sigma, seed, eps. The stochastic picture
    // has a single gamma_phi slot.
    std::vector<double> gammas_of_picture[2] = {{nan}, config.gamma_phi};
    auto gammas = [&](std::size_t pi) -> const std::vector<double>& {
        return gammas_of_picture[config.pictures[pi] == Picture::quantum ? 1 : 0];
    };
    std::vector<std::size_t> base(n_pic + 1, 0);
    for (std::size_t pi = 0; pi < n_pic; ++pi) {
        base[pi + 1] = base[pi] + gammas(pi).size() * n_sigma * n_seed * n_eps;
    }
    auto task_index = [&](std::size_t pi, std::size_t gi, std::size_t si, std::size_t k, std::size_t e) {
        return base[pi] + ((gi * n_sigma + si) * n_seed + k) * n_eps + e;
    };

    struct Task {
        std::size_t picture, gamma, sigma, seed, eps;
    };
    std::vector<Task> tasks;
    for (std::size_t pi = 0; pi < n_pic; ++pi) {
        for (std::size_t gi = 0; gi < gammas(pi).size(); ++gi) {
            for (std::size_t si = 0; si < n_sigma; ++si) {
                for (std::size_t k = 0; k < n_seed; ++k) {
                    for (std::size_t e = 0; e < n_eps; ++e) {
                        tasks.push_back({pi, gi, si, k, e});
                    }
                }
            }
        }
    }

    std::vector<InstanceResult> results(tasks.size());
    auto run_one = [&](std::size_t i) {
        const Task& t = tasks[i];
        InstanceResult& out = results[i];
        InstanceRecord& rec = out.record;
        rec.index = i;
        rec.picture = config.pictures[t.picture];
        rec.gamma_phi = gammas(t.picture)[t.gamma];
        rec.sigma = config.sigma_list[t.sigma];
        rec.seed = config.effective_seed(t.seed);
        rec.epsilon = grid[t.eps];
        rec.snapshot = snapshot[t.eps];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const model::DrivingSpec driving{rec.epsilon, rec.sigma, rec.seed};
            const model::BathSpec bath = bath_for(rec.gamma_phi);
            if (rec.picture == Picture::stochastic) {
                const model::Couplings couplings = model::sample_couplings(chain, driving);
                const kinetics::StochasticNess ness =
                    kinetics::solve_ness(kinetics::build_rate_matrix(chain, bath, couplings));
                rec.report = ness.report;
                rec.residual = ness.residual;
                rec.min_eigenvalue = ness.populations.values().minCoeff();
                out.populations = ness.populations.values();
            } else {
                const Eigen::MatrixXd& v = perturbation[t.sigma * n_seed + t.seed];
                const quantum::Superoperator s = quantum::build_superoperator(chain, bath, v, driving);
                const quantum::DensityMatrix rho = quantum::solve_quantum_ness(s);
                rec.report = quantum::quantum_ness_report(chain, bath, v, driving, rho);
                rec.residual = rho.residual;
                rec.trace_error = rho.trace_error();
                rec.hermiticity_error = rho.hermiticity_error();
                rec.min_eigenvalue = rho.min_eigenvalue();
                out.populations = rho.populations();
                if (rec.snapshot || t.eps + 1 == n_eps) {
                    out.eigen = quantum::eigenbasis_analysis(chain, v, rho.rho);
                }
            }
            rec.balance = rec.report.balance;
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers =
        std::min<std::size_t>(config.workers > 0 ? static_cast<std::size_t>(config.workers) : hw,
                              std::max<std::size_t>(1, tasks.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            run_one(i);
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_text = config.to_text();
    for (const auto& r : results) {
        manifest.records.push_back(r.record);
    }

    const auto dir = config.out_dir;
    const bool any_quantum =
        std::find(config.pictures.begin(), config.pictures.end(), Picture::quantum) != config.pictures.end();

    {
        CsvFile csv(dir / "ness.csv",
                    "picture,gamma_phi,sigma,seed,epsilon,ear,cooling,balance,t_sys,t_sys_unweighted,t_sys_closed,"
                    "d_eff,d_eff_closed,d_lrt,d_slrt,d_bath,residual,min_eigenvalue");
        for (const auto& r : results) {
            const auto& rec = r.record;
            if (!rec.ok) {
                continue;
            }
            const auto& rep = rec.report;
            csv.row(to_string(rec.picture), rec.gamma_phi, rec.sigma, rec.seed, rec.epsilon, rep.ear, rep.cooling,
                    rep.balance, rep.t_sys, rep.t_sys_unweighted, rep.t_sys_closed, rep.d_eff, rep.d_eff_closed,
                    rep.d_lrt, rep.d_slrt, rep.d_bath, rec.residual, rec.min_eigenvalue);
        }
        manifest.files.push_back("ness.csv");
    }

    if (std::any_of(snapshot.begin(), snapshot.end(), [](bool b) { return b; })) {
        CsvFile csv(dir / "populations.csv", "picture,gamma_phi,sigma,seed,epsilon,n,energy,population");
        for (const auto& r : results) {
            if (!r.record.ok || !r.record.snapshot) {
                continue;
            }
            for (int n = 0; n < chain.n_levels; ++n) {
                csv.row(to_string(r.record.picture), r.record.gamma_phi, r.record.sigma, r.record.seed,
                        r.record.epsilon, n, chain.energies(n), r.populations(n));
            }
        }
        manifest.files.push_back("populations.csv");

        if (any_quantum) {
            CsvFile eig(dir / "eigenbasis.csv", "gamma_phi,sigma,seed,epsilon,r,eigenvalue,mean_energy,weight");
            for (const auto& r : results) {
                if (!r.record.ok || !r.record.snapshot || !r.eigen) {
                    continue;
                }
                for (int k = 0; k < chain.n_levels; ++k) {
                    eig.row(r.record.gamma_phi, r.record.sigma, r.record.seed, r.record.epsilon, k,
                            r.eigen->eigenvalues(k), r.eigen->mean_energies(k), r.eigen->weights(k));
                }
            }
            manifest.files.push_back("eigenbasis.csv");
        }
    }

    // Seed medians per (picture, gamma_phi, sigma, eps).
    auto seed_median = [&](std::size_t pi, std::size_t gi, std::size_t si, std::size_t e, auto field) {
        std::vector<double> xs;
        for (std::size_t k = 0; k < n_seed; ++k) {
            const auto& rec = results[task_index(pi, gi, si, k, e)].record;
            if (rec.ok) {
                xs.push_back(field(rec.report));
            }
        }
        return median(xs);
    };
    const auto ear_of = [](const kinetics::NessReport& r) { return r.ear; };
    const auto tsys_of = [](const kinetics::NessReport& r) { return r.t_sys; };

    {
        CsvFile ear_csv(dir / "ear_vs_eps.csv", "picture,gamma_phi,sigma,seed,epsilon,ear,ear_median");
        CsvFile tsys_csv(dir / "tsys_vs_eps.csv",
                         "picture,gamma_phi,sigma,seed,epsilon,t_sys,t_sys_median,temperature_b");
        CsvFile heat_csv(dir / "tsys_heatmap.csv", "picture,gamma_phi,sigma,epsilon,t_sys_median,temperature_b");
        for (std::size_t pi = 0; pi < n_pic; ++pi) {
            const char* name = to_string(config.pictures[pi]);
            for (std::size_t gi = 0; gi < gammas(pi).size(); ++gi) {
                const double g = gammas(pi)[gi];
                for (std::size_t si = 0; si < n_sigma; ++si) {
                    for (std::size_t k = 0; k < n_seed; ++k) {
                        for (std::size_t e = 0; e < n_eps; ++e) {
                            const auto& rec = results[task_index(pi, gi, si, k, e)].record;
                            if (!rec.ok) {
                                continue;
                            }
                            ear_csv.row(name, g, rec.sigma, rec.seed, rec.epsilon, rec.report.ear,
                                        seed_median(pi, gi, si, e, ear_of));
                            tsys_csv.row(name, g, rec.sigma, rec.seed, rec.epsilon, rec.report.t_sys,
                                         seed_median(pi, gi, si, e, tsys_of), config.temperature_b);
                        }
                    }
                    for (std::size_t e = 0; e < n_eps; ++e) {
                        heat_csv.row(name, g, config.sigma_list[si], grid[e], seed_median(pi, gi, si, e, tsys_of),
                                     config.temperature_b);
                    }
                }
            }
        }
        manifest.files.push_back("ear_vs_eps.csv");
        manifest.files.push_back("tsys_vs_eps.csv");
        manifest.files.push_back("tsys_heatmap.csv");
    }

    {
        const double bath_limit = kinetics::bath_diffusion(chain, base_bath) / base_bath.temperature;
        CsvFile csv(dir / "crossovers.csv",
                    "sigma,seed,eps_lrt,eps_slrt,eps_lrt_ensemble,eps_slrt_ensemble,ear_bath_limit");
        for (std::size_t si = 0; si < n_sigma; ++si) {
            const double s = std::exp(-config.sigma_list[si] * config.sigma_list[si]);
            for (std::size_t k = 0; k < n_seed; ++k) {
                const Eigen::ArrayXd w = unit[si * n_seed + k].rates.array();
                const double mean = w.mean();
                const double harmonic = 1.0 / w.inverse().mean();
                csv.row(config.sigma_list[si], config.effective_seed(k), std::sqrt(config.w_beta / mean),
                        std::sqrt(config.w_beta / harmonic), std::sqrt(config.w_beta),
                        std::sqrt(config.w_beta / s), bath_limit);
            }
        }
        manifest.files.push_back("crossovers.csv");
    }

    if (any_quantum) {
        const auto pi = static_cast<std::size_t>(
            std::find(config.pictures.begin(), config.pictures.end(), Picture::quantum) - config.pictures.begin());
        CsvFile csv(dir / "tinf_vs_sigma.csv",
                    "gamma_phi,sigma,seed,t_inf,ear_inf,converged,t_mix,span_r,span_n,lower_bound,t_inf_median");
        for (std::size_t gi = 0; gi < config.gamma_phi.size(); ++gi) {
            const model::BathSpec bath = bath_for(config.gamma_phi[gi]);
            for (std::size_t si = 0; si < n_sigma; ++si) {
                std::vector<std::optional<std::pair<quantum::SaturationEstimate, double>>> rows(n_seed);
                std::vector<double> tinfs;
                for (std::size_t k = 0; k < n_seed; ++k) {
                    const auto& last = results[task_index(pi, gi, si, k, n_eps - 1)];
                    if (!last.record.ok || !last.eigen) {
                        continue;
                    }
                    std::vector<double> t_sys, ear;
                    for (std::size_t e = 0; e < n_eps; ++e) {
                        const auto& rec = results[task_index(pi, gi, si, k, e)].record;
                        if (rec.ok) {
                            t_sys.push_back(rec.report.t_sys);
                            ear.push_back(rec.report.ear);
                        }
                    }
                    const auto est =
                        quantum::estimate_saturation(chain, bath, t_sys, ear, last.eigen->spectral_span_r);
                    rows[k] = std::make_pair(est, last.eigen->t_mix.value_or(nan));
                    tinfs.push_back(est.t_inf);
                }
                const double med = median(tinfs);
                for (std::size_t k = 0; k < n_seed; ++k) {
                    if (!rows[k]) {
                        continue;
                    }
                    const auto& [est, t_mix] = *rows[k];
                    csv.row(config.gamma_phi[gi], config.sigma_list[si], config.effective_seed(k), est.t_inf,
                            est.ear_inf, est.converged, t_mix, est.span_r, est.span_n, est.lower_bound, med);
                }
            }
        }
        manifest.files.push_back("tinf_vs_sigma.csv");
    }

    manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.files.push_back("manifest.json");
    std::ofstream(dir / "manifest.json") << manifest.to_json();
    return manifest;
}

} // namespace nesslab::sweep
