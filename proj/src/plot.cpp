#include "nesslab/plot.hpp"

#include "nesslab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace nesslab::plot {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double to_number(const std::string& s) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

struct Series {
    std::vector<double> x, y;
    std::string stroke;
    std::string dash;  // empty: solid
    std::string label;
    bool markers{false};
    bool connect{true};
};

struct Rule {
    double at;
    bool vertical;
    std::string stroke, dash;
};

class Axes {
public:
    Axes(std::string title, std::string xlabel, std::string ylabel, bool log_x, bool log_y)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), log_x_(log_x),
          log_y_(log_y) {}

    void add(Series s) { series_.push_back(std::move(s)); }
    void rule(double at, bool vertical, std::string stroke, std::string dash) {
        rules_.push_back({at, vertical, std::move(stroke), std::move(dash)});
    }

    std::string render(double ox, double oy, double w, double h) const {
        double x0 = inf_, x1 = -inf_, y0 = inf_, y1 = -inf_;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (usable(s.x[i], log_x_) && usable(s.y[i], log_y_)) {
                    x0 = std::min(x0, tx(s.x[i])), x1 = std::max(x1, tx(s.x[i]));
                    y0 = std::min(y0, ty(s.y[i])), y1 = std::max(y1, ty(s.y[i]));
                }
            }
        }
        for (const auto& r : rules_) {
            if (!r.vertical && usable(r.at, log_y_)) {
                y0 = std::min(y0, ty(r.at)), y1 = std::max(y1, ty(r.at));
            }
        }
        if (!(x0 <= x1)) x0 = 0, x1 = 1;
        if (!(y0 <= y1)) y0 = 0, y1 = 1;
        if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
        if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad, y1 += pad;

        const double left = ox + 70, right = ox + w - 20, top = oy + 35, bottom = oy + h - 50;
        auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (right - left); };
        auto py = [&](double v) { return bottom - (v - y0) / (y1 - y0) * (bottom - top); };

        std::string out;
        out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                           "stroke=\"#333\"/>\n",
                           left, top, right - left, bottom - top);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                           0.5 * (left + right), oy + 20, title_);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                           0.5 * (left + right), oy + h - 12, xlabel_);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\" "
                           "transform=\"rotate(-90 {:.1f} {:.1f})\">{}</text>\n",
                           ox + 18, 0.5 * (top + bottom), ox + 18, 0.5 * (top + bottom), ylabel_);
        for (int i = 0; i <= 4; ++i) {
            const double vx = x0 + (x1 - x0) * i / 4, vy = y0 + (y1 - y0) * i / 4;
            out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                               px(vx), bottom + 15, tick(vx, log_x_));
            out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"10\">{}</text>\n",
                               left - 4, py(vy) + 3, tick(vy, log_y_));
        }
        for (const auto& r : rules_) {
            if (r.vertical && usable(r.at, log_x_) && tx(r.at) >= x0 && tx(r.at) <= x1) {
                out += line(px(tx(r.at)), top, px(tx(r.at)), bottom, r.stroke, r.dash);
            } else if (!r.vertical && usable(r.at, log_y_)) {
                out += line(left, py(ty(r.at)), right, py(ty(r.at)), r.stroke, r.dash);
            }
        }
        double legend_y = top + 14;
        for (const auto& s : series_) {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (usable(s.x[i], log_x_) && usable(s.y[i], log_y_)) {
                    points += fmt::format("{:.2f},{:.2f} ", px(tx(s.x[i])), py(ty(s.y[i])));
                    if (s.markers) {
                        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                                           px(tx(s.x[i])), py(ty(s.y[i])), s.stroke);
                    }
                }
            }
            if (s.connect) {
                out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
                                   s.stroke, dash_attr(s.dash), points);
            }
            if (!s.label.empty()) {
                out += line(right - 150, legend_y - 4, right - 125, legend_y - 4, s.stroke, s.dash);
                out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\">{}</text>\n", right - 120,
                                   legend_y, s.label);
                legend_y += 13;
            }
        }
        return out;
    }

private:
    static constexpr double inf_ = std::numeric_limits<double>::infinity();

    static bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }
    double tx(double v) const { return log_x_ ? std::log10(v) : v; }
    double ty(double v) const { return log_y_ ? std::log10(v) : v; }
    static std::string tick(double v, bool log) {
        return log ? fmt::format("1e{:.1f}", v) : fmt::format("{:.3g}", v);
    }
    static std::string dash_attr(const std::string& dash) {
        return dash.empty() ? std::string{} : fmt::format(" stroke-dasharray=\"{}\"", dash);
    }
    static std::string line(double xa, double ya, double xb, double yb, const std::string& stroke,
                            const std::string& dash) {
        return fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                           "stroke-width=\"1.2\"{}/>\n",
                           xa, ya, xb, yb, stroke, dash_attr(dash));
    }

    std::string title_, xlabel_, ylabel_;
    bool log_x_, log_y_;
    std::vector<Series> series_;
    std::vector<Rule> rules_;
};

std::string document(double w, double h, const std::string& body) {
    return fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
                       "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n"
                       "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{2}</svg>\n",
                       w, h, body);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

std::string dash_for(const std::string& picture) { return picture.rfind("quantum", 0) == 0 ? "6,4" : ""; }

std::string sigma_label(double sigma) { return fmt::format("sigma={:.3g}", sigma); }

struct Group {
    std::string picture;  // with the dephasing value appended when set
    double sigma;
    std::vector<std::size_t> rows;
};

std::string panel_name(const std::string& picture, const std::string& gamma_phi) {
    const double g = to_number(gamma_phi);
    return std::isnan(g) || g == 0.0 ? picture : fmt::format("{} gamma_phi={:.3g}", picture, g);
}

// Index rows by (picture, gamma_phi, sigma) preserving first appearance.
std::vector<Group> group_rows(const CsvTable& t) {
    const auto pictures = t.strings("picture");
    const auto gammas = t.strings("gamma_phi");
    const auto sigmas = t.numbers("sigma");
    std::vector<Group> groups;
    for (std::size_t i = 0; i < pictures.size(); ++i) {
        const std::string name = panel_name(pictures[i], gammas[i]);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return g.picture == name && g.sigma == sigmas[i]; });
        if (it == groups.end()) {
            groups.push_back({name, sigmas[i], {}});
            it = groups.end() - 1;
        }
        it->rows.push_back(i);
    }
    return groups;
}

std::size_t sigma_rank(const std::vector<double>& sigmas, double s) {
    std::set<double> unique(sigmas.begin(), sigmas.end());
    return static_cast<std::size_t>(std::distance(unique.begin(), unique.find(s)));
}

// One curve per (picture, sigma) from the seed-median column, taken at the
// first seed's rows (medians repeat across seeds).
void median_curves(Axes& axes, const CsvTable& t, const std::string& median_col) {
    const auto sigmas = t.numbers("sigma");
    const auto seeds = t.strings("seed");
    const auto eps = t.numbers("epsilon");
    const auto med = t.numbers(median_col);
    for (const auto& g : group_rows(t)) {
        Series s;
        s.stroke = colour(sigma_rank(sigmas, g.sigma));
        s.dash = dash_for(g.picture);
        s.label = g.picture + " " + sigma_label(g.sigma);
        const std::string first_seed = seeds[g.rows.front()];
        for (std::size_t r : g.rows) {
            if (seeds[r] == first_seed) {
                s.x.push_back(eps[r]);
                s.y.push_back(med[r]);
            }
        }
        axes.add(std::move(s));
    }
}

std::optional<CsvTable> optional_table(const std::filesystem::path& path, PlotResult& result) {
    if (!std::filesystem::exists(path)) {
        result.warnings.push_back("missing dataset " + path.filename().string() + ", figure skipped");
        return std::nullopt;
    }
    return CsvTable::read(path);
}

void fig_populations(const std::filesystem::path& dir, PlotResult& result) {
    auto table = optional_table(dir / "populations.csv", result);
    if (!table || table->empty()) {
        return;
    }
    const auto sigmas = table->numbers("sigma");
    const auto seeds = table->strings("seed");
    const auto eps = table->numbers("epsilon");
    const auto energy = table->numbers("energy");
    const auto pop = table->numbers("population");
    Axes axes(fmt::format("Steady-state populations, eps={:.3g}, seed {}", eps.front(), seeds.front()),
              "E_n", "p_n", false, true);
    for (const auto& g : group_rows(*table)) {
        Series s;
        s.stroke = colour(sigma_rank(sigmas, g.sigma));
        s.dash = dash_for(g.picture);
        s.label = g.picture + " " + sigma_label(g.sigma);
        s.markers = true;
        for (std::size_t r : g.rows) {
            if (seeds[r] == seeds.front() && eps[r] == eps.front()) {
                s.x.push_back(energy[r]);
                s.y.push_back(pop[r]);
            }
        }
        axes.add(std::move(s));
    }
    write_file(dir / "fig2_populations.svg", document(720, 480, axes.render(0, 0, 720, 480)));
    result.figures.push_back("fig2_populations.svg");
}

void fig_ear(const std::filesystem::path& dir, PlotResult& result) {
    const auto table = CsvTable::read(dir / "ear_vs_eps.csv");
    Axes axes("Energy absorption rate (seed median)", "eps", "EAR", true, true);
    median_curves(axes, table, "ear_median");
    if (std::filesystem::exists(dir / "crossovers.csv")) {
        const auto cross = CsvTable::read(dir / "crossovers.csv");
        const auto sigmas = cross.numbers("sigma");
        const auto lrt = cross.numbers("eps_lrt_ensemble");
        const auto slrt = cross.numbers("eps_slrt_ensemble");
        const auto limit = cross.numbers("ear_bath_limit");
        std::set<double> seen;
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            if (seen.insert(sigmas[i]).second) {
                const auto c = colour(sigma_rank(sigmas, sigmas[i]));
                axes.rule(lrt[i], true, c, "2,3");
                axes.rule(slrt[i], true, c, "8,3");
            }
        }
        if (!limit.empty()) {
            axes.rule(limit.front(), false, "#555", "2,3");
        }
    }
    write_file(dir / "fig3_ear.svg", document(720, 480, axes.render(0, 0, 720, 480)));
    result.figures.push_back("fig3_ear.svg");
}

void fig_tsys(const std::filesystem::path& dir, PlotResult& result) {
    const auto table = CsvTable::read(dir / "tsys_vs_eps.csv");
    Axes axes("System temperature (seed median)", "eps", "T_sys", true, false);
    median_curves(axes, table, "t_sys_median");
    const auto tb = table.numbers("temperature_b");
    axes.rule(tb.front(), false, "#555", "2,3");
    write_file(dir / "fig4_tsys.svg", document(720, 480, axes.render(0, 0, 720, 480)));
    result.figures.push_back("fig4_tsys.svg");
}

std::string heat_colour(double t, double t_b) {
    if (!std::isfinite(t)) {
        return "#cccccc";
    }
    const double f = std::clamp((t - t_b) / (4.0 * t_b), 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + f * 200));
    const int b = static_cast<int>(std::lround(220 - f * 190));
    return fmt::format("#{:02x}{:02x}{:02x}", r, 50, b);
}

void fig_heatmap(const std::filesystem::path& dir, PlotResult& result) {
    const auto table = CsvTable::read(dir / "tsys_heatmap.csv");
    const auto raw_pictures = table.strings("picture");
    const auto raw_gammas = table.strings("gamma_phi");
    std::vector<std::string> pictures;
    for (std::size_t i = 0; i < raw_pictures.size(); ++i) {
        pictures.push_back(panel_name(raw_pictures[i], raw_gammas[i]));
    }
    const auto sigmas = table.numbers("sigma");
    const auto eps = table.numbers("epsilon");
    const auto t_sys = table.numbers("t_sys_median");
    const double t_b = table.numbers("temperature_b").front();
    std::vector<std::string> panels;
    for (const auto& p : pictures) {
        if (std::find(panels.begin(), panels.end(), p) == panels.end()) panels.push_back(p);
    }
    const std::set<double> sigma_set(sigmas.begin(), sigmas.end());
    const std::set<double> eps_set(eps.begin(), eps.end());
    const std::vector<double> sigma_axis(sigma_set.begin(), sigma_set.end());
    const std::vector<double> eps_axis(eps_set.begin(), eps_set.end());
    const double panel_w = 480, h = 360;
    std::string body;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const double ox = p * panel_w;
        const double left = ox + 70, right = ox + panel_w - 20, top = 35, bottom = h - 50;
        const double cw = (right - left) / eps_axis.size(), ch = (bottom - top) / sigma_axis.size();
        body += fmt::format("<text x=\"{:.1f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">T_sys, {}</text>\n",
                            0.5 * (left + right), panels[p]);
        for (std::size_t i = 0; i < pictures.size(); ++i) {
            if (pictures[i] != panels[p]) continue;
            const auto ei = std::distance(eps_axis.begin(), std::find(eps_axis.begin(), eps_axis.end(), eps[i]));
            const auto si =
                std::distance(sigma_axis.begin(), std::find(sigma_axis.begin(), sigma_axis.end(), sigmas[i]));
            body += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                                left + ei * cw, bottom - (si + 1) * ch, cw + 0.3, ch + 0.3,
                                heat_colour(t_sys[i], t_b));
        }
        for (std::size_t si = 0; si < sigma_axis.size(); ++si) {
            body += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"10\">{:.3g}</text>\n",
                                left - 4, bottom - (si + 0.5) * ch + 3, sigma_axis[si]);
        }
        for (std::size_t e = 0; e < eps_axis.size(); e += std::max<std::size_t>(1, eps_axis.size() / 5)) {
            body += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{:.2g}</text>\n",
                                left + (e + 0.5) * cw, bottom + 15, eps_axis[e]);
        }
        body += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\">eps</text>\n",
                            0.5 * (left + right), h - 12);
        body += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\" "
                            "transform=\"rotate(-90 {:.1f} {:.1f})\">sigma</text>\n",
                            ox + 18, 0.5 * (top + bottom), ox + 18, 0.5 * (top + bottom));
    }
    const double legend_y = h + 10;
    for (int i = 0; i <= 20; ++i) {
        const double t = t_b + 4.0 * t_b * i / 20;
        body += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"15\" height=\"12\" fill=\"{}\"/>\n",
                            70 + 15.0 * i, legend_y, heat_colour(t, t_b));
    }
    body += fmt::format("<text x=\"70\" y=\"{:.1f}\" font-size=\"10\">{:.3g}</text>\n", legend_y + 26, t_b);
    body += fmt::format("<text x=\"385\" y=\"{:.1f}\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
                        legend_y + 26, 5 * t_b);
    write_file(dir / "fig5_heatmap.svg", document(panel_w * std::max<std::size_t>(1, panels.size()), h + 50, body));
    result.figures.push_back("fig5_heatmap.svg");
}

void fig_tinf(const std::filesystem::path& dir, PlotResult& result, double t_b) {
    auto table = optional_table(dir / "tinf_vs_sigma.csv", result);
    if (!table || table->empty()) {
        return;
    }
    // One dephasing value per figure: the first one in the file.
    const auto gammas = table->strings("gamma_phi");
    std::vector<double> sigmas, t_inf, bound, med;
    {
        const auto all_sigma = table->numbers("sigma");
        const auto all_tinf = table->numbers("t_inf");
        const auto all_bound = table->numbers("lower_bound");
        const auto all_med = table->numbers("t_inf_median");
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            if (gammas[i] == gammas.front()) {
                sigmas.push_back(all_sigma[i]);
                t_inf.push_back(all_tinf[i]);
                bound.push_back(all_bound[i]);
                med.push_back(all_med[i]);
            }
        }
    }
    Axes axes("Saturation temperature of the quantum picture", "sigma", "T_inf", false, true);
    Series seeds{sigmas, t_inf, "#999999", "", "per seed", true, false};
    Series median_line, bound_line;
    median_line.stroke = "#1f77b4", median_line.label = "median";
    bound_line.stroke = "#d62728", bound_line.dash = "6,4", bound_line.label = "lower bound";
    std::set<double> seen;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (seen.insert(sigmas[i]).second) {
            median_line.x.push_back(sigmas[i]), median_line.y.push_back(med[i]);
            std::vector<double> b;
            for (std::size_t j = 0; j < sigmas.size(); ++j) {
                if (sigmas[j] == sigmas[i] && std::isfinite(bound[j])) b.push_back(bound[j]);
            }
            std::sort(b.begin(), b.end());
            bound_line.x.push_back(sigmas[i]);
            bound_line.y.push_back(b.empty() ? std::numeric_limits<double>::quiet_NaN() : b[b.size() / 2]);
        }
    }
    axes.add(std::move(seeds));
    axes.add(std::move(median_line));
    axes.add(std::move(bound_line));
    if (std::isfinite(t_b)) {
        axes.rule(t_b, false, "#555", "2,3");
    }
    write_file(dir / "fig6_tinf.svg", document(720, 480, axes.render(0, 0, 720, 480)));
    result.figures.push_back("fig6_tinf.svg");
}

} // namespace

CsvTable CsvTable::parse(const std::string& text, const std::string& source) {
    CsvTable t;
    t.source_ = source;
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(source + ": empty file, no header row", "");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.header_ = split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.header_.size()) {
            throw SchemaError(fmt::format("{}: row {} has {} fields, header has {}", source, t.rows_.size() + 2,
                                          cells.size(), t.header_.size()),
                              "");
        }
        t.rows_.push_back(std::move(cells));
    }
    return t;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.filename().string());
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
        throw SchemaError(source_ + ": missing column '" + name + "'", name);
    }
    return static_cast<std::size_t>(it - header_.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(to_number(r[c]));
    return out;
}

std::vector<std::string> CsvTable::strings(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[c]);
    return out;
}

PlotResult render_figures(const std::filesystem::path& dir) {
    PlotResult result;
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir.string());
    }
    const auto ness = CsvTable::read(dir / "ness.csv");
    // Validate the schema up front even when there is nothing to draw.
    for (const char* col : {"picture", "sigma", "seed", "epsilon", "ear", "t_sys"}) {
        ness.column(col);
    }
    if (ness.empty()) {
        result.warnings.push_back("sweep contains no successful instances, no figures written");
        return result;
    }
    fig_populations(dir, result);
    fig_ear(dir, result);
    fig_tsys(dir, result);
    fig_heatmap(dir, result);
    const auto tb = CsvTable::read(dir / "tsys_vs_eps.csv").numbers("temperature_b");
    fig_tinf(dir, result, tb.empty() ? std::numeric_limits<double>::quiet_NaN() : tb.front());
    return result;
}

} // namespace nesslab::plot
