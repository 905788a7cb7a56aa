// plot.hpp: SVG figures rendered from the CSV datasets of a sweep.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nesslab::plot {

/// A CSV file held as strings. Lookups by column name throw SchemaError.
class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path);
    static CsvTable parse(const std::string& text, const std::string& source = "<memory>");

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    std::size_t column(const std::string& name) const;
    std::vector<double> numbers(const std::string& name) const;
    std::vector<std::string> strings(const std::string& name) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct PlotResult {
    std::vector<std::string> figures;   ///< file names written into the input directory
    std::vector<std::string> warnings;
};

/// Reads the datasets in `dir` and writes fig2..fig6 SVGs next to them.
/// Figures whose dataset is absent are skipped with a warning; an empty sweep
/// yields no figures. Throws SchemaError when a required column is missing.
PlotResult render_figures(const std::filesystem::path& dir);

} // namespace nesslab::plot
