#pragma once

#include <string>
#include <vector>

namespace reach {

/// A CSV file loaded as named text columns.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Numeric values of a column; rows whose cell does not parse are skipped.
    std::vector<double> numbers(const std::string& column) const;
};

CsvTable read_csv(const std::string& path);

struct PlotStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 420;
};

/// SVG histogram of `values` with `bins` equal-width bins.
std::string histogram_svg(const std::vector<double>& values, int bins, const PlotStyle& style);

/// SVG scatter plot of paired values.
std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const PlotStyle& style);

void write_text(const std::string& path, const std::string& text);

} // namespace reach
