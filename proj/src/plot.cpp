#include "reach/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reach/error.hpp"

namespace reach {

namespace {

constexpr double kMargin = 50.0;

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axes {
    double x0, x1, y0, y1;
    const PlotStyle& style;

    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (style.width - 2 * kMargin); }
    double py(double y) const { return style.height - kMargin - (y - y0) / (y1 - y0) * (style.height - 2 * kMargin); }
};

void open_svg(std::ostringstream& s, const Axes& a) {
    const auto& st = a.style;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\"" << st.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << st.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(st.title)
      << "</text>\n";
    const double left = kMargin, bottom = st.height - kMargin;
    s << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << st.width - kMargin << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << kMargin << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = a.x0 + (a.x1 - a.x0) * i / 4.0;
        const double yv = a.y0 + (a.y1 - a.y0) * i / 4.0;
        s << "<text x=\"" << num(a.px(xv)) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">" << num(xv)
          << "</text>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << num(a.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
          << "</text>\n";
    }
    s << "<text x=\"" << st.width / 2 << "\" y=\"" << st.height - 10 << "\" text-anchor=\"middle\">"
      << escape(st.x_label) << "</text>\n";
    s << "<text x=\"14\" y=\"" << st.height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << st.height / 2 << ")\">" << escape(st.y_label) << "</text>\n";
}

std::pair<double, double> range(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double a = *lo, b = *hi;
    if (a == b) {
        a -= 0.5;
        b += 0.5;
    }
    return {a, b};
}

} // namespace

std::vector<double> CsvTable::numbers(const std::string& column) const {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw InvalidArgument("CSV has no column '" + column + "'");
    const auto k = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& row : rows) {
        if (k >= row.size()) continue;
        double v = 0.0;
        const auto& cell = row[k];
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec == std::errc() && res.ptr == cell.data() + cell.size()) out.push_back(v);
    }
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + " is empty");
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

std::string histogram_svg(const std::vector<double>& values, int bins, const PlotStyle& style) {
    if (values.empty()) throw InvalidArgument("nothing to plot");
    if (bins < 1) throw InvalidArgument("bins must be >= 1");
    const auto [lo, hi] = range(values);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        auto b = static_cast<int>((v - lo) / (hi - lo) * bins);
        ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
    }
    const Axes a{lo, hi, 0.0, static_cast<double>(*std::max_element(counts.begin(), counts.end())), style};

    std::ostringstream s;
    open_svg(s, a);
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        const double x = a.px(lo + b * w);
        const double top = a.py(counts[static_cast<std::size_t>(b)]);
        s << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(a.px(lo + (b + 1) * w) - x)
          << "\" height=\"" << num(a.py(0) - top) << "\" fill=\"steelblue\" stroke=\"white\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const PlotStyle& style) {
    if (x.empty() || x.size() != y.size()) throw InvalidArgument("scatter needs paired, non-empty columns");
    const auto [x0, x1] = range(x);
    const auto [y0, y1] = range(y);
    const Axes a{x0, x1, y0, y1, style};
    std::ostringstream s;
    open_svg(s, a);
    for (std::size_t i = 0; i < x.size(); ++i)
        s << "<circle cx=\"" << num(a.px(x[i])) << "\" cy=\"" << num(a.py(y[i]))
          << "\" r=\"1.5\" fill=\"darkred\" fill-opacity=\"0.6\"/>\n";
    s << "</svg>\n";
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw FormatError("cannot write " + path);
}

} // namespace reach
