#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "../errors.hpp"
#include "csv.hpp"

namespace spinstar::experiments {

/// Which CSV columns feed a heatmap.
struct PlotSpec {
    std::string x;
    std::string y;
    std::string value;
    std::string title;
};

namespace detail {

inline bool has(const CsvTable& t, const std::string& name) {
    return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
}

inline std::size_t distinct(const CsvTable& t, const std::string& name) {
    std::set<std::string> seen;
    const auto col = t.column(name);
    for (const auto& r : t.rows) seen.insert(r[col]);
    return seen.size();
}

} // namespace detail

/// Picks axes from the CSV schema produced by run_experiment.
inline PlotSpec default_plot_spec(const CsvTable& t) {
    using detail::has;
    if (has(t, "sqrtJ_rescaled")) return {"gs", "c", "sqrtJ_rescaled", "correlations with one unit"};
    if (has(t, "value_rescaled")) return {"f", "c", "value_rescaled", "correlations vs fraction"};
    if (has(t, "lhs_positive_part")) return {"gs", "theta", "lhs_signed", "distinguishability revival"};
    if (has(t, "lhs_minus_rhs")) return {"f", "theta", "lhs_minus_rhs", "lhs - bound"};
    if (has(t, "rhs_sum")) {
        const bool over_time = detail::distinct(t, "gs") > 1;
        return {over_time ? "gs" : "f", "theta", "rhs_sum", "bound (sum of terms)"};
    }
    if (has(t, "env_dist") && has(t, "corr1")) return {"f", "gs", "env_dist", "environment change"};
    throw FormatError("plot: unrecognized csv schema");
}

namespace detail {

// Sampled from the viridis colormap.
inline std::string color_for(double u) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
    }};
    u = std::clamp(std::isfinite(u) ? u : 1.0, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(u), stops.size() - 2);
    const double w = u - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] * (1 - w) + stops[i + 1][0] * w)),
                  static_cast<int>(std::lround(stops[i][1] * (1 - w) + stops[i + 1][1] * w)),
                  static_cast<int>(std::lround(stops[i][2] * (1 - w) + stops[i + 1][2] * w)));
    return buf;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace detail

/// Renders the CSV as an SVG heatmap next to it and returns the SVG path.
inline std::filesystem::path emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec) {
    const CsvTable t = read_csv(csv_path);
    if (t.rows.empty()) throw FormatError("plot: '" + csv_path.string() + "' has no data rows");
    const auto cx = t.column(spec.x), cy = t.column(spec.y), cv = t.column(spec.value);

    std::map<std::pair<double, double>, double> cells;
    std::set<double> xs, ys;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : t.rows) {
        const double x = parse_real_cell(r[cx]), y = parse_real_cell(r[cy]), v = parse_real_cell(r[cv]);
        xs.insert(x);
        ys.insert(y);
        cells[{x, y}] = v;
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0;
    const double span = hi > lo ? hi - lo : 1.0;

    constexpr double left = 70, top = 40, width = 480, height = 360, bar = 20;
    const double cw = width / static_cast<double>(xs.size()), ch = height / static_cast<double>(ys.size());
    std::map<double, std::size_t> xi, yi;
    for (double x : xs) xi.emplace(x, xi.size());
    for (double y : ys) yi.emplace(y, yi.size());

    auto svg_path = csv_path;
    svg_path.replace_extension(".svg");
    std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + svg_path.string() + "' for writing");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + width + 110 << "\" height=\""
        << top + height + 60 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << spec.title << " (" << spec.value << ")</text>\n";
    for (const auto& [key, v] : cells) {
        // y grows upwards
        const double px = left + static_cast<double>(xi[key.first]) * cw;
        const double py = top + height - static_cast<double>(yi[key.second] + 1) * ch;
        out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5
            << "\" fill=\"" << detail::color_for((v - lo) / span) << "\"/>\n";
    }
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left << "\" y=\"" << top + height + 18 << "\">" << detail::num(*xs.begin()) << "</text>\n";
    out << "<text x=\"" << left + width << "\" y=\"" << top + height + 18 << "\" text-anchor=\"end\">"
        << detail::num(*xs.rbegin()) << "</text>\n";
    out << "<text x=\"" << left + width / 2 << "\" y=\"" << top + height + 40 << "\" text-anchor=\"middle\">" << spec.x
        << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + height << "\" text-anchor=\"end\">" << detail::num(*ys.begin())
        << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << detail::num(*ys.rbegin())
        << "</text>\n";
    out << "<text x=\"" << left - 40 << "\" y=\"" << top + height / 2 << "\" text-anchor=\"middle\">" << spec.y
        << "</text>\n";

    const double bx = left + width + 20;
    constexpr int steps = 32;
    for (int i = 0; i < steps; ++i)
        out << "<rect x=\"" << bx << "\" y=\"" << top + height - (i + 1) * height / steps << "\" width=\"" << bar
            << "\" height=\"" << height / steps + 0.5 << "\" fill=\"" << detail::color_for((i + 0.5) / steps) << "\"/>\n";
    out << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + height << "\">" << detail::num(lo) << "</text>\n";
    out << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + 10 << "\">" << detail::num(hi) << "</text>\n";
    out << "</svg>\n";
    if (!out.flush()) throw IoError("write to '" + svg_path.string() + "' failed");
    return svg_path;
}

inline std::filesystem::path emit_plot(const std::filesystem::path& csv_path) {
    return emit_plot(csv_path, default_plot_spec(read_csv(csv_path)));
}

} // namespace spinstar::experiments
