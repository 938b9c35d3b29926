#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rdjc/io.hpp"

namespace rdjc {
namespace {

constexpr double width = 720;
constexpr double height = 480;
constexpr double left = 80;
constexpr double right = 180;
constexpr double top = 40;
constexpr double bottom = 60;

constexpr std::array palette{"#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd",
                             "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#bcbd22"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) {
            lo = 0;
            hi = 1;
        } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
            const double pad = std::max(0.5, 0.1 * std::abs(lo));
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_svg(const PlotSpec& plot) {
    const auto xmap = [&](double x) { return plot.log_x ? std::log10(x) : x; };
    const auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0);
    };

    Range xr, yr;
    for (const auto& s : plot.series)
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k)
            if (usable(s.x[k], s.y[k])) {
                xr.add(xmap(s.x[k]));
                yr.add(s.y[k]);
            }
    xr.settle();
    yr.settle();

    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const auto px = [&](double x) { return left + (xmap(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        width, height);
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       left + pw / 2, top / 2 + 5, escape(plot.title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                       left, top, pw, ph);

    for (int k = 0; k <= 4; ++k) {
        const double fx = xr.lo + (xr.hi - xr.lo) * k / 4;
        const double fy = yr.lo + (yr.hi - yr.lo) * k / 4;
        const double sx = left + pw * k / 4;
        const double sy = top + ph - ph * k / 4;
        const std::string xlabel = plot.log_x ? fmt::format("1e{:.2g}", fx) : fmt::format("{:.3g}", fx);
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", sx,
                           top + ph, top + ph + 5);
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", sx, top + ph + 20, xlabel);
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left - 5, sy,
                           left);
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", left - 8, sy + 4, fy);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, height - 15,
                       escape(plot.x_label));
    out += fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                       top + ph / 2, escape(plot.y_label));

    int legend_row = 0;
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& series = plot.series[s];
        const std::string color = series.color.empty() ? palette[s % palette.size()] : series.color;
        std::vector<std::string> runs(1);
        std::size_t points = 0;
        for (std::size_t k = 0; k < std::min(series.x.size(), series.y.size()); ++k) {
            if (!usable(series.x[k], series.y[k])) {
                if (!runs.back().empty()) runs.emplace_back();
                continue;
            }
            runs.back() += fmt::format("{:.2f},{:.2f} ", px(series.x[k]), py(series.y[k]));
            ++points;
        }
        for (const auto& run : runs) {
            if (run.empty()) continue;
            out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
                               run);
        }
        if (points == 1)
            for (std::size_t k = 0; k < std::min(series.x.size(), series.y.size()); ++k)
                if (usable(series.x[k], series.y[k]))
                    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                                       px(series.x[k]), py(series.y[k]), color);

        if (!series.in_legend) continue;
        const double ly = top + 10 + 18 * static_cast<double>(legend_row++);
        const double lx = width - right + 15;
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", lx,
                           ly, lx + 20, ly, color);
        out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 26, ly + 4, escape(series.label));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace rdjc
