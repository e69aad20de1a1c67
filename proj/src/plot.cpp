/**
 * @file plot.cpp
 * @brief SVG emission.
 */
#include "afw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace afw::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Box {
    double x0, x1, y0, y1;
};

Box data_bounds(const Panel& p) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : p.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            b.x0 = std::min(b.x0, s.x[i]);
            b.x1 = std::max(b.x1, s.x[i]);
            b.y0 = std::min(b.y0, s.y[i]);
            b.y1 = std::max(b.y1, s.y[i]);
        }
    }
    if (!std::isfinite(b.x0)) b = {0.0, 1.0, 0.0, 1.0};
    if (b.x1 - b.x0 < 1e-12) { b.x0 -= 0.5; b.x1 += 0.5; }
    if (b.y1 - b.y0 < 1e-12) { b.y0 -= 0.5; b.y1 += 0.5; }
    const double py = 0.05 * (b.y1 - b.y0);
    b.y0 -= py;
    b.y1 += py;
    return b;
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, double width, double panel_height) {
    const double margin_l = 70, margin_r = 150, margin_t = 30, margin_b = 45;
    const double total_h = panel_height * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
           fmt("%.0f", total_h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& p = panels[pi];
        const double top = static_cast<double>(pi) * panel_height;
        double plot_w = width - margin_l - margin_r;
        double plot_h = panel_height - margin_t - margin_b;
        Box b = data_bounds(p);
        if (p.equal_aspect) {
            const double sx = plot_w / (b.x1 - b.x0);
            const double sy = plot_h / (b.y1 - b.y0);
            const double s = std::min(sx, sy);
            const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
            b = {cx - 0.5 * plot_w / s, cx + 0.5 * plot_w / s, cy - 0.5 * plot_h / s, cy + 0.5 * plot_h / s};
        }
        auto px = [&](double x) { return margin_l + (x - b.x0) / (b.x1 - b.x0) * plot_w; };
        auto py = [&](double y) { return top + margin_t + (b.y1 - y) / (b.y1 - b.y0) * plot_h; };

        out += "<text x=\"" + fmt("%.1f", margin_l) + "\" y=\"" + fmt("%.1f", top + 18) + "\" font-size=\"13\">" +
               escape(p.title) + "</text>\n";
        out += "<rect x=\"" + fmt("%.1f", margin_l) + "\" y=\"" + fmt("%.1f", top + margin_t) + "\" width=\"" +
               fmt("%.1f", plot_w) + "\" height=\"" + fmt("%.1f", plot_h) +
               "\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double xv = b.x0 + (b.x1 - b.x0) * t / 4.0;
            const double yv = b.y0 + (b.y1 - b.y0) * t / 4.0;
            out += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"" + fmt("%.1f", top + margin_t + plot_h + 14) +
                   "\" text-anchor=\"middle\">" + fmt("%.3g", xv) + "</text>\n";
            out += "<text x=\"" + fmt("%.1f", margin_l - 5) + "\" y=\"" + fmt("%.1f", py(yv) + 4) +
                   "\" text-anchor=\"end\">" + fmt("%.3g", yv) + "</text>\n";
        }
        out += "<text x=\"" + fmt("%.1f", margin_l + plot_w / 2) + "\" y=\"" +
               fmt("%.1f", top + panel_height - 8) + "\" text-anchor=\"middle\">" + escape(p.x_label) + "</text>\n";
        out += "<text x=\"14\" y=\"" + fmt("%.1f", top + margin_t + plot_h / 2) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + fmt("%.1f", top + margin_t + plot_h / 2) +
               ")\">" + escape(p.y_label) + "</text>\n";

        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const Series& s = p.series[si];
            const char* color = kPalette[si % std::size(kPalette)];
            std::string pts;
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                pts += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i])) + " ";
            }
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\"" +
                   (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"" + pts + "\"/>\n";
            const double ly = top + margin_t + 12 + 15 * static_cast<double>(si);
            out += "<line x1=\"" + fmt("%.1f", width - margin_r + 10) + "\" y1=\"" + fmt("%.1f", ly - 4) +
                   "\" x2=\"" + fmt("%.1f", width - margin_r + 30) + "\" y2=\"" + fmt("%.1f", ly - 4) +
                   "\" stroke=\"" + color + "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"5,3\"" : "") +
                   "/>\n";
            out += "<text x=\"" + fmt("%.1f", width - margin_r + 35) + "\" y=\"" + fmt("%.1f", ly) + "\">" +
                   escape(s.label) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace afw::plot
