/**
 * @file plot.hpp
 * @brief Minimal static SVG line charts for trajectories and gain traces.
 */
#pragma once

#include <string>
#include <vector>

namespace afw::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Same scale on both axes (top-down trajectories).
    bool equal_aspect = false;
};

/// Renders the panels stacked vertically into one SVG document.
std::string render_svg(const std::vector<Panel>& panels, double width = 720.0, double panel_height = 320.0);

}  // namespace afw::plot
