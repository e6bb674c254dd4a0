// Minimal self-contained SVG line charts for run artifacts.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sqg {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct LinePlot {
    std::string title, xlabel, ylabel;
    bool log_x = false, log_y = false;
    std::string annotation;  // drawn in the top-right corner (slope fits etc.)
    std::vector<PlotSeries> series;

    void write(const std::filesystem::path& path) const;
};

}  // namespace sqg
