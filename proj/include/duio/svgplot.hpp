#pragma once

#include <string>
#include <vector>

namespace duio {

// Minimal self-contained SVG line plots; one file per figure, one polyline
// per named series.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

}  // namespace duio
