#include "duio/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "duio/errors.hpp"

namespace duio {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    const double width = 760, height = 420;
    const double ml = 70, mr = 150, mt = 40, mb = 50;

    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo))
        throw ValidationError("svg plot: no data");
    yr.include(yr.lo - 0.05 * yr.span());
    yr.include(yr.hi + 0.05 * yr.span());

    const auto px = [&](double x) { return ml + (x - xr.lo) / xr.span() * (width - ml - mr); };
    const auto py = [&](double y) { return height - mb - (y - yr.lo) / yr.span() * (height - mt - mb); };

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open SVG output file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-size=\"15\" font-family=\"sans-serif\">" << title << "</text>\n";

    // axes with 5 ticks each
    out << "<g font-size=\"11\" font-family=\"sans-serif\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xr.lo + k / 5.0 * xr.span();
        const double yv = yr.lo + k / 5.0 * yr.span();
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << py(yr.lo) << "\" x2=\"" << px(xv)
            << "\" y2=\"" << py(yr.hi) << "\" stroke=\"#dddddd\"/>\n"
            << "<line x1=\"" << px(xr.lo) << "\" y1=\"" << py(yv) << "\" x2=\"" << px(xr.hi)
            << "\" y2=\"" << py(yv) << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\">" << std::round(xv * 100) / 100 << "</text>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << std::round(yv * 100) / 100 << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"16\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << height / 2 << ")\">"
        << y_label << "</text>\n</g>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
        std::ostringstream pts;
        const std::size_t n = series[s].x.size();
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        for (std::size_t k = 0; k < n; k += stride)
            pts << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.4\" points=\"" << pts.str() << "\"/>\n"
            << "<text x=\"" << width - mr + 10 << "\" y=\"" << mt + 16 * s + 10
            << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace duio
