#include "sqg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sqg/common.hpp"

namespace sqg {
namespace {

constexpr int kW = 720, kH = 480;
constexpr int kLeft = 70, kRight = 30, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

}  // namespace

void LinePlot::write(const std::filesystem::path& path) const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_x && s.x[i] <= 0.0) continue;
            if (log_y && s.y[i] <= 0.0) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double v) {
        return kLeft + (tx(v) - xmin) / (xmax - xmin) * (kW - kLeft - kRight);
    };
    auto py = [&](double v) {
        return kH - kBottom - (ty(v) - ymin) / (ymax - ymin) * (kH - kTop - kBottom);
    };

    std::ofstream os(path);
    if (!os) throw io_error("cannot write plot: " + path.string());
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
       << "' font-family='sans-serif' font-size='12'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='15'>" << title
       << "</text>\n";
    // axes
    os << "<line x1='" << kLeft << "' y1='" << kH - kBottom << "' x2='" << kW - kRight << "' y2='"
       << kH - kBottom << "' stroke='black'/>\n";
    os << "<line x1='" << kLeft << "' y1='" << kTop << "' x2='" << kLeft << "' y2='"
       << kH - kBottom << "' stroke='black'/>\n";
    // ticks
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        const double sx = kLeft + double(kW - kLeft - kRight) * i / 5.0;
        const double sy = kH - kBottom - double(kH - kTop - kBottom) * i / 5.0;
        os << "<line x1='" << sx << "' y1='" << kH - kBottom << "' x2='" << sx << "' y2='"
           << kH - kBottom + 4 << "' stroke='black'/>\n";
        os << "<text x='" << sx << "' y='" << kH - kBottom + 17 << "' text-anchor='middle'>"
           << (log_x ? "1e" + fmt(fx) : fmt(fx)) << "</text>\n";
        os << "<line x1='" << kLeft - 4 << "' y1='" << sy << "' x2='" << kLeft << "' y2='" << sy
           << "' stroke='black'/>\n";
        os << "<text x='" << kLeft - 7 << "' y='" << sy + 4 << "' text-anchor='end'>"
           << (log_y ? "1e" + fmt(fy) : fmt(fy)) << "</text>\n";
    }
    os << "<text x='" << (kLeft + kW - kRight) / 2 << "' y='" << kH - 10
       << "' text-anchor='middle'>" << xlabel << "</text>\n";
    os << "<text x='18' y='" << (kTop + kH - kBottom) / 2
       << "' text-anchor='middle' transform='rotate(-90 18 " << (kTop + kH - kBottom) / 2 << ")'>"
       << ylabel << "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 6];
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        os << "'/>\n";
        os << "<text x='" << kW - kRight - 8 << "' y='" << kTop + 16 + 14 * ci
           << "' text-anchor='end' fill='" << color << "'>" << s.label << "</text>\n";
        ++ci;
    }
    if (!annotation.empty())
        os << "<text x='" << kLeft + 8 << "' y='" << kTop + 14 << "'>" << annotation
           << "</text>\n";
    os << "</svg>\n";
    if (!os) throw io_error("write failed: " + path.string());
}

}  // namespace sqg
