#include "lle/plot.hpp"

#include "lle/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace lle::plot {

namespace {

struct Color {
    double r, g, b;
};

// Coarse viridis anchors, linearly interpolated.
constexpr std::array<Color, 6> kRamp = {{
    {0.267, 0.005, 0.329},
    {0.283, 0.141, 0.458},
    {0.254, 0.265, 0.530},
    {0.164, 0.471, 0.558},
    {0.478, 0.821, 0.318},
    {0.993, 0.906, 0.144},
}};

std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * (kRamp.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, kRamp.size() - 1);
    const double f = pos - static_cast<double>(lo);
    auto mix = [&](double a, double b) { return a + f * (b - a); };
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(mix(kRamp[lo].r, kRamp[hi].r) * 255)),
                  static_cast<int>(std::lround(mix(kRamp[lo].g, kRamp[hi].g) * 255)),
                  static_cast<int>(std::lround(mix(kRamp[lo].b, kRamp[hi].b) * 255)));
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void render_scatter(const Matrix& points_rows, const Vector& color,
                    const std::string& path) {
    const Index n = points_rows.rows();
    require(n == 0 || points_rows.cols() >= 2,
            "render_scatter: points need at least two columns");
    require(color.size() == n, "render_scatter: one color value per point");

    const double width = 640, height = 480, margin = 48;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    if (n > 0) {
        x_min = points_rows.col(0).minCoeff();
        x_max = points_rows.col(0).maxCoeff();
        y_min = points_rows.col(1).minCoeff();
        y_max = points_rows.col(1).maxCoeff();
    }
    const double x_span = x_max > x_min ? x_max - x_min : 1.0;
    const double y_span = y_max > y_min ? y_max - y_min : 1.0;
    double c_min = 0, c_max = 0;
    if (n > 0) {
        c_min = color.minCoeff();
        c_max = color.maxCoeff();
    }
    const double c_span = c_max - c_min;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp + "'");
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
            << height << "\">\n";
        out << "  <rect width=\"" << width << "\" height=\"" << height
            << "\" fill=\"white\"/>\n";
        // axes
        out << "  <line x1=\"" << margin << "\" y1=\"" << height - margin
            << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
            << "\" stroke=\"black\"/>\n";
        out << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
            << margin << "\" y2=\"" << height - margin
            << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << margin << "\" y=\"" << height - margin + 16
            << "\" font-size=\"11\">" << fmt(x_min) << "</text>\n";
        out << "  <text x=\"" << width - margin << "\" y=\""
            << height - margin + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
            << fmt(x_max) << "</text>\n";
        out << "  <text x=\"" << margin - 4 << "\" y=\"" << height - margin
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y_min)
            << "</text>\n";
        out << "  <text x=\"" << margin - 4 << "\" y=\"" << margin + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y_max)
            << "</text>\n";

        for (Index i = 0; i < n; ++i) {
            const double px =
                margin + (points_rows(i, 0) - x_min) / x_span * (width - 2 * margin);
            const double py = height - margin -
                              (points_rows(i, 1) - y_min) / y_span *
                                  (height - 2 * margin);
            const double t =
                c_span > 0.0 ? (color(i) - c_min) / c_span : 0.5;
            out << "  <circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
                << "\" r=\"2.5\" fill=\"" << ramp_color(t) << "\"/>\n";
        }
        out << "</svg>\n";
        if (!out) throw Error("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace lle::plot
