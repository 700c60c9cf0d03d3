#pragma once

#include "lle/types.hpp"

#include <string>

namespace lle::plot {

/// Write a standalone SVG scatter plot: one circle per point, a
/// viridis-like color ramp over `color`, axes labeled with the coordinate
/// ranges. Points beyond two columns are ignored (the first two are
/// plotted). A constant color range paints every point the same color.
/// The file is written atomically (temp file + rename).
void render_scatter(const Matrix& points_rows, const Vector& color,
                    const std::string& path);

}  // namespace lle::plot
