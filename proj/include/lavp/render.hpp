#pragma once

#include <span>
#include <string>
#include <string_view>

#include "lavp/grid.hpp"

namespace lavp {

/// Pixel size of one grid cell in rendered SVGs.
inline constexpr int kSvgCellSize = 24;

/// SVG of the map: lattice, filled obstacle squares, labelled spots and the route
/// as a polyline through cell centres. Row = X (UP decreases it), column = Y.
/// Output bytes depend only on the inputs.
std::string render_svg(const GridMap& map, const Scenario& scenario, std::span<const Cell> path,
                       std::string_view title = {});

} // namespace lavp
