#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// Header "x,y" or "x,y,label"; shortest round-trip decimal representation.
std::string to_csv(const PointSet& points);
void write_csv(const PointSet& points, const std::filesystem::path& path);

/// Throws MalformedFile with the 1-based line number; the set must be non-empty.
PointSet parse_csv(const std::string& text);
PointSet read_csv(const std::filesystem::path& path);

/// Standalone SVG: measurement dots, one sampled polyline per named ellipse,
/// a legend and equal-aspect axes.
std::string to_svg(const PointSet& points,
                   const std::vector<std::pair<std::string, GeometricEllipse>>& ellipses);
void render_svg(const PointSet& points,
                const std::vector<std::pair<std::string, GeometricEllipse>>& ellipses,
                const std::filesystem::path& path);

}  // namespace ellipsefit
