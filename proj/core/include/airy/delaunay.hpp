#pragma once

#include "airy/elasticity.hpp"

#include <array>
#include <vector>

namespace airy {

/// Delaunay triangulation of the convex hull of `points` (Bowyer-Watson).
///
/// Coordinates are snapped to a 2^26 integer lattice over the bounding box and
/// all orientation / in-circle decisions are exact on the snapped values.
/// Triangles are returned counter-clockwise. Duplicate points (after
/// snapping) raise std::invalid_argument.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points);

} // namespace airy
