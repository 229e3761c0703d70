#pragma once

#include "airy/elasticity.hpp"

#include <variant>
#include <vector>

namespace airy {

struct Disk {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

/// Outer boundary of the body: a disk or a simple counter-clockwise polygon.
class OuterBoundary {
public:
  static OuterBoundary disk(const Vec2& center, double radius);
  static OuterBoundary polygon(std::vector<Vec2> vertices);

  bool is_disk() const noexcept { return std::holds_alternative<Disk>(shape_); }
  const Disk& as_disk() const { return std::get<Disk>(shape_); }
  const std::vector<Vec2>& as_polygon() const { return std::get<std::vector<Vec2>>(shape_); }

  bool contains(const Vec2& x) const;
  /// Unsigned distance from x to the boundary curve.
  double distance_to_boundary(const Vec2& x) const;
  /// Enclosed area.
  double area() const;
  /// Axis-aligned bounding box as (min, max).
  std::pair<Vec2, Vec2> bounding_box() const;

private:
  explicit OuterBoundary(std::variant<Disk, std::vector<Vec2>> shape) : shape_(std::move(shape)) {}
  std::variant<Disk, std::vector<Vec2>> shape_;
};

/// Signed area of a closed polygon (positive when counter-clockwise).
double polygon_signed_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& x, const std::vector<Vec2>& poly);
double distance_to_segment(const Vec2& x, const Vec2& a, const Vec2& b);

} // namespace airy
