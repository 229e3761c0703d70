#pragma once

#include "airy/equilibrium.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airy {

/// Regular nx x ny grid of cell centres over a box, row-major with j (the x2
/// index) outermost.
struct SampleGrid {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  int nx = 200;
  int ny = 200;

  Vec2 point(int i, int j) const;
  Vec2 cell_size() const { return {(hi[0] - lo[0]) / nx, (hi[1] - lo[1]) / ny}; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Grid over the bounding box of the outer boundary.
SampleGrid domain_grid(const PerforatedDomain& dom, int nx, int ny);

struct SampledFields {
  SampleGrid grid;
  std::vector<std::optional<FieldSample>> samples; // empty outside the domain
};

/// Samples every grid point inside the perforated domain. Points between the
/// exact boundary and the polygonal mesh are snapped onto the mesh.
SampledFields sample_fields(const EquilibriumSolution& sol, const SampleGrid& grid);

/// Scalar channels of a field sample, in table column order.
const std::vector<std::string>& field_channels();
bool is_field_channel(std::string_view name);
/// Throws ValidationError for an unknown channel.
double channel_value(const FieldSample& s, std::string_view channel, const MaterialParams& mat);

/// CSV with header "x1,x2,<channels>"; absent points keep their coordinates
/// and leave the channel cells empty. Floats use the shortest round-trip form.
void write_field_table(std::ostream& os, const SampledFields& fields, const MaterialParams& mat);

struct FieldTable {
  std::vector<std::string> columns;
  std::vector<Vec2> points;
  std::vector<std::optional<std::vector<double>>> values; // one entry per channel column
};
/// Reads a table written by write_field_table. Throws std::runtime_error on
/// malformed input.
FieldTable read_field_table(std::istream& is);

/// Standalone SVG: one coloured cell per grid point, domain outline, core
/// circles and an annotated colour bar. Absent cells show the background.
/// A constant channel gets the range widened by +-1.
void write_heatmap(std::ostream& os, const SampledFields& fields, const PerforatedDomain& dom,
                   const MaterialParams& mat, const std::string& channel);

/// Lower and upper end of the colour scale used by write_heatmap.
std::pair<double, double> heatmap_range(const SampledFields& fields, const MaterialParams& mat,
                                        const std::string& channel);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

} // namespace airy
