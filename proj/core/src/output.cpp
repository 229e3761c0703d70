#include "airy/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace airy {

Vec2 SampleGrid::point(int i, int j) const {
  const Vec2 d = cell_size();
  return {lo[0] + (i + 0.5) * d[0], lo[1] + (j + 0.5) * d[1]};
}

SampleGrid domain_grid(const PerforatedDomain& dom, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ValidationError("sample grid needs at least one cell per direction");
  const auto [lo, hi] = dom.outer().bounding_box();
  return {lo, hi, nx, ny};
}

SampledFields sample_fields(const EquilibriumSolution& sol, const SampleGrid& grid) {
  SampledFields out;
  out.grid = grid;
  out.samples.resize(grid.size());
  const PerforatedDomain& dom = *sol.domain;
  // the inscribed polygons sit at most h^2 / (8 eps) inside the circles
  const double snap = sol.potential.space().mesh().h;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = grid.point(i, j);
      if (!dom.contains(x)) continue;
      out.samples[static_cast<std::size_t>(j) * grid.nx + i] = extract_fields(sol, x, snap);
    }
  }
  return out;
}

const std::vector<std::string>& field_channels() {
  static const std::vector<std::string> names{
      "v",         "sigma11",   "sigma12",   "sigma22",  "sigma33",  "eps11",    "eps12",
      "eps22",     "sigma_e11", "sigma_e12", "sigma_e22", "eps_e11", "eps_e12",  "eps_e22",
      "eps_p11",   "eps_p12",   "eps_p22",   "energy_density"};
  return names;
}

bool is_field_channel(std::string_view name) {
  const auto& c = field_channels();
  return std::find(c.begin(), c.end(), name) != c.end();
}

double channel_value(const FieldSample& s, std::string_view ch, const MaterialParams& mat) {
  if (ch == "v") return s.potential;
  if (ch == "sigma33") return out_of_plane_stress(s.stress, mat);
  if (ch == "energy_density") return energy_density_from_stress(s.elastic_stress, mat);
  // tensor channels end in 11, 12 or 22
  if (ch.size() > 2) {
    const std::string_view head = ch.substr(0, ch.size() - 2);
    const std::string_view idx = ch.substr(ch.size() - 2);
    if (idx == "11" || idx == "12" || idx == "22") {
      auto pick = [&](const SymTensor2& t) { return idx == "11" ? t.t11 : (idx == "12" ? t.t12 : t.t22); };
      if (head == "sigma") return pick(s.stress);
      if (head == "eps") return pick(s.strain);
      if (head == "sigma_e") return pick(s.elastic_stress);
      if (head == "eps_e") return pick(s.elastic_strain);
      if (head == "eps_p") return pick(s.plastic_strain);
    }
  }
  throw ValidationError("unknown field channel '" + std::string(ch) + "'");
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

void write_field_table(std::ostream& os, const SampledFields& f, const MaterialParams& mat) {
  const auto& ch = field_channels();
  os << "x1,x2";
  for (const auto& c : ch) os << ',' << c;
  os << '\n';
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      const Vec2 x = f.grid.point(i, j);
      os << format_double(x[0]) << ',' << format_double(x[1]);
      const auto& s = f.samples[static_cast<std::size_t>(j) * f.grid.nx + i];
      for (const auto& c : ch) {
        os << ',';
        if (s) os << format_double(channel_value(*s, c, mat));
      }
      os << '\n';
    }
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::runtime_error("field table line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

} // namespace

FieldTable read_field_table(std::istream& is) {
  FieldTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("field table is empty");
  const auto head = split(line);
  if (head.size() < 2 || head[0] != "x1" || head[1] != "x2") {
    throw std::runtime_error("field table header must start with x1,x2");
  }
  for (std::size_t k = 2; k < head.size(); ++k) t.columns.emplace_back(head[k]);
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != head.size()) {
      throw std::runtime_error("field table line " + std::to_string(n) + ": expected " +
                               std::to_string(head.size()) + " cells, got " + std::to_string(cells.size()));
    }
    t.points.emplace_back(parse_double(cells[0], n), parse_double(cells[1], n));
    const bool absent = std::all_of(cells.begin() + 2, cells.end(), [](std::string_view c) { return c.empty(); });
    if (absent) {
      t.values.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size() - 2);
    for (std::size_t k = 2; k < cells.size(); ++k) row.push_back(parse_double(cells[k], n));
    t.values.emplace_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- heatmap

namespace {

// viridis, sampled at nine stops
constexpr std::array<std::array<double, 3>, 9> kStops{{{68, 1, 84},
                                                      {71, 44, 122},
                                                      {59, 81, 139},
                                                      {44, 113, 142},
                                                      {33, 144, 141},
                                                      {39, 173, 129},
                                                      {92, 200, 99},
                                                      {170, 220, 50},
                                                      {253, 231, 37}}};

std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), kStops.size() - 2);
  const double a = t - static_cast<double>(k);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround((1 - a) * kStops[k][c] + a * kStops[k + 1][c]));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

} // namespace

std::pair<double, double> heatmap_range(const SampledFields& f, const MaterialParams& mat, const std::string& channel) {
  if (!is_field_channel(channel)) throw ValidationError("unknown field channel '" + channel + "'");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : f.samples) {
    if (!s) continue;
    const double v = channel_value(*s, channel, mat);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo <= hi)) return {-1.0, 1.0};
  if (lo == hi) return {lo - 1.0, hi + 1.0};
  return {lo, hi};
}

void write_heatmap(std::ostream& os, const SampledFields& f, const PerforatedDomain& dom, const MaterialParams& mat,
                   const std::string& channel) {
  const auto [vmin, vmax] = heatmap_range(f, mat, channel);
  const SampleGrid& g = f.grid;

  // plot area in pixels, y axis flipped
  const double width = 600.0;
  const Vec2 ext = g.hi - g.lo;
  const double scale = width / std::max(ext[0], ext[1]);
  const double pw = ext[0] * scale, ph = ext[1] * scale;
  const double margin = 20.0, bar = 90.0;
  auto px = [&](const Vec2& x) { return Vec2(margin + (x[0] - g.lo[0]) * scale, margin + (g.hi[1] - x[1]) * scale); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(pw + 2 * margin + bar) << "\" height=\""
     << num(ph + 2 * margin) << "\">\n";
  os << "<title>" << channel << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  const Vec2 cell = g.cell_size() * scale;
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const auto& s = f.samples[static_cast<std::size_t>(j) * g.nx + i];
      if (!s) continue;
      const double t = (channel_value(*s, channel, mat) - vmin) / (vmax - vmin);
      const Vec2 c = px(g.point(i, j));
      os << "<rect x=\"" << num(c[0] - 0.5 * cell[0]) << "\" y=\"" << num(c[1] - 0.5 * cell[1]) << "\" width=\""
         << num(cell[0]) << "\" height=\"" << num(cell[1]) << "\" fill=\"" << colour(t) << "\"/>\n";
    }
  }
  os << "</g>\n";

  // outline and cores
  os << "<g fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\">\n";
  if (dom.outer().is_disk()) {
    const Disk& d = dom.outer().as_disk();
    const Vec2 c = px(d.center);
    os << "<circle cx=\"" << num(c[0]) << "\" cy=\"" << num(c[1]) << "\" r=\"" << num(d.radius * scale) << "\"/>\n";
  } else {
    os << "<polygon points=\"";
    for (const Vec2& v : dom.outer().as_polygon()) {
      const Vec2 p = px(v);
      os << num(p[0]) << ',' << num(p[1]) << ' ';
    }
    os << "\"/>\n";
  }
  for (const Core& core : dom.cores()) {
    const Vec2 c = px(core.center);
    os << "<circle cx=\"" << num(c[0]) << "\" cy=\"" << num(c[1]) << "\" r=\"" << num(core.radius * scale) << "\"/>\n";
  }
  os << "</g>\n";

  // colour bar
  const double bx = margin + pw + 20.0, bw = 18.0;
  const int steps = 64;
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (int k = 0; k < steps; ++k) {
    const double y = margin + ph * (1.0 - (k + 1.0) / steps);
    os << "<rect x=\"" << num(bx) << "\" y=\"" << num(y) << "\" width=\"" << num(bw) << "\" height=\""
       << num(ph / steps + 0.5) << "\" fill=\"" << colour((k + 0.5) / steps) << "\"/>\n";
  }
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(margin + 8) << "\">" << label(vmax) << "</text>\n";
  os << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(margin + ph) << "\">" << label(vmin) << "</text>\n";
  os << "<text x=\"" << num(bx) << "\" y=\"" << num(margin + ph / 2) << "\" transform=\"rotate(-90 " << num(bx - 4)
     << ' ' << num(margin + ph / 2) << ")\">" << channel << "</text>\n";
  os << "</g>\n</svg>\n";
}

} // namespace airy
