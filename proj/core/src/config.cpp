#include "airy/config.hpp"

#include "airy/output.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace airy {

std::string to_string(CheckLevel level) {
  switch (level) {
  case CheckLevel::None: return "none";
  case CheckLevel::Fast: return "fast";
  case CheckLevel::All: return "all";
  }
  return "all";
}

CheckLevel parse_check_level(const std::string& name) {
  if (name == "none") return CheckLevel::None;
  if (name == "fast") return CheckLevel::Fast;
  if (name == "all") return CheckLevel::All;
  throw ValidationError("unknown check level '" + name + "' (expected all, fast or none)");
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k) os << '\n';
    if (issues[k].line > 0) os << "line " << issues[k].line << ": ";
    os << issues[k].message;
  }
  return os.str();
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : ValidationError(join_issues(issues)), issues_(std::move(issues)) {}

namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.is_null() ? 0 : m.line + 1;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Collects issues while walking the document.
class Reader {
public:
  std::vector<ConfigIssue> issues;

  void fail(const YAML::Node& at, std::string msg) { issues.push_back({line_of(at), std::move(msg)}); }
  void fail(int line, std::string msg) { issues.push_back({line, std::move(msg)}); }

  void allow_keys(const YAML::Node& map, std::initializer_list<const char*> keys, const std::string& where) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>("");
      if (!ok.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  std::optional<double> number(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) {
      fail(n, what + " must be a number");
      return std::nullopt;
    }
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) {
        fail(n, what + " must be finite");
        return std::nullopt;
      }
      return v;
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<int> integer(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) {
      fail(n, what + " must be an integer");
      return std::nullopt;
    }
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be an integer, got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<bool> boolean(const YAML::Node& n, const std::string& what) {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be true or false");
      return std::nullopt;
    }
  }

  std::optional<Vec2> point(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) {
      fail(n, what + " must be a pair [x, y]");
      return std::nullopt;
    }
    const auto x = number(n[0], what + "[0]");
    const auto y = number(n[1], what + "[1]");
    if (!x || !y) return std::nullopt;
    return Vec2(*x, *y);
  }
};

struct ParsedDefect {
  std::size_t index = 0;
  int line = 0;
  Vec2 position;
  std::optional<Defect> defect; // empty when the charge is invalid
};

} // namespace

ProblemConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError({{e.mark.line + 1, "syntax error: " + e.msg}});
  }
  if (!root.IsMap()) throw ConfigError({{1, "configuration must be a mapping of sections"}});

  Reader rd;
  rd.allow_keys(root, {"material", "domain", "core_radius", "defects", "mesh", "outputs", "checks"},
                "the top level");

  ProblemConfig cfg;

  // material
  double young = 1.0, nu = 0.3;
  int material_line = 0;
  if (const auto m = root["material"]) {
    material_line = line_of(m);
    if (!m.IsMap()) {
      rd.fail(m, "material must be a mapping");
    } else {
      rd.allow_keys(m, {"young_modulus", "poisson_ratio"}, "material");
      if (m["young_modulus"]) young = rd.number(m["young_modulus"], "material.young_modulus").value_or(young);
      if (m["poisson_ratio"]) nu = rd.number(m["poisson_ratio"], "material.poisson_ratio").value_or(nu);
    }
  }
  try {
    cfg.material = MaterialParams(young, nu);
  } catch (const std::exception& e) {
    rd.fail(material_line, std::string("material: ") + e.what());
  }

  // domain
  bool have_outer = false;
  if (const auto d = root["domain"]; !d) {
    rd.fail(0, "missing required section 'domain'");
  } else if (!d.IsMap()) {
    rd.fail(d, "domain must be a mapping with a 'disk' or a 'polygon' entry");
  } else {
    rd.allow_keys(d, {"disk", "polygon"}, "domain");
    if (d["disk"] && d["polygon"]) {
      rd.fail(d, "domain must give either 'disk' or 'polygon', not both");
    } else if (const auto disk = d["disk"]) {
      if (!disk.IsMap()) {
        rd.fail(disk, "domain.disk must be a mapping with center and radius");
      } else {
        rd.allow_keys(disk, {"center", "radius"}, "domain.disk");
        std::optional<Vec2> c = Vec2::Zero();
        if (disk["center"]) c = rd.point(disk["center"], "domain.disk.center");
        std::optional<double> r;
        if (disk["radius"]) r = rd.number(disk["radius"], "domain.disk.radius");
        else rd.fail(disk, "domain.disk needs a radius");
        if (r && !(*r > 0.0)) {
          rd.fail(disk["radius"], "domain.disk.radius must be positive");
          r.reset();
        }
        if (c && r) {
          cfg.outer = OuterBoundary::disk(*c, *r);
          have_outer = true;
        }
      }
    } else if (const auto poly = d["polygon"]) {
      if (!poly.IsSequence()) {
        rd.fail(poly, "domain.polygon must be a list of [x, y] vertices");
      } else {
        std::vector<Vec2> vs;
        bool ok = true;
        for (std::size_t k = 0; k < poly.size(); ++k) {
          const auto p = rd.point(poly[k], "domain.polygon[" + std::to_string(k) + "]");
          ok = ok && p.has_value();
          if (p) vs.push_back(*p);
        }
        if (ok) {
          try {
            cfg.outer = OuterBoundary::polygon(std::move(vs));
            have_outer = true;
          } catch (const ValidationError& e) {
            rd.fail(poly, std::string("domain.polygon: ") + e.what());
          }
        }
      }
    } else {
      rd.fail(d, "domain must give a 'disk' or a 'polygon'");
    }
  }

  // defects
  std::vector<ParsedDefect> defects;
  if (const auto ds = root["defects"]; !ds) {
    rd.fail(0, "missing required section 'defects'");
  } else if (!ds.IsSequence()) {
    rd.fail(ds, "defects must be a list");
  } else {
    if (ds.size() == 0) rd.fail(ds, "at least one defect is required");
    for (std::size_t k = 0; k < ds.size(); ++k) {
      const auto e = ds[k];
      const std::string where = "defects[" + std::to_string(k) + "]";
      if (!e.IsMap()) {
        rd.fail(e, where + " must be a mapping");
        continue;
      }
      rd.allow_keys(e, {"kind", "position", "burgers", "frank"}, where);
      const std::string kind = e["kind"] ? e["kind"].as<std::string>("") : "";
      std::optional<Vec2> pos;
      if (e["position"]) pos = rd.point(e["position"], where + ".position");
      else rd.fail(e, where + " needs a position");
      if (kind == "dislocation") {
        if (e["frank"]) rd.fail(e["frank"], where + ": a dislocation takes 'burgers', not 'frank'");
        std::optional<Vec2> b;
        if (e["burgers"]) b = rd.point(e["burgers"], where + ".burgers");
        else rd.fail(e, where + ": dislocation needs a burgers vector");
        if (b && b->isZero(0.0)) {
          rd.fail(e["burgers"], where + ".burgers must be nonzero");
          b.reset();
        }
        if (pos) defects.push_back({k, line_of(e), *pos, b ? std::optional<Defect>(Dislocation{*pos, *b}) : std::nullopt});
      } else if (kind == "disclination") {
        if (e["burgers"]) rd.fail(e["burgers"], where + ": a disclination takes 'frank', not 'burgers'");
        std::optional<double> s;
        if (e["frank"]) s = rd.number(e["frank"], where + ".frank");
        else rd.fail(e, where + ": disclination needs a frank angle");
        if (s && *s == 0.0) {
          rd.fail(e["frank"], where + ".frank must be nonzero");
          s.reset();
        }
        if (pos) defects.push_back({k, line_of(e), *pos, s ? std::optional<Defect>(Disclination{*pos, *s}) : std::nullopt});
      } else {
        rd.fail(e["kind"] ? e["kind"] : e,
                where + ".kind must be 'dislocation' or 'disclination'" + (kind.empty() ? "" : ", got '" + kind + "'"));
        if (pos) defects.push_back({k, line_of(e), *pos, std::nullopt});
      }
    }
  }

  // core radius
  int eps_line = 0;
  if (const auto e = root["core_radius"]; !e) {
    rd.fail(0, "missing required key 'core_radius'");
  } else {
    eps_line = line_of(e);
    if (const auto v = rd.number(e, "core_radius")) {
      if (!(*v > 0.0)) rd.fail(e, "core_radius must be positive");
      else cfg.core_radius = *v;
    }
  }

  // semantic checks across defects, domain and core radius
  for (std::size_t i = 0; i < defects.size(); ++i) {
    const Vec2 xi = defects[i].position;
    const std::string ni = std::to_string(defects[i].index);
    for (std::size_t j = 0; j < i; ++j) {
      const std::string nj = std::to_string(defects[j].index);
      const double dist = (xi - defects[j].position).norm();
      if (dist == 0.0) {
        rd.fail(defects[i].line, "defects " + nj + " and " + ni + " share a position; defect supports must be disjoint");
      } else if (cfg.core_radius > 0.0 && !(cfg.core_radius < 0.5 * dist)) {
        rd.fail(eps_line, "core_radius " + fmt(cfg.core_radius) + " must be below half the distance between defects " +
                              nj + " and " + ni + " (" + fmt(0.5 * dist) + ") so the cores stay disjoint");
      }
    }
    if (have_outer) {
      if (!cfg.outer.contains(xi)) {
        rd.fail(defects[i].line, "defect " + ni + " lies outside the domain");
      } else if (cfg.core_radius > 0.0) {
        const double wall = cfg.outer.distance_to_boundary(xi);
        if (!(cfg.core_radius < wall)) {
          rd.fail(eps_line, "core_radius " + fmt(cfg.core_radius) + " must be below the distance " + fmt(wall) +
                                " from defect " + ni + " to the outer boundary");
        }
      }
    }
  }
  if (!defects.empty()) {
    std::vector<Defect> list;
    for (const auto& d : defects)
      if (d.defect) list.push_back(*d.defect);
    cfg.defects = DefectConfiguration(std::move(list));
  }

  // mesh
  if (const auto m = root["mesh"]) {
    if (!m.IsMap()) {
      rd.fail(m, "mesh must be a mapping");
    } else {
      rd.allow_keys(m, {"h", "refine"}, "mesh");
      if (m["h"]) {
        if (const auto h = rd.number(m["h"], "mesh.h")) {
          if (!(*h > 0.0)) rd.fail(m["h"], "mesh.h must be positive");
          else if (cfg.core_radius > 0.0 && !(*h < cfg.core_radius))
            rd.fail(m["h"], "mesh.h " + fmt(*h) + " must be smaller than core_radius " + fmt(cfg.core_radius));
          else cfg.mesh.h = *h;
        }
      }
      if (m["refine"]) {
        if (const auto r = rd.integer(m["refine"], "mesh.refine")) {
          if (*r < 0 || *r > 6) rd.fail(m["refine"], "mesh.refine must be between 0 and 6");
          else cfg.mesh.refine = *r;
        }
      }
    }
  }

  // outputs
  if (const auto o = root["outputs"]) {
    if (!o.IsMap()) {
      rd.fail(o, "outputs must be a mapping");
    } else {
      rd.allow_keys(o, {"grid", "field_table", "report", "mesh_dump", "heatmaps"}, "outputs");
      if (const auto g = o["grid"]) {
        if (!g.IsSequence() || g.size() != 2) {
          rd.fail(g, "outputs.grid must be [nx, ny]");
        } else {
          const auto nx = rd.integer(g[0], "outputs.grid[0]");
          const auto ny = rd.integer(g[1], "outputs.grid[1]");
          if (nx && ny) {
            if (*nx < 2 || *ny < 2 || *nx > 4000 || *ny > 4000) {
              rd.fail(g, "outputs.grid entries must lie between 2 and 4000");
            } else {
              cfg.outputs.grid_nx = *nx;
              cfg.outputs.grid_ny = *ny;
            }
          }
        }
      }
      if (o["field_table"]) cfg.outputs.field_table = rd.boolean(o["field_table"], "outputs.field_table").value_or(true);
      if (o["report"]) cfg.outputs.report = rd.boolean(o["report"], "outputs.report").value_or(true);
      if (o["mesh_dump"]) cfg.outputs.mesh_dump = rd.boolean(o["mesh_dump"], "outputs.mesh_dump").value_or(false);
      if (const auto hm = o["heatmaps"]) {
        if (!hm.IsSequence()) {
          rd.fail(hm, "outputs.heatmaps must be a list of channel names");
        } else {
          cfg.outputs.heatmaps.clear();
          for (const auto& c : hm) {
            const auto name = c.as<std::string>("");
            if (!is_field_channel(name)) rd.fail(c, "unknown heatmap channel '" + name + "'");
            else cfg.outputs.heatmaps.push_back(name);
          }
        }
      }
    }
  }

  if (const auto c = root["checks"]) {
    try {
      cfg.checks = parse_check_level(c.as<std::string>(""));
    } catch (const ValidationError& e) {
      rd.fail(c, e.what());
    }
  }

  if (!rd.issues.empty()) {
    std::stable_sort(rd.issues.begin(), rd.issues.end(),
                     [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigError(std::move(rd.issues));
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{0, "cannot open configuration file " + path.string()}});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

} // namespace airy
