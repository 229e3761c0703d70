#pragma once

#include "airy/defects.hpp"
#include "airy/geometry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace airy {

enum class CheckLevel { None, Fast, All };

std::string to_string(CheckLevel level);
/// "none", "fast" or "all"; throws ValidationError otherwise.
CheckLevel parse_check_level(const std::string& name);

struct MeshSettings {
  double h = 0.0; // 0 means eps / 4
  int refine = 0; // uniform refinements after generation
};

struct OutputSettings {
  int grid_nx = 200;
  int grid_ny = 200;
  bool field_table = true;
  bool report = true;
  bool mesh_dump = false;
  std::vector<std::string> heatmaps{"v"};
};

struct ProblemConfig {
  MaterialParams material{1.0, 0.3};
  OuterBoundary outer = OuterBoundary::disk(Vec2::Zero(), 1.0);
  DefectConfiguration defects;
  double core_radius = 0.0;
  MeshSettings mesh;
  OutputSettings outputs;
  CheckLevel checks = CheckLevel::All;

  double mesh_size() const noexcept { return mesh.h > 0.0 ? mesh.h : 0.25 * core_radius; }
};

struct ConfigIssue {
  int line = 0; // 1-based; 0 when no position applies
  std::string message;
};

/// Every problem found in a configuration, syntax or semantic.
class ConfigError : public ValidationError {
public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates a YAML problem description:
///
///   material: {young_modulus: 1.0, poisson_ratio: 0.3}
///   domain:
///     disk: {center: [0, 0], radius: 1}      # or polygon: [[x, y], ...]
///   core_radius: 0.2
///   defects:
///     - {kind: disclination, position: [0, 0], frank: 0.5}
///     - {kind: dislocation, position: [0.4, 0], burgers: [1, 0]}
///   mesh: {h: 0.05, refine: 0}
///   outputs: {grid: [200, 200], field_table: true, report: true, mesh_dump: false, heatmaps: [v]}
///   checks: all
///
/// Only domain, core_radius and defects are required. Throws ConfigError with
/// all violations found.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);

} // namespace airy
