#include "airy/config.hpp"
#include "airy/output.hpp"
#include "airy/pipeline.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

using namespace airy;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(domain:
  disk: {radius: 1}
core_radius: 0.2
defects:
  - {kind: disclination, position: [0, 0], frank: 0.5}
)";

std::vector<ConfigIssue> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<ConfigIssue>& issues, const std::string& needle, int line = -1) {
  for (const auto& i : issues)
    if (i.message.find(needle) != std::string::npos && (line < 0 || i.line == line)) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("airy_io_test_" + name);
  fs::remove_all(p);
  return p;
}

ProblemConfig small_config(int grid = 40) {
  ProblemConfig cfg = parse_config(kMinimal);
  cfg.outputs.grid_nx = cfg.outputs.grid_ny = grid;
  cfg.checks = CheckLevel::Fast;
  return cfg;
}

} // namespace

TEST(Config, MinimalFileGetsDefaults) {
  const ProblemConfig cfg = parse_config(kMinimal);
  EXPECT_DOUBLE_EQ(cfg.material.young_modulus(), 1.0);
  EXPECT_DOUBLE_EQ(cfg.material.poisson_ratio(), 0.3);
  EXPECT_DOUBLE_EQ(cfg.mesh_size(), 0.05);
  EXPECT_EQ(cfg.mesh.refine, 0);
  EXPECT_EQ(cfg.outputs.grid_nx, 200);
  EXPECT_EQ(cfg.outputs.grid_ny, 200);
  EXPECT_EQ(cfg.checks, CheckLevel::All);
  EXPECT_EQ(cfg.defects.size(), 1u);
  EXPECT_TRUE(cfg.outer.is_disk());
}

TEST(Config, FullFileRoundsOut) {
  const ProblemConfig cfg = parse_config(R"(material: {young_modulus: 2.5, poisson_ratio: 0.1}
domain:
  polygon: [[0, 0], [2, 0], [2, 1], [0, 1]]
core_radius: 0.1
defects:
  - {kind: dislocation, position: [0.5, 0.5], burgers: [1, -1]}
  - {kind: disclination, position: [1.5, 0.5], frank: -0.2}
mesh: {h: 0.02, refine: 1}
outputs: {grid: [30, 20], field_table: false, heatmaps: [sigma11, eps_p12]}
checks: none
)");
  EXPECT_FALSE(cfg.outer.is_disk());
  EXPECT_DOUBLE_EQ(cfg.mesh_size(), 0.02);
  EXPECT_EQ(cfg.mesh.refine, 1);
  EXPECT_EQ(cfg.outputs.grid_nx, 30);
  EXPECT_EQ(cfg.outputs.grid_ny, 20);
  EXPECT_FALSE(cfg.outputs.field_table);
  EXPECT_EQ(cfg.outputs.heatmaps, (std::vector<std::string>{"sigma11", "eps_p12"}));
  EXPECT_EQ(cfg.checks, CheckLevel::None);
  EXPECT_TRUE(cfg.defects.total_burgers().isApprox(Vec2(1, -1)));
}

TEST(Config, CoreRadiusAtTheBoundNamesThePair) {
  const auto issues = issues_of(R"(domain:
  disk: {radius: 1}
core_radius: 0.2
defects:
  - {kind: disclination, position: [-0.2, 0], frank: 0.1}
  - {kind: disclination, position: [0.2, 0], frank: 0.1}
)");
  EXPECT_TRUE(mentions(issues, "defects 0 and 1"));
}

TEST(Config, ReportsEveryProblemWithItsLine) {
  const auto issues = issues_of(R"(material: {young_modulus: -1, poisson_ratio: 0.3}
domain:
  disk: {radius: 1}
core_radius: 0.05
defects:
  - {kind: disclination, position: [0.3, 0], frank: 0.1}
  - {kind: dislocation, position: [0.3, 0], burgers: [1, 0]}
  - {kind: vortex, position: [0, 0]}
colour: blue
)");
  EXPECT_TRUE(mentions(issues, "young_modulus", 1));
  EXPECT_TRUE(mentions(issues, "vortex", 8));
  EXPECT_TRUE(mentions(issues, "colour", 9));
  EXPECT_TRUE(mentions(issues, "defects 0 and 1"));
  for (std::size_t k = 1; k < issues.size(); ++k) EXPECT_LE(issues[k - 1].line, issues[k].line);
}

TEST(Config, RejectsEmptyDefectListAndSyntaxErrors) {
  EXPECT_FALSE(issues_of("domain:\n  disk: {radius: 1}\ncore_radius: 0.1\ndefects: []\n").empty());
  const auto syntax = issues_of("domain:\n  disk: {radius: 1}\ncore_radius: [0.1\n");
  ASSERT_FALSE(syntax.empty());
  EXPECT_GT(syntax.front().line, 0);
  EXPECT_THROW(parse_config("domain:\n  disk: {radius: 1}\ncore_radius: 0.1\ndefects:\n  - {kind: disclination, "
                            "position: [0, 0], frank: 0.1}\nmesh: {h: 0.1}\n"),
               ConfigError); // h not below the core radius
  EXPECT_THROW(load_config("/nonexistent/airy.yaml"), ValidationError);
}

TEST(FieldTable, RoundTripsEveryFloat) {
  const ProblemConfig cfg = small_config(24);
  auto dom = std::make_shared<PerforatedDomain>(build_perforated_domain(cfg.outer, cfg.defects, cfg.core_radius));
  auto mesh = std::make_shared<Mesh>(generate_mesh(*dom, cfg.mesh_size()));
  const EquilibriumRun run = solve_on_mesh(dom, mesh, cfg.material);
  const SampledFields fields = sample_fields(run.solution, domain_grid(*dom, 24, 24));
  std::stringstream ss;
  write_field_table(ss, fields, cfg.material);
  const std::string text = ss.str();
  EXPECT_EQ(text.find("x1,x2,"), 0u);
  EXPECT_EQ(text.find("x1,x2,", 1), std::string::npos);
  const FieldTable table = read_field_table(ss);
  ASSERT_EQ(table.points.size(), fields.grid.size());
  ASSERT_EQ(table.columns, field_channels());
  std::size_t absent = 0;
  for (std::size_t k = 0; k < table.points.size(); ++k) {
    EXPECT_EQ(table.points[k], fields.grid.point(static_cast<int>(k % 24), static_cast<int>(k / 24)));
    ASSERT_EQ(table.values[k].has_value(), fields.samples[k].has_value());
    if (!fields.samples[k]) {
      ++absent;
      continue;
    }
    for (std::size_t c = 0; c < field_channels().size(); ++c)
      EXPECT_EQ((*table.values[k])[c], channel_value(*fields.samples[k], field_channels()[c], cfg.material));
  }
  EXPECT_GT(absent, 0u); // the core and the corners of the box
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
    const std::string t = format_double(x);
    double back = 0.0;
    std::from_chars(t.data(), t.data() + t.size(), back);
    EXPECT_EQ(back, x) << t;
  }
}

TEST(Heatmap, DegenerateRangeAndUnknownChannel) {
  SampledFields f;
  f.grid = SampleGrid{{-1, -1}, {1, 1}, 2, 2};
  FieldSample s;
  s.potential = 3.0;
  f.samples = {s, s, std::nullopt, s};
  const MaterialParams mat(1.0, 0.3);
  const auto [lo, hi] = heatmap_range(f, mat, "v");
  EXPECT_DOUBLE_EQ(lo, 2.0);
  EXPECT_DOUBLE_EQ(hi, 4.0);
  EXPECT_THROW(heatmap_range(f, mat, "temperature"), ValidationError);
  DefectConfiguration cfg;
  cfg.add(Disclination{{0, 0}, 0.1});
  const PerforatedDomain dom = build_perforated_domain(OuterBoundary::disk({0, 0}, 1), cfg, 0.2);
  std::ostringstream os;
  write_heatmap(os, f, dom, mat, "v");
  const std::string svg = os.str();
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  std::ostringstream bad;
  EXPECT_THROW(write_heatmap(bad, f, dom, mat, "nope"), ValidationError);
}

TEST(SampledFields, CentredDisclinationIsRadial) {
  const ProblemConfig cfg = small_config();
  auto dom = std::make_shared<PerforatedDomain>(build_perforated_domain(cfg.outer, cfg.defects, cfg.core_radius));
  auto mesh = std::make_shared<Mesh>(generate_mesh(*dom, cfg.mesh_size()));
  const EquilibriumRun run = solve_on_mesh(dom, mesh, cfg.material);
  const SampledFields f = sample_fields(run.solution, domain_grid(*dom, 160, 160));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::map<int, std::vector<double>> bins;
  for (std::size_t k = 0; k < f.samples.size(); ++k) {
    if (!f.samples[k]) continue;
    const double v = f.samples[k]->potential;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const double r = f.grid.point(static_cast<int>(k % 160), static_cast<int>(k / 160)).norm();
    bins[static_cast<int>(r / 0.01)].push_back(v);
  }
  ASSERT_GT(hi - lo, 0.0);
  for (const auto& [bin, vals] : bins) {
    if (vals.size() < 8) continue;
    double mean = 0, var = 0;
    for (double v : vals) mean += v / vals.size();
    for (double v : vals) var += (v - mean) * (v - mean) / vals.size();
    EXPECT_LT(std::sqrt(var), 0.02 * (hi - lo)) << "bin " << bin;
  }
}

TEST(Pipeline, IsDeterministicAndWritesArtifacts) {
  const ProblemConfig cfg = small_config();
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  const RunReport ra = run_pipeline(cfg, {a, std::nullopt, std::nullopt});
  const RunReport rb = run_pipeline(cfg, {b, std::nullopt, std::nullopt});
  EXPECT_TRUE(ra.checks_pass());
  EXPECT_LT(ra.solver.energy, 0.0);
  EXPECT_EQ(report_json(ra, cfg, false), report_json(rb, cfg, false));
  for (const char* name : {"fields.csv", "heatmap_v.svg", "report.json"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    if (std::string(name) != "report.json") {
      EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
  }
  EXPECT_EQ(ra.artifacts.size(), 3u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, RemovesPartialArtifactsOnFailure) {
  const ProblemConfig cfg = small_config();
  const fs::path dir = scratch_dir("rollback");
  fs::create_directories(dir / "heatmap_v.svg"); // blocks the heatmap write
  try {
    run_pipeline(cfg, {dir, std::nullopt, std::nullopt});
    FAIL() << "pipeline accepted an unwritable artifact";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), FailureKind::Output);
    EXPECT_EQ(e.stage(), "output");
  }
  EXPECT_FALSE(fs::exists(dir / "fields.csv"));
  EXPECT_TRUE(fs::is_directory(dir / "heatmap_v.svg"));
  fs::remove_all(dir);
}

TEST(Pipeline, MeshInfoMatchesTheSolveMesh) {
  const ProblemConfig cfg = small_config();
  const MeshInfo m0 = mesh_info(cfg, 0), m1 = mesh_info(cfg, 1);
  EXPECT_DOUBLE_EQ(m0.h, 0.05);
  EXPECT_EQ(m1.num_triangles, 4 * m0.num_triangles);
  EXPECT_GT(m0.min_angle_deg, 20.0);
  EXPECT_NEAR(m0.core_radius_bound, 1.0, 1e-15);
  const RunReport r = run_pipeline(cfg, {});
  EXPECT_EQ(r.solver.num_triangles, m0.num_triangles);
  EXPECT_EQ(r.solver.num_dofs, m0.num_dofs);
}
