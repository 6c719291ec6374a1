#pragma once

// Figure pipelines: scene -> thickness maps -> interferograms -> detector
// images, reconstructions and the analysis report, each run summarized by a
// manifest of emitted files and their SHA-256 digests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nifsim/interferogram.hpp"
#include "nifsim/scene_config.hpp"

namespace nifsim {

inline constexpr const char* kToolName = "nifsim";
inline constexpr const char* kToolVersion = "1.0.0";

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string verb;
  std::string config_hash;  // SHA-256 of the canonical config
  std::vector<ManifestEntry> files;  // sorted by path

  std::string to_json() const;
};

/// Fine-grid thickness maps of both paths, expressed in the reference
/// material (the first object's) whose lambda-thickness is d_lambda.
struct SceneThickness {
  ThicknessMap path_I;
  ThicknessMap path_II;
  double d_lambda = 0.0;
};

SceneThickness scene_thickness(const SceneConfig& config);

/// Binned detector images, one per configured port, in port order.
std::vector<InterferogramGrid> simulate_scene(const SceneConfig& config);

/// One panel of a figure sweep.
struct SweepPanel {
  std::string name;
  int turns = 0;
  SceneConfig config;
};

/// Variants x turns in configuration order; a scene without variants is its
/// own single variant.
std::vector<SweepPanel> expand_sweep(const SceneConfig& config);

/// Centre of the first spiral plate, else the optical axis.
Point2 vortex_center(const SceneConfig& config);

/// Fork count of a detector image using the fringe axis of the scene wedge.
/// Throws AnalysisError when the scene holds no wedge.
ForkCount count_fork(const SceneConfig& config, const InterferogramGrid& image);

struct AnalysisMetric {
  std::string name;
  std::string value;
  std::string unit;
};

std::vector<AnalysisMetric> analyze_scene(const SceneConfig& config);

RunManifest run_simulate(const SceneConfig& config, const std::filesystem::path& out_dir);
RunManifest run_sweep(const SceneConfig& config, const std::filesystem::path& out_dir);
RunManifest run_reconstruct(const SceneConfig& config, const std::filesystem::path& out_dir);
RunManifest run_analyze(const SceneConfig& config, const std::filesystem::path& out_dir);

}  // namespace nifsim
