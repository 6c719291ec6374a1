#pragma once

// JSON scene description driving one figure pipeline. Parsing resolves every
// default, so serialize_config emits a complete canonical document.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nifsim/analysis.hpp"
#include "nifsim/dyndiff.hpp"
#include "nifsim/holography.hpp"
#include "nifsim/image_io.hpp"
#include "nifsim/interferogram.hpp"
#include "nifsim/phase_objects.hpp"

namespace nifsim {

struct BeamConfig {
  double wavelength = 2.71e-10;
  double flux = 1e7;  // m^-2 s^-1
  double sigma_x = 5e-6;
  double sigma_z = 80e-9;
  double coherence_aperture = 2e-6;
  friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

struct DetectorConfig {
  double pixel_pitch = 100e-6;
  std::size_t width = 200;
  std::size_t height = 200;
  std::size_t supersample = 4;  // fine cells per detector pixel along each axis
  std::vector<Port> ports{Port::O};
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// Position of the camera relative to the exit beam. The integration counter
/// sits in the Bragg-diffracted beam, which is mirror-reversed along u.
enum class Camera { Detector, IntegrationCounter };

struct ReconstructionConfig {
  ReconstructionParams params;
  Port port = Port::O;
  std::optional<std::string> input;  // CSV grid; simulate the scene when absent
  friend bool operator==(const ReconstructionConfig&, const ReconstructionConfig&) = default;
};

struct CaptureConfig {
  double flux = 1e7;  // m^-2 s^-1 (1e3 cm^-2 s^-1)
  double sigma_x = 1e-6;
  double sigma_z = 1e-6;
  double duration = 3.6e5;  // s
  CoherenceArea convention = CoherenceArea::Rectangle;
  friend bool operator==(const CaptureConfig&, const CaptureConfig&) = default;
};

struct AnalysisConfig {
  std::vector<double> fresnel_distances{0.05, 0.017};
  std::vector<double> fresnel_references{0.295, 0.857};  // quoted values to compare against; may be empty
  double flight_path = 0.1;
  double wedge_tan_alpha = 0.21;
  double isotropic_sigma = 5e-6;
  double moire_mismatch = 1e-7;  // relative spacing mismatch of the analyzer lattice
  CaptureConfig capture;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct SweepVariant {
  std::string name;
  std::string patch;  // JSON merge patch applied to the base scene
  friend bool operator==(const SweepVariant&, const SweepVariant&) = default;
};

struct SweepConfig {
  std::vector<int> turns;  // applied to every spiral plate
  std::vector<SweepVariant> variants;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct OamModelConfig {
  std::vector<int> charges;
  double k_fringe = 0.0;  // resolved from the path I wedge when omitted
  double theta = 0.0;
  double a = 0.5;
  double b = 0.5;
  FringeAxis axis = FringeAxis::V;
  friend bool operator==(const OamModelConfig&, const OamModelConfig&) = default;
};

struct OutputConfig {
  ImageFormat format = ImageFormat::Png;
  std::string prefix;
  bool thickness_maps = false;  // also emit the per-path thickness maps at detector resolution
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct SceneConfig {
  BeamConfig beam;
  CrystalParams crystal;
  std::vector<PhaseObjectSpec> path_I;
  std::vector<PhaseObjectSpec> path_II;
  DetectorConfig detector;
  double phase_flag = 0.0;
  Camera camera = Camera::Detector;
  std::optional<ReconstructionConfig> reconstruction;
  AnalysisConfig analysis;
  std::optional<SweepConfig> sweep;
  std::optional<OamModelConfig> oam_model;
  OutputConfig output;

  /// Fine simulation grid centered on the optical axis.
  SamplingGrid field() const;
  friend bool operator==(const SceneConfig&, const SceneConfig&);
};

/// Parses and validates; throws ConfigError listing unknown keys or naming the
/// offending field and constraint.
SceneConfig parse_config(std::string_view text);

/// Canonical JSON with every resolved default.
std::string serialize_config(const SceneConfig& config);

/// Applies a JSON merge patch to the canonical form and re-parses.
SceneConfig apply_patch(const SceneConfig& config, std::string_view patch);

/// Preset scene for figures 7, 8, 10, 11 and 12.
SceneConfig preset_config(int figure);

const char* camera_name(Camera camera);

}  // namespace nifsim
