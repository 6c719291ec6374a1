#pragma once

// Point-to-point interferogram synthesis, the closed-form OAM comparison
// model, detector binning and fork-dislocation counting.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nifsim/grid.hpp"
#include "nifsim/phase_objects.hpp"

namespace nifsim {

enum class Port { O, G };

const char* port_name(Port port);

struct DetectorSpec {
  double pixel_pitch = 100e-6;
  std::size_t width = 0;
  std::size_t height = 0;
  Port port = Port::O;

  void validate() const;
};

struct InterferogramGrid {
  SamplingGrid geometry;
  Grid2D<double> intensity;
  Port port = Port::O;
  double phase_offset = 0.0;
  double d_lambda = 0.0;  // 0 when the pattern is not derived from matter
  std::map<std::string, std::string> provenance;
};

/// I = (1 + cos[phi0 + 2 pi (D_II - D_I) / D_lambda]) / 2 for port O; port G
/// is the complement 1 - I_O.
InterferogramGrid synthesize_interferogram(const ThicknessMap& path_I, const ThicknessMap& path_II,
                                           double d_lambda, double phi0, Port port);

/// Direction of the fringe normal (the "k y" axis of the OAM model).
enum class FringeAxis { U, V };

struct OamModelParams {
  double k_fringe = 0.0;  // m^-1
  int q = 0;
  double theta = 0.0;
  double a = 0.5;
  double b = 0.5;
  FringeAxis axis = FringeAxis::V;

  void validate() const;
};

/// I = A + B cos(k s - q phi + theta), s the coordinate along `axis` and phi
/// the azimuth, both relative to `center` (grid center by default).
InterferogramGrid synthesize_oam_model(const OamModelParams& params, const SamplingGrid& geometry,
                                       std::optional<Point2> center = std::nullopt);

/// Block mean over detector pixels; the detector pitch must be an integer
/// multiple of the fine pitch. Blocks start at the fine grid origin.
InterferogramGrid bin_to_detector(const InterferogramGrid& fine, const DetectorSpec& det);

/// Peak-to-peak intensity over the grid.
double pattern_contrast(const InterferogramGrid& pattern);

struct ForkCountOptions {
  FringeAxis axis = FringeAxis::V;
  int offset_pixels = 5;            // cut lines at +- this many pixels
  double threshold_fraction = 0.1;  // of the pattern contrast
  std::optional<std::size_t> half_length;  // pixels; default reaches the grid edge
};

struct ForkCount {
  int charge = 0;
  std::vector<double> maxima_low;   // sub-pixel maxima positions (pixels) on the cut line at -offset
  std::vector<double> maxima_high;  // ... at +offset
};

/// Counts fringe maxima on two cut lines running along the fringe normal on
/// either side of `center` and returns their signed difference, oriented so
/// that the OAM model with charge q yields q.
ForkCount analyze_fork(const InterferogramGrid& pattern, Point2 center, const ForkCountOptions& options = {});

int fork_fringe_count(const InterferogramGrid& pattern, Point2 center, const ForkCountOptions& options = {});

}  // namespace nifsim
