#include "nifsim/interferogram.hpp"

#include <algorithm>
#include <cmath>

#include "nifsim/constants.hpp"
#include "nifsim/dyndiff.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

namespace {

// Maxima of `x` that rise and fall by at least `threshold` (hysteresis),
// refined to sub-sample positions by a parabola through the neighbours.
std::vector<double> hysteresis_maxima(const std::vector<double>& x, double threshold) {
  std::vector<double> peaks;
  if (x.empty()) return peaks;
  bool seeking_peak = true;
  double lo = x.front();
  double hi = x.front();
  std::size_t at = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double xi = x[i];
    if (seeking_peak) {
      if (hi - lo < threshold && xi < lo) {
        lo = xi;
        hi = xi;
        at = i;
      } else if (xi > hi) {
        hi = xi;
        at = i;
      }
      if (hi - lo >= threshold && hi - xi >= threshold) {
        double pos = static_cast<double>(at);
        if (at > 0 && at + 1 < x.size()) {
          const double curv = x[at - 1] - 2.0 * x[at] + x[at + 1];
          if (curv < 0.0) pos += 0.5 * (x[at - 1] - x[at + 1]) / curv;
        }
        peaks.push_back(pos);
        seeking_peak = false;
        lo = xi;
      }
    } else {
      lo = std::min(lo, xi);
      if (xi - lo >= threshold) {
        seeking_peak = true;
        hi = xi;
        at = i;
      }
    }
  }
  return peaks;
}

std::size_t pixel_index(double coord, double origin, double pitch, std::size_t count, const char* what) {
  const double f = std::floor((coord - origin) / pitch);
  if (!(f >= 0.0) || f >= static_cast<double>(count))
    throw AnalysisError(std::string("fork_fringe_count: center lies outside the pattern along ") + what);
  return static_cast<std::size_t>(f);
}

}  // namespace

const char* port_name(Port port) { return port == Port::O ? "O" : "G"; }

void DetectorSpec::validate() const {
  if (!(pixel_pitch > 0.0)) throw DomainError("detector: pixel_pitch must be > 0");
  if (width < 1 || height < 1) throw DomainError("detector: width and height must be >= 1");
}

InterferogramGrid synthesize_interferogram(const ThicknessMap& path_I, const ThicknessMap& path_II,
                                           double d_lambda, double phi0, Port port) {
  if (!(d_lambda > 0.0)) throw DomainError("synthesize_interferogram: d_lambda must be > 0");
  if (!path_I.geometry.matches(path_II.geometry) || !path_I.values.same_shape(path_II.values))
    throw ShapeError("synthesize_interferogram: path maps do not share one grid");

  InterferogramGrid out;
  out.geometry = path_I.geometry;
  out.port = port;
  out.phase_offset = phi0;
  out.d_lambda = d_lambda;
  out.intensity = Grid2D<double>(path_I.values.rows(), path_I.values.cols());
  const auto d1 = path_I.values.values();
  const auto d2 = path_II.values.values();
  auto dst = out.intensity.values();
  const double scale = constants::two_pi / d_lambda;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const auto ports = two_path_intensity(1.0, phi0 + scale * (d2[i] - d1[i]));
    dst[i] = port == Port::O ? ports.forward : ports.diffracted;
  }
  return out;
}

void OamModelParams::validate() const {
  if (!std::isfinite(k_fringe)) throw DomainError("oam model: k_fringe must be finite");
  if (!(b >= 0.0) || !(b <= a)) throw DomainError("oam model: need 0 <= B <= A");
}

InterferogramGrid synthesize_oam_model(const OamModelParams& params, const SamplingGrid& geometry,
                                       std::optional<Point2> center) {
  params.validate();
  const Point2 c = center.value_or(geometry.center());
  InterferogramGrid out;
  out.geometry = geometry;
  out.port = Port::O;
  out.phase_offset = params.theta;
  out.intensity = Grid2D<double>(geometry.rows, geometry.cols);
  for (std::size_t r = 0; r < geometry.rows; ++r) {
    const double dv = geometry.v_center(r) - c.v;
    auto row = out.intensity.row(r);
    for (std::size_t k = 0; k < geometry.cols; ++k) {
      const double du = geometry.u_center(k) - c.u;
      const double s = params.axis == FringeAxis::V ? dv : du;
      const double phi = std::atan2(dv, du);
      row[k] = params.a + params.b * std::cos(params.k_fringe * s - params.q * phi + params.theta);
    }
  }
  out.provenance["model"] = "oam";
  out.provenance["q"] = std::to_string(params.q);
  return out;
}

InterferogramGrid bin_to_detector(const InterferogramGrid& fine, const DetectorSpec& det) {
  det.validate();
  const auto& g = fine.geometry;
  if (std::abs(g.pitch_u - g.pitch_v) > 1e-9 * g.pitch_u)
    throw ResamplingError("bin_to_detector: fine grid pixels are not square");
  const double ratio = det.pixel_pitch / g.pitch_u;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-6 * n)
    throw ResamplingError("bin_to_detector: detector pitch is not an integer multiple of the fine pitch");
  const auto block = static_cast<std::size_t>(n);
  if (g.cols < det.width * block || g.rows < det.height * block)
    throw ResamplingError("bin_to_detector: fine grid is smaller than the detector");

  InterferogramGrid out = fine;
  out.geometry = {g.origin_u, g.origin_v, det.pixel_pitch, det.pixel_pitch, det.width, det.height};
  out.intensity = Grid2D<double>(det.height, det.width, 0.0);
  const double norm = 1.0 / static_cast<double>(block * block);
  for (std::size_t r = 0; r < det.height; ++r) {
    for (std::size_t c = 0; c < det.width; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < block; ++i) {
        const auto src = fine.intensity.row(r * block + i);
        for (std::size_t j = 0; j < block; ++j) sum += src[c * block + j];
      }
      out.intensity(r, c) = sum * norm;
    }
  }
  out.provenance["binning"] = std::to_string(block);
  return out;
}

double pattern_contrast(const InterferogramGrid& pattern) {
  const auto v = pattern.intensity.values();
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

ForkCount analyze_fork(const InterferogramGrid& pattern, Point2 center, const ForkCountOptions& options) {
  const auto& g = pattern.geometry;
  if (pattern.intensity.empty()) throw AnalysisError("fork_fringe_count: empty pattern");
  const bool along_v = options.axis == FringeAxis::V;

  // Cut lines run along the fringe normal, displaced across it.
  const std::size_t n_along = along_v ? g.rows : g.cols;
  const std::size_t n_across = along_v ? g.cols : g.rows;
  const std::size_t c_along = along_v ? pixel_index(center.v, g.origin_v, g.pitch_v, g.rows, "v")
                                      : pixel_index(center.u, g.origin_u, g.pitch_u, g.cols, "u");
  const std::size_t c_across = along_v ? pixel_index(center.u, g.origin_u, g.pitch_u, g.cols, "u")
                                       : pixel_index(center.v, g.origin_v, g.pitch_v, g.rows, "v");
  const auto off = static_cast<std::size_t>(std::max(options.offset_pixels, 1));
  if (c_across < off || c_across + off >= n_across)
    throw AnalysisError("fork_fringe_count: cut lines fall outside the pattern");

  const std::size_t reach = std::min(c_along, n_along - 1 - c_along);
  const std::size_t half = std::min(options.half_length.value_or(reach), reach);
  if (half < 2) throw AnalysisError("fork_fringe_count: cut lines are too short");

  const auto sample = [&](std::size_t across) {
    std::vector<double> line;
    line.reserve(2 * half + 1);
    for (std::size_t a = c_along - half; a <= c_along + half; ++a)
      line.push_back(along_v ? pattern.intensity(a, across) : pattern.intensity(across, a));
    return line;
  };
  auto low = sample(c_across - off);
  auto high = sample(c_across + off);

  double lo = low.front();
  double hi = low.front();
  for (std::size_t i = 0; i < low.size(); ++i) {
    lo = std::min({lo, low[i], high[i]});
    hi = std::max({hi, low[i], high[i]});
  }
  const double contrast = hi - lo;
  if (!(contrast > 1e-6 * std::max(1.0, std::abs(hi))))
    throw AnalysisError("fork_fringe_count: no resolvable fringes (contrast below threshold)");

  // Both lines end at the darkest point of their sum near either end, where
  // their phases agree, so boundary maxima cannot be counted on one line only.
  const std::size_t quarter = std::max<std::size_t>(1, low.size() / 4);
  const auto sum_at = [&](std::size_t i) { return low[i] + high[i]; };
  std::size_t start = 0;
  for (std::size_t i = 1; i < quarter; ++i)
    if (sum_at(i) < sum_at(start)) start = i;
  std::size_t stop = low.size() - 1;
  for (std::size_t i = low.size() - quarter; i < low.size(); ++i)
    if (sum_at(i) < sum_at(stop)) stop = i;

  const double threshold = options.threshold_fraction * contrast;
  const auto window = [&](const std::vector<double>& line) {
    return std::vector<double>(line.begin() + static_cast<std::ptrdiff_t>(start),
                               line.begin() + static_cast<std::ptrdiff_t>(stop) + 1);
  };
  ForkCount result;
  result.maxima_low = hysteresis_maxima(window(low), threshold);
  result.maxima_high = hysteresis_maxima(window(high), threshold);
  if (result.maxima_low.empty() && result.maxima_high.empty())
    throw AnalysisError("fork_fringe_count: no fringe maxima found on the cut lines");
  const double shift = static_cast<double>(c_along - half + start);
  for (auto& p : result.maxima_low) p += shift;
  for (auto& p : result.maxima_high) p += shift;

  const int n_low = static_cast<int>(result.maxima_low.size());
  const int n_high = static_cast<int>(result.maxima_high.size());
  result.charge = along_v ? n_low - n_high : n_high - n_low;
  return result;
}

int fork_fringe_count(const InterferogramGrid& pattern, Point2 center, const ForkCountOptions& options) {
  return analyze_fork(pattern, center, options).charge;
}

}  // namespace nifsim
