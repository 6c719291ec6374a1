#pragma once

// Macroscopic phase objects (spiral phase plate, wedge, slab) and their
// conversion into beam-path thickness maps by slice-wise Radon projection.
//
// Coordinates: u = x is horizontal and transverse to the beam, v = z is
// vertical, y is the beam axis. Objects are sliced along z; every slice is an
// (x,y) cross-section whose line integrals along y give the path length
// through matter.

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nifsim/grid.hpp"

namespace nifsim {

struct Material {
  double coherent_scattering_length = 0.0;  // b_c (m)
  double atom_density = 0.0;                // N (m^-3)
  std::string name;

  void validate() const;

  static Material aluminium();
  static Material silicon();

  friend bool operator==(const Material&, const Material&) = default;
};

/// Thickness producing a 2 pi phase shift: D_lambda = 2 pi / (N b_c lambda).
double lambda_thickness(const Material& material, double wavelength);

enum class WedgeOrientation { Vertical, Horizontal };

/// Thickness ramps linearly with azimuth: t = turns * (base + step * phi / 2pi),
/// phi in [0, 2pi) measured counter-clockwise from `rotation`.
struct SpiralPlate {
  double diameter = 15e-3;
  double step_height = 0.0;
  double base_thickness = 1e-3;
  int turns = 1;  // stacked identical plates; 0 = absent
  double rotation = 0.0;
  friend bool operator==(const SpiralPlate&, const SpiralPlate&) = default;
};

/// Square footprint of side `extent`; thickness is zero on the low edge and
/// grows as tan(opening_angle) along v (vertical) or u (horizontal).
struct Wedge {
  double opening_angle = 0.0;
  WedgeOrientation orientation = WedgeOrientation::Vertical;
  double extent = 0.0;
  friend bool operator==(const Wedge&, const Wedge&) = default;
};

/// Uniform plate; the footprint is unbounded unless extents are given.
struct Slab {
  double thickness = 0.0;
  double extent_u = std::numeric_limits<double>::infinity();
  double extent_v = std::numeric_limits<double>::infinity();
  friend bool operator==(const Slab&, const Slab&) = default;
};

struct PhaseObjectSpec {
  std::variant<SpiralPlate, Wedge, Slab> shape;
  Point2 center;
  Material material = Material::aluminium();

  void validate() const;
  bool present() const;

  /// Analytic path length along y at transverse position (u, v).
  double thickness_at(double u, double v) const;

  /// Axis-aligned footprint [u0,u1] x [v0,v1]; infinite for unbounded slabs.
  struct Bounds {
    double u0, u1, v0, v1;
  };
  Bounds bounds() const;

  friend bool operator==(const PhaseObjectSpec&, const PhaseObjectSpec&) = default;
};

/// One (x,y) cross-section. Column i spans [x0 + i dx, x0 + (i+1) dx] along x
/// and [y_start[i], y_start[i] + depth[i]] along y; depth 0 means no matter.
struct Slice {
  double z_center = 0.0;
  std::vector<double> y_start;
  std::vector<double> depth;
};

struct SliceStack {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t columns = 0;
  double z0 = 0.0;
  double dz = 0.0;  // slice thickness
  std::vector<Slice> slices;

  std::size_t slice_count() const { return slices.size(); }
};

struct ThicknessMap {
  SamplingGrid geometry;
  Grid2D<double> values;  // path length through matter (m)

  double pitch() const { return geometry.pitch_u; }
};

/// Slices over the object's own bounding square with slice_count slices and
/// square columns (dx = dz).
SliceStack slice_object(const PhaseObjectSpec& spec, int slice_count);

/// Slices aligned with the rows and columns of `field`.
SliceStack slice_object(const PhaseObjectSpec& spec, const SamplingGrid& field);

/// Line integrals of every slice along direction (cos angle, sin angle),
/// sampled at offsets p = x sin(angle) - y cos(angle) on the pixel centers
/// x0 + (k + 1/2) pitch. At angle = pi/2 the result is the chord along y.
ThicknessMap radon_project(const SliceStack& stack, double angle, double pitch);

/// Element-wise sum of maps that share one grid.
ThicknessMap compose_thickness(std::span<const ThicknessMap> maps);

/// Slice, project at normal incidence and sum all present objects on `field`.
ThicknessMap project_objects(std::span<const PhaseObjectSpec> objects, const SamplingGrid& field);

}  // namespace nifsim
