#include "nifsim/phase_objects.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nifsim/constants.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool positive_length(double x) { return std::isfinite(x) && x > 0.0; }

// Azimuth about the plate axis relative to the branch cut, in [0, 2pi).
double relative_azimuth(double du, double dv, double rotation) {
  double phi = std::atan2(dv, du) - rotation;
  phi = std::fmod(phi, constants::two_pi);
  if (phi < 0.0) phi += constants::two_pi;
  if (phi >= constants::two_pi) phi = 0.0;
  return phi;
}

double spiral_thickness(const SpiralPlate& s, double phi) {
  return s.turns * (s.base_thickness + s.step_height * phi / constants::two_pi);
}

// True when the open cell interior holds the plate axis; offsets within 1e-9
// of the cell size count as lying on an edge.
bool contains_axis(double du0, double du1, double dv0, double dv1) {
  const double snap = 1e-9 * std::max(std::abs(du1 - du0), std::abs(dv1 - dv0));
  return du0 < -snap && du1 > snap && dv0 < -snap && dv1 > snap;
}

}  // namespace

void Material::validate() const {
  if (!(atom_density > 0.0) || !std::isfinite(atom_density))
    throw DomainError("material '" + name + "': atom_density must be > 0");
  if (coherent_scattering_length == 0.0 || !std::isfinite(coherent_scattering_length))
    throw DomainError("material '" + name + "': coherent_scattering_length must be non-zero");
}

Material Material::aluminium() { return {3.449e-15, 6.026e28, "Al"}; }

Material Material::silicon() { return {4.1491e-15, 4.994e28, "Si"}; }

double lambda_thickness(const Material& material, double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("lambda_thickness: wavelength must be > 0");
  material.validate();
  return constants::two_pi /
         (material.atom_density * material.coherent_scattering_length * wavelength);
}

void PhaseObjectSpec::validate() const {
  material.validate();
  std::visit(Overloaded{
                 [](const SpiralPlate& s) {
                   if (!positive_length(s.diameter)) throw DomainError("spiral plate: diameter must be > 0");
                   if (!positive_length(s.step_height))
                     throw DomainError("spiral plate: step_height must be > 0");
                   if (!positive_length(s.base_thickness))
                     throw DomainError("spiral plate: base_thickness must be > 0");
                   if (s.turns < 0) throw DomainError("spiral plate: turns must be >= 0");
                 },
                 [](const Wedge& w) {
                   if (!(w.opening_angle > 0.0 && w.opening_angle < constants::pi / 2))
                     throw DomainError("wedge: opening_angle must lie in (0, pi/2)");
                   if (!positive_length(w.extent)) throw DomainError("wedge: extent must be > 0");
                 },
                 [](const Slab& s) {
                   if (!positive_length(s.thickness)) throw DomainError("slab: thickness must be > 0");
                   if (!(s.extent_u > 0.0) || !(s.extent_v > 0.0))
                     throw DomainError("slab: extents must be > 0");
                 },
             },
             shape);
}

bool PhaseObjectSpec::present() const {
  if (const auto* s = std::get_if<SpiralPlate>(&shape)) return s->turns > 0;
  return true;
}

double PhaseObjectSpec::thickness_at(double u, double v) const {
  const double du = u - center.u;
  const double dv = v - center.v;
  return std::visit(Overloaded{
                        [&](const SpiralPlate& s) {
                          const double r = 0.5 * s.diameter;
                          if (du * du + dv * dv > r * r) return 0.0;
                          return spiral_thickness(s, relative_azimuth(du, dv, s.rotation));
                        },
                        [&](const Wedge& w) {
                          const double h = 0.5 * w.extent;
                          if (std::abs(du) > h || std::abs(dv) > h) return 0.0;
                          const double along = w.orientation == WedgeOrientation::Vertical ? dv : du;
                          return std::tan(w.opening_angle) * (along + h);
                        },
                        [&](const Slab& s) {
                          if (std::abs(du) > 0.5 * s.extent_u || std::abs(dv) > 0.5 * s.extent_v) return 0.0;
                          return s.thickness;
                        },
                    },
                    shape);
}

PhaseObjectSpec::Bounds PhaseObjectSpec::bounds() const {
  const auto [hu, hv] = std::visit(Overloaded{
                                       [](const SpiralPlate& s) { return std::pair{0.5 * s.diameter, 0.5 * s.diameter}; },
                                       [](const Wedge& w) { return std::pair{0.5 * w.extent, 0.5 * w.extent}; },
                                       [](const Slab& s) { return std::pair{0.5 * s.extent_u, 0.5 * s.extent_v}; },
                                   },
                                   shape);
  return {center.u - hu, center.u + hu, center.v - hv, center.v + hv};
}

SliceStack slice_object(const PhaseObjectSpec& spec, int slice_count) {
  if (slice_count < 1) throw DomainError("slice_object: slice_count must be >= 1");
  spec.validate();
  const auto b = spec.bounds();
  const double side = std::max(b.u1 - b.u0, b.v1 - b.v0);
  if (!std::isfinite(side))
    throw DomainError("slice_object: unbounded object needs an explicit sampling field");
  const auto n = static_cast<std::size_t>(slice_count);
  return slice_object(spec, SamplingGrid::centered(n, n, side / slice_count,
                                                   {0.5 * (b.u0 + b.u1), 0.5 * (b.v0 + b.v1)}));
}

SliceStack slice_object(const PhaseObjectSpec& spec, const SamplingGrid& field) {
  if (field.rows < 1) throw DomainError("slice_object: slice_count must be >= 1");
  if (!(field.pitch_u > 0.0) || !(field.pitch_v > 0.0))
    throw DomainError("slice_object: field pitch must be > 0");
  spec.validate();

  SliceStack stack;
  stack.x0 = field.origin_u;
  stack.dx = field.pitch_u;
  stack.columns = field.cols;
  stack.z0 = field.origin_v;
  stack.dz = field.pitch_v;
  stack.slices.resize(field.rows);

  const auto* spiral = std::get_if<SpiralPlate>(&spec.shape);
  for (std::size_t j = 0; j < field.rows; ++j) {
    Slice& slice = stack.slices[j];
    slice.z_center = field.v_center(j);
    slice.y_start.assign(field.cols, 0.0);
    slice.depth.assign(field.cols, 0.0);
    if (!spec.present()) continue;
    for (std::size_t i = 0; i < field.cols; ++i) {
      const double uc = field.u_center(i);
      double t = spec.thickness_at(uc, slice.z_center);
      if (spiral && t > 0.0) {
        const double du0 = field.origin_u + static_cast<double>(i) * field.pitch_u - spec.center.u;
        const double du1 = field.origin_u + static_cast<double>(i + 1) * field.pitch_u - spec.center.u;
        const double dv0 = field.origin_v + static_cast<double>(j) * field.pitch_v - spec.center.v;
        const double dv1 = field.origin_v + static_cast<double>(j + 1) * field.pitch_v - spec.center.v;
        if (contains_axis(du0, du1, dv0, dv1))
          t = spiral_thickness(*spiral, constants::pi);  // mid-value of the two cut sides
      }
      slice.depth[i] = t;
    }
  }
  return stack;
}

ThicknessMap radon_project(const SliceStack& stack, double angle, double pitch) {
  if (!(angle > 0.0 && angle <= constants::pi)) throw DomainError("radon_project: angle must lie in (0, pi]");
  if (!(pitch > 0.0)) throw DomainError("radon_project: pitch must be > 0");

  ThicknessMap map;
  if (stack.slices.empty()) return map;

  const double width = static_cast<double>(stack.columns) * stack.dx;
  const auto rays = static_cast<std::size_t>(std::max(1.0, std::round(width / pitch)));
  map.geometry = {stack.x0, stack.z0, pitch, stack.dz, rays, stack.slices.size()};
  map.values = Grid2D<double>(stack.slices.size(), rays, 0.0);

  // Ray k: points p n + s d with d = (cos, sin), n = (sin, -cos).
  const double c = std::abs(std::cos(angle)) < 1e-15 ? 0.0 : std::cos(angle);
  const double s = std::sin(angle);
  const auto ray_p = [&](std::size_t k) { return stack.x0 + (static_cast<double>(k) + 0.5) * pitch; };

  for (std::size_t j = 0; j < stack.slices.size(); ++j) {
    const Slice& slice = stack.slices[j];
    auto out = map.values.row(j);
    for (std::size_t i = 0; i < stack.columns; ++i) {
      const double depth = slice.depth[i];
      if (depth <= 0.0) continue;
      const double xa = stack.x0 + static_cast<double>(i) * stack.dx;
      const double xb = stack.x0 + static_cast<double>(i + 1) * stack.dx;  // shared with column i+1
      const double ya = slice.y_start[i];
      const double yb = ya + depth;

      const double corners[4] = {xa * s - ya * c, xb * s - ya * c, xa * s - yb * c, xb * s - yb * c};
      const auto [pmin, pmax] = std::minmax_element(std::begin(corners), std::end(corners));
      // One ray of slack either side; the clip decides rays on a cell edge.
      const double kmin = std::ceil((*pmin - stack.x0) / pitch - 0.5) - 1.0;
      const double kmax = std::floor((*pmax - stack.x0) / pitch - 0.5) + 1.0;
      for (double kf = std::max(kmin, 0.0); kf <= kmax && kf < static_cast<double>(rays); kf += 1.0) {
        const auto k = static_cast<std::size_t>(kf);
        const double p = ray_p(k);
        // Clip the line x = p s + t c, y = -p c + t s against the cell.
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        const auto clip = [&](double base, double dir, double lo, double hi) {
          if (dir == 0.0) {
            if (base < lo || base >= hi) t1 = t0 - 1.0;
            return;
          }
          double a = (lo - base) / dir;
          double b = (hi - base) / dir;
          if (a > b) std::swap(a, b);
          t0 = std::max(t0, a);
          t1 = std::min(t1, b);
        };
        clip(p * s, c, xa, xb);
        clip(-p * c, s, ya, yb);
        if (t1 > t0) out[k] += t1 - t0;
      }
    }
  }
  return map;
}

ThicknessMap compose_thickness(std::span<const ThicknessMap> maps) {
  if (maps.empty()) throw ShapeError("compose_thickness: no maps to compose");
  ThicknessMap sum = maps.front();
  for (const auto& m : maps.subspan(1)) {
    if (!m.geometry.matches(sum.geometry) || !m.values.same_shape(sum.values))
      throw ShapeError("compose_thickness: maps do not share one grid");
    auto dst = sum.values.values();
    auto src = m.values.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return sum;
}

ThicknessMap project_objects(std::span<const PhaseObjectSpec> objects, const SamplingGrid& field) {
  std::vector<ThicknessMap> maps;
  for (const auto& obj : objects) {
    if (!obj.present()) continue;
    maps.push_back(radon_project(slice_object(obj, field), constants::pi / 2, field.pitch_u));
  }
  if (maps.empty()) {
    return {field, Grid2D<double>(field.rows, field.cols, 0.0)};
  }
  auto sum = compose_thickness(maps);
  sum.geometry = field;
  return sum;
}

}  // namespace nifsim
