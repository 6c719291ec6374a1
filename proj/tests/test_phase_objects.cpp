#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nifsim/error.hpp"
#include "nifsim/phase_objects.hpp"
#include "oracles/voxel_march.hpp"
#include "support/gen.hpp"

using namespace nifsim;

namespace {

constexpr double kPi = std::numbers::pi;

PhaseObjectSpec spiral(double diameter, int turns, double step, double base = 1e-3, Point2 c = {}) {
  SpiralPlate s;
  s.diameter = diameter;
  s.turns = turns;
  s.step_height = step;
  s.base_thickness = base;
  return {s, c, Material::aluminium()};
}

PhaseObjectSpec wedge(double alpha, double extent, WedgeOrientation o) {
  return {Wedge{alpha, o, extent}, {}, Material::aluminium()};
}

PhaseObjectSpec slab(double t, double eu, double ev, Point2 c = {}) {
  return {Slab{t, eu, ev}, c, Material::aluminium()};
}

ThicknessMap normal_projection(const PhaseObjectSpec& spec, const SamplingGrid& field) {
  return radon_project(slice_object(spec, field), kPi / 2, field.pitch_u);
}

double map_sum(const ThicknessMap& m) {
  double s = 0.0;
  for (double x : m.values.values()) s += x;
  return s;
}

// One (x,y) slice holding a disc of radius r centred at the origin.
SliceStack disc_stack(double r, double dx) {
  SliceStack st;
  st.columns = static_cast<std::size_t>(std::ceil(2.4 * r / dx));
  st.dx = dx;
  st.x0 = -0.5 * static_cast<double>(st.columns) * dx;
  st.dz = dx;
  Slice sl;
  for (std::size_t i = 0; i < st.columns; ++i) {
    const double xc = st.x0 + (static_cast<double>(i) + 0.5) * dx;
    const double h = xc * xc < r * r ? std::sqrt(r * r - xc * xc) : 0.0;
    sl.y_start.push_back(-h);
    sl.depth.push_back(2.0 * h);
  }
  st.slices.push_back(sl);
  return st;
}

}  // namespace

TEST_SUITE("lambda thickness") {
  TEST_CASE("aluminium at 2.71 A") {
    // 2 pi / (6.026e28 * 3.449e-15 * 2.71e-10), evaluated with mpmath at 30 digits.
    CHECK(lambda_thickness(Material::aluminium(), 2.71e-10) == doctest::Approx(1.11554798e-4).epsilon(1e-8));
  }

  TEST_CASE("unit product gives one metre") {
    const Material m{1.0, 2.0 * kPi, "unit"};
    CHECK(lambda_thickness(m, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("doubling the wavelength halves the thickness") {
    const double a = lambda_thickness(Material::silicon(), 1.8e-10);
    const double b = lambda_thickness(Material::silicon(), 3.6e-10);
    CHECK(a / b == 2.0);
  }

  TEST_CASE("rejects non-physical input") {
    CHECK_THROWS_AS(lambda_thickness(Material::aluminium(), 0.0), DomainError);
    CHECK_THROWS_AS(lambda_thickness(Material::aluminium(), -1e-10), DomainError);
    CHECK_THROWS_AS(lambda_thickness(Material{3e-15, 0.0, "void"}, 2e-10), DomainError);
  }
}

TEST_SUITE("slicing") {
  TEST_CASE("slab slices are identical") {
    const auto spec = slab(2e-3, 4e-3, 4e-3);
    for (int n : {1, 3, 16}) {
      const SliceStack st = slice_object(spec, n);
      REQUIRE(st.slice_count() == static_cast<std::size_t>(n));
      for (const Slice& s : st.slices) {
        CHECK(s.depth == st.slices.front().depth);
        for (double d : s.depth) CHECK(d == 2e-3);
      }
    }
  }

  TEST_CASE("slice count and unbounded objects") {
    CHECK_THROWS_AS(slice_object(slab(1e-3, 1e-3, 1e-3), 0), DomainError);
    CHECK_THROWS_AS(slice_object(slab(1e-3, INFINITY, INFINITY), 8), DomainError);
    CHECK_NOTHROW(slice_object(slab(1e-3, INFINITY, INFINITY), SamplingGrid::centered(8, 8, 1e-3)));
  }

  TEST_CASE("vertical wedge depth grows linearly with slice height") {
    const double alpha = 0.2;
    const SliceStack st = slice_object(wedge(alpha, 8e-3, WedgeOrientation::Vertical), 40);
    for (std::size_t j = 0; j < st.slice_count(); ++j) {
      const double expected = std::tan(alpha) * (st.slices[j].z_center + 4e-3);
      for (double d : st.slices[j].depth) CHECK(d == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("horizontal wedge slices are identical ramps along x") {
    const SliceStack st = slice_object(wedge(0.3, 6e-3, WedgeOrientation::Horizontal), 30);
    for (const Slice& s : st.slices) CHECK(s.depth == st.slices.front().depth);
    const auto& d = st.slices.front().depth;
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] - d[i - 1] == doctest::Approx(std::tan(0.3) * st.dx));
  }

  TEST_CASE("spiral columns carry the analytic azimuthal thickness") {
    const auto spec = spiral(10e-3, 1, 2e-3);
    const auto field = SamplingGrid::centered(64, 64, 10e-3 / 60, {0.1e-3, -0.05e-3});
    const SliceStack st = slice_object(spec, field);
    for (std::size_t j = 0; j < st.slice_count(); ++j) {
      for (std::size_t i = 0; i < st.columns; ++i) {
        const double x = field.u_center(i);
        const double z = field.v_center(j);
        const double r = std::hypot(x, z);
        if (r > 5e-3 || r < field.pitch_u) continue;
        double phi = std::atan2(z, x);
        if (phi < 0.0) phi += 2.0 * kPi;
        CHECK(st.slices[j].depth[i] == doctest::Approx(1e-3 + 2e-3 * phi / (2.0 * kPi)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("only the cell holding the axis takes the mid-value") {
    const double pitch = 1e-4;
    const auto spec = spiral(4e-3, 3, 1e-3);
    // Axis at a cell centre: exactly one cell contains it.
    const auto on_centre = SamplingGrid::centered(41, 41, pitch);
    const SliceStack a = slice_object(spec, on_centre);
    CHECK(a.slices[20].depth[20] == doctest::Approx(3 * (1e-3 + 0.5e-3)).epsilon(1e-14));
    CHECK(a.slices[20].depth[21] == doctest::Approx(3e-3).epsilon(1e-12));
    // Axis on a cell corner: no cell contains it, the four neighbours keep
    // their centre values.
    const auto on_corner = SamplingGrid::centered(40, 40, pitch);
    const SliceStack b = slice_object(spec, on_corner);
    const double q1 = 3 * (1e-3 + 1e-3 * 0.125);
    const double q3 = 3 * (1e-3 + 1e-3 * 0.625);
    CHECK(b.slices[20].depth[20] == doctest::Approx(q1).epsilon(1e-12));
    CHECK(b.slices[19].depth[19] == doctest::Approx(q3).epsilon(1e-12));
  }
}

TEST_SUITE("radon projection") {
  TEST_CASE("slab chord is its thickness inside the footprint and zero outside") {
    const auto field = SamplingGrid::centered(50, 50, 1e-4);
    const ThicknessMap m = normal_projection(slab(3e-3, 2e-3, 3e-3), field);
    for (std::size_t r = 0; r < field.rows; ++r) {
      for (std::size_t c = 0; c < field.cols; ++c) {
        const bool inside = std::abs(field.u_center(c)) < 1e-3 && std::abs(field.v_center(r)) < 1.5e-3;
        CHECK(m.values(r, c) == doctest::Approx(inside ? 3e-3 : 0.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("disc chord at normal incidence") {
    const double r = 1.0;
    const double pitch = r / 250.0;
    const SliceStack st = disc_stack(r, pitch);
    const ThicknessMap m = radon_project(st, kPi / 2, pitch);
    double worst = 0.0;
    for (std::size_t k = 0; k < m.geometry.cols; ++k) {
      const double p = st.x0 + (static_cast<double>(k) + 0.5) * pitch;
      const double chord = p * p < r * r ? 2.0 * std::sqrt(r * r - p * p) : 0.0;
      worst = std::max(worst, std::abs(m.values(0, k) - chord));
    }
    CHECK(worst < pitch);
  }

  TEST_CASE("disc chord is rotation invariant to within one pitch") {
    const double r = 1.0;
    const double pitch = r / 250.0;
    // Odd subdivision keeps normal-incidence rays on column centres, away from
    // the staircase edges of the fixture itself.
    const SliceStack st = disc_stack(r, pitch / 3);
    for (double deg : {15.0, 30.0, 45.0, 60.0, 90.0, 120.0, 135.0, 170.0}) {
      CAPTURE(deg);
      const ThicknessMap m = radon_project(st, deg * kPi / 180.0, pitch);
      double worst = 0.0;
      for (std::size_t k = 0; k < m.geometry.cols; ++k) {
        const double p = st.x0 + (static_cast<double>(k) + 0.5) * pitch;
        const double chord = p * p < r * r ? 2.0 * std::sqrt(r * r - p * p) : 0.0;
        worst = std::max(worst, std::abs(m.values(0, k) - chord));
      }
      CHECK(worst < pitch);
    }
  }

  TEST_CASE("argument checks") {
    const SliceStack st = disc_stack(1.0, 0.1);
    CHECK_THROWS_AS(radon_project(st, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(radon_project(st, 4.0, 0.1), DomainError);
    CHECK_THROWS_AS(radon_project(st, 1.0, 0.0), DomainError);
    CHECK(radon_project(SliceStack{}, 1.0, 0.1).values.empty());
  }

  TEST_CASE("spiral agrees with the voxel ray-marcher") {
    const double d = 15e-3;
    const double step = lambda_thickness(Material::aluminium(), 2.71e-10);
    const Point2 c{0.13e-3, -0.21e-3};
    const auto spec = spiral(d, 2, step, 1e-3, c);
    const auto field = SamplingGrid::centered(180, 180, 1e-4);
    const ThicknessMap m = normal_projection(spec, field);
    const oracle::SpiralVolume vol{c.u, c.v, 0.5 * d, 1e-3, step, 2};
    const std::size_t ny = 2000;
    const double dy = 2.0 * (1e-3 + step) * 1.01 / static_cast<double>(ny);
    const Grid2D<double> ref = oracle::march(vol, field, ny, dy);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      num += std::pow(m.values.values()[i] - ref.values()[i], 2);
      den += std::pow(ref.values()[i], 2);
    }
    CHECK(std::sqrt(num / den) < 5e-3);
  }

  TEST_CASE("property: projection of a disjoint union is the sum") {
    testgen::Gen g(0x5eed01);
    for (int trial = 0; trial < 40; ++trial) {
      SliceStack a, b, u;
      const std::size_t cols = static_cast<std::size_t>(g.integer(4, 40));
      for (SliceStack* st : {&a, &b, &u}) {
        st->columns = cols;
        st->dx = g.uniform(0.5, 2.0);
        st->x0 = -0.5 * static_cast<double>(cols);
        st->dz = 1.0;
        st->slices.resize(1);
        st->slices[0].y_start.assign(cols, 0.0);
        st->slices[0].depth.assign(cols, 0.0);
      }
      b.dx = u.dx = a.dx;
      for (std::size_t i = 0; i < cols; ++i) {
        SliceStack& owner = g.coin() ? a : b;
        const double y0 = g.uniform(-3.0, 3.0);
        const double dep = g.uniform(0.0, 4.0);
        owner.slices[0].y_start[i] = u.slices[0].y_start[i] = y0;
        owner.slices[0].depth[i] = u.slices[0].depth[i] = dep;
      }
      const double angle = g.uniform(0.05, kPi);
      const double pitch = g.uniform(0.3, 1.5);
      const auto pa = radon_project(a, angle, pitch);
      const auto pb = radon_project(b, angle, pitch);
      const auto pu = radon_project(u, angle, pitch);
      for (std::size_t k = 0; k < pu.values.size(); ++k)
        CHECK(pu.values.values()[k] == doctest::Approx(pa.values.values()[k] + pb.values.values()[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("property: projected volume within 1% at pitch <= D/200") {
    testgen::Gen g(0x5eed02);
    for (int trial = 0; trial < 12; ++trial) {
      const double d = g.uniform(5e-3, 20e-3);
      const int turns = g.integer(1, 3);
      const double step = g.uniform(50e-6, 500e-6);
      const double base = g.uniform(0.2e-3, 2e-3);
      const Point2 c{g.uniform(-0.1, 0.1) * d, g.uniform(-0.1, 0.1) * d};
      const double pitch = d / g.uniform(200.0, 260.0);
      const auto field = SamplingGrid::centered(static_cast<std::size_t>(1.3 * d / pitch),
                                                static_cast<std::size_t>(1.3 * d / pitch), pitch);
      const ThicknessMap m = normal_projection(spiral(d, turns, step, base, c), field);
      const double volume = turns * (base + 0.5 * step) * kPi * 0.25 * d * d;
      CHECK(map_sum(m) * pitch * pitch == doctest::Approx(volume).epsilon(0.01));
    }
  }

  TEST_CASE("wedge volume") {
    const double e = 6e-3, alpha = 0.25, pitch = e / 240;
    const auto field = SamplingGrid::centered(260, 260, pitch);
    const ThicknessMap m = normal_projection(wedge(alpha, e, WedgeOrientation::Vertical), field);
    CHECK(map_sum(m) * pitch * pitch == doctest::Approx(0.5 * std::tan(alpha) * e * e * e).epsilon(0.01));
  }

  TEST_CASE("halving the slice spacing reduces the error monotonically") {
    const double e = 4e-3, alpha = 0.3;
    const auto spec = wedge(alpha, e, WedgeOrientation::Vertical);
    double previous = INFINITY;
    for (int n : {10, 20, 40, 80, 160}) {
      const double dz = e / n;
      const SamplingGrid field{-0.5 * e, -0.5 * e, e / 40, dz, 40, static_cast<std::size_t>(n)};
      const ThicknessMap m = normal_projection(spec, field);
      double worst = 0.0;
      for (int s = 0; s < 997; ++s) {
        const double v = -0.5 * e + (s + 0.5) * e / 997;
        const auto row = static_cast<std::size_t>((v + 0.5 * e) / dz);
        worst = std::max(worst, std::abs(m.values(row, 20) - spec.thickness_at(0.0, v)));
      }
      CAPTURE(n);
      CHECK(worst < previous);
      previous = worst;
    }
  }
}

TEST_SUITE("composition") {
  TEST_CASE("stacked maps add") {
    const auto field = SamplingGrid::centered(60, 60, 2e-4);
    const double step = 1.1e-4;
    const auto one = normal_projection(spiral(10e-3, 1, step), field);
    const auto two = normal_projection(spiral(10e-3, 2, step), field);
    const std::vector<ThicknessMap> pair{one, one};
    const ThicknessMap sum = compose_thickness(pair);
    for (std::size_t i = 0; i < sum.values.size(); ++i)
      CHECK(sum.values.values()[i] == doctest::Approx(two.values.values()[i]).epsilon(1e-12));
  }

  TEST_CASE("adding a zero map changes nothing") {
    const auto field = SamplingGrid::centered(30, 30, 2e-4);
    const auto m = normal_projection(spiral(5e-3, 1, 1e-4), field);
    const std::vector<ThicknessMap> maps{m, ThicknessMap{field, Grid2D<double>(30, 30, 0.0)}};
    CHECK(compose_thickness(maps).values == m.values);
  }

  TEST_CASE("three plates jump by three step heights across the cut") {
    const double step = 1.1155e-4;
    const auto field = SamplingGrid::centered(101, 101, 1e-4);
    const std::vector<PhaseObjectSpec> objs(3, spiral(8e-3, 1, step));
    const ThicknessMap m = project_objects(objs, field);
    // Row just above and just below the cut at u ~ 2 mm.
    const double jump = m.values(49, 70) - m.values(51, 70);
    CHECK(jump == doctest::Approx(3 * step).epsilon(0.03));
  }

  TEST_CASE("grid mismatch and empty input") {
    const ThicknessMap a{SamplingGrid::centered(4, 4, 1.0), Grid2D<double>(4, 4, 1.0)};
    const ThicknessMap b{SamplingGrid::centered(5, 4, 1.0), Grid2D<double>(4, 5, 1.0)};
    const std::vector<ThicknessMap> both{a, b};
    CHECK_THROWS_AS(compose_thickness(both), ShapeError);
    CHECK_THROWS_AS(compose_thickness(std::span<const ThicknessMap>{}), ShapeError);
  }

  TEST_CASE("no present objects project to zero") {
    const auto field = SamplingGrid::centered(8, 8, 1e-3);
    const std::vector<PhaseObjectSpec> objs{spiral(4e-3, 0, 1e-4)};
    const ThicknessMap m = project_objects(objs, field);
    for (double x : m.values.values()) CHECK(x == 0.0);
  }
}
