#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "nifsim/dyndiff.hpp"
#include "nifsim/error.hpp"
#include "support/gen.hpp"

using namespace nifsim;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form diffracted intensity, written out independently of the library.
double ig_closed(double a1, double y) {
  const double w = 1.0 + y * y;
  const double s = std::sin(a1 * std::sqrt(w));
  return s * s / w;
}

CrystalParams thirty_degree_plate() {
  CrystalParams p = CrystalParams::silicon_220(2.71e-10);
  p.bragg_angle = kPi / 6;
  return p;
}

}  // namespace

TEST_SUITE("branches") {
  TEST_CASE("amplitude ratios multiply to -1") {
    testgen::Gen g(11);
    const auto p = CrystalParams::silicon_220(2.71e-10);
    for (int i = 0; i < 200; ++i) {
      const double y = g.uniform(-1e3, 1e3);
      const auto b = branch_amplitudes(p, y);
      CHECK(b.x1 * b.x2 == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(b.eps1 / b.eps2 == doctest::Approx(b.x1 / b.x2).epsilon(1e-12));
    }
  }

  TEST_CASE("exact Bragg condition gives unit ratios") {
    const auto b = branch_amplitudes(CrystalParams::silicon_220(2.71e-10), 0.0);
    CHECK(b.x1 == 1.0);
    CHECK(b.x2 == -1.0);
  }

  TEST_CASE("non-finite deviation is rejected") {
    CHECK_THROWS_AS(branch_amplitudes(CrystalParams::silicon_220(2.71e-10), NAN), DomainError);
  }
}

TEST_SUITE("crystal functions") {
  TEST_CASE("property: unitarity") {
    testgen::Gen g(12);
    for (int i = 0; i < 2000; ++i) {
      const RockingPoint pt{g.uniform(-50.0, 50.0), g.uniform(0.0, 400.0)};
      const auto f = crystal_functions(pt);
      CHECK(std::norm(f.v0) + std::norm(f.vg) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("property: assembly matches the closed form") {
    testgen::Gen g(13);
    for (int i = 0; i < 2000; ++i) {
      const double y = g.uniform(-10.0, 10.0);
      const double a1 = g.uniform(1e-3, 20.0);
      CHECK(std::abs(std::norm(crystal_functions(RockingPoint{y, a1}).vg) - ig_closed(a1, y)) < 1e-10);
      CHECK(std::abs(laue_intensities({y, a1}).diffracted - ig_closed(a1, y)) < 1e-14);
    }
  }

  TEST_CASE("physical parameters route through the same A1") {
    testgen::Gen g(14);
    for (int i = 0; i < 50; ++i) {
      auto p = CrystalParams::silicon_220(g.uniform(1.5e-10, 3.5e-10), g.uniform(1e-4, 1e-2));
      const double y = g.uniform(-5.0, 5.0);
      const double a1 = a1_parameter(p);
      // 1e-10 relative on phases of order A1 ~ 1e3 leaves ~1e-7 in sin^2.
      CHECK(std::abs(std::norm(crystal_functions(p, y).vg) - ig_closed(a1, y)) < 1e-6);
    }
  }

  TEST_CASE("quarter and half Pendelloesung periods") {
    CHECK(laue_intensities({0.0, kPi / 2}).diffracted == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(laue_intensities({0.0, kPi}).diffracted == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(laue_intensities({0.0, kPi}).forward == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("off-Bragg value at A1 = pi/2, y = 1") {
    // sin^2(pi sqrt(2) / 2) / 2, evaluated with mpmath at 30 digits.
    CHECK(laue_intensities({1.0, kPi / 2}).diffracted == doctest::Approx(0.3165638355).epsilon(1e-9));
    CHECK(std::norm(crystal_functions(RockingPoint{1.0, kPi / 2}).vg) ==
          doctest::Approx(0.3165638355).epsilon(1e-9));
  }

  TEST_CASE("Pendelloesung zeros at multiples of pi") {
    for (int m = 1; m <= 20; ++m) {
      CAPTURE(m);
      CHECK(laue_intensities({0.0, m * kPi}).diffracted < 1e-24);
    }
  }

  TEST_CASE("property: rocking curve is even in y") {
    testgen::Gen g(15);
    for (int i = 0; i < 500; ++i) {
      const double y = g.uniform(0.0, 20.0);
      const double a1 = g.uniform(0.0, 30.0);
      CHECK(laue_intensities({y, a1}).diffracted == doctest::Approx(laue_intensities({-y, a1}).diffracted));
      CHECK(std::norm(crystal_functions(RockingPoint{y, a1}).vg) ==
            doctest::Approx(std::norm(crystal_functions(RockingPoint{-y, a1}).vg)).epsilon(1e-10));
    }
  }

  TEST_CASE("series helpers sample the curves") {
    const auto rc = rocking_curve(kPi / 2, -10.0, 10.0, 401);
    REQUIRE(rc.size() == 401);
    CHECK(rc.front().first == -10.0);
    CHECK(rc.back().first == 10.0);
    CHECK(rc[200].second == doctest::Approx(1.0));
    const auto ps = pendellosung_sweep(0.0, 0.0, 4 * kPi, 5);
    for (const auto& [a1, ig] : ps) CHECK(ig == doctest::Approx(ig_closed(a1, 0.0)));
    CHECK_THROWS_AS(rocking_curve(1.0, 0.0, 1.0, 1), DomainError);
  }
}

TEST_SUITE("thickness parameter") {
  TEST_CASE("A1 of the 4.46 mm silicon plate") {
    CHECK(a1_parameter(CrystalParams::silicon_220(2.71e-10)) == doctest::Approx(353.46).epsilon(1e-4));
  }

  TEST_CASE("A1 is linear in thickness and vanishes with V(G)") {
    auto p = CrystalParams::silicon_220(2.71e-10, 1e-3);
    auto q = p;
    q.plate_thickness = 3e-3;
    CHECK(a1_parameter(q) == doctest::Approx(3.0 * a1_parameter(p)).epsilon(1e-14));
    p.fourier_potential = 0.0;
    CHECK(a1_parameter(p) == 0.0);
    CHECK_THROWS_AS(pendellosung_thickness(p, 1), DomainError);
  }

  TEST_CASE("Pendelloesung thickness reaches m pi") {
    auto p = CrystalParams::silicon_220(2.71e-10);
    CHECK(pendellosung_thickness(p, 1) == doctest::Approx(3.964e-5).epsilon(1e-3));
    for (int m = 1; m <= 4; ++m) {
      p.plate_thickness = pendellosung_thickness(p, m);
      CHECK(a1_parameter(p) == doctest::Approx(m * kPi).epsilon(1e-12));
    }
    CHECK_THROWS_AS(pendellosung_thickness(p, 0), DomainError);
  }

  TEST_CASE("invalid crystals are rejected") {
    auto p = CrystalParams::silicon_220(2.71e-10);
    p.plate_thickness = -1.0;
    CHECK_THROWS_AS(crystal_functions(p, 0.0), DomainError);
    p = CrystalParams::silicon_220(2.71e-10);
    p.fourier_potential = p.neutron_energy;
    CHECK_THROWS_AS(crystal_functions(p, 0.0), DomainError);
    CHECK_THROWS_AS(CrystalParams::silicon_220(5e-10), DomainError);
  }
}

TEST_SUITE("interferometer") {
  TEST_CASE("port intensities at key phases") {
    CHECK(two_path_intensity(1.0, 0.0).forward == 1.0);
    CHECK(two_path_intensity(1.0, 0.0).diffracted == 0.0);
    CHECK(two_path_intensity(1.0, kPi).forward == doctest::Approx(0.0));
    CHECK(two_path_intensity(2.0, kPi / 2).forward == doctest::Approx(1.0));
    CHECK(two_path_intensity(2.0, kPi / 2).diffracted == doctest::Approx(1.0));
    CHECK_THROWS_AS(two_path_intensity(-1.0, 0.0), DomainError);
  }

  TEST_CASE("property: ports are complementary") {
    testgen::Gen g(16);
    for (int i = 0; i < 1000; ++i) {
      const double psi = g.uniform(0.0, 10.0);
      const auto out = two_path_intensity(psi, g.uniform(-50.0, 50.0));
      CHECK(std::abs(out.forward + out.diffracted - psi) <= 1e-12 * std::max(1.0, psi));
      CHECK(out.forward >= -1e-15);
      CHECK(out.diffracted >= -1e-15);
    }
  }
}

TEST_SUITE("wave packets") {
  WavePacketSpec packet() {
    WavePacketSpec s;
    s.k0 = 2.0 * kPi / 2.71e-10;
    s.delta_k = 1e-3 * s.k0;
    return s;
  }

  TEST_CASE("spectrum peak, width and normalization") {
    const auto s = packet();
    const double peak = gaussian_spectrum(s, s.k0);
    CHECK(peak == doctest::Approx(std::pow(2.0 * kPi * s.delta_k * s.delta_k, -0.25)));
    CHECK(gaussian_spectrum(s, s.k0 + s.delta_k) / peak == doctest::Approx(std::exp(-0.25)).epsilon(1e-9));
    CHECK(gaussian_spectrum(s, s.k0 - s.delta_k) / peak == doctest::Approx(std::exp(-0.25)).epsilon(1e-9));
    double norm = 0.0;
    const int n = 4000;
    const double h = 16.0 * s.delta_k / n;
    for (int i = 0; i <= n; ++i) {
      const double k = s.k0 - 8.0 * s.delta_k + i * h;
      norm += (i == 0 || i == n ? 0.5 : 1.0) * std::pow(gaussian_spectrum(s, k), 2) * h;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(gaussian_spectrum(WavePacketSpec{1.0, 0.0}, 1.0), DomainError);
  }

  TEST_CASE("packet at t = 0 is the Fourier-pair Gaussian") {
    const auto s = packet();
    const double dk = s.delta_k;
    const double amp = std::pow(2.0 * kPi * dk * dk, -0.25) * std::sqrt(4.0 * kPi * dk * dk) / std::sqrt(2.0 * kPi);
    for (double x : {0.0, 3e-9, -1.1e-8, 2.5e-8}) {
      CAPTURE(x);
      const std::complex<double> expected = std::polar(amp * std::exp(-dk * dk * x * x), s.k0 * x);
      const auto got = packet_evaluate(s, x, 0.0);
      CHECK(std::abs(got - expected) < 1e-7 * amp);
    }
  }

  TEST_CASE("envelope moves at the group velocity") {
    const auto s = packet();
    const double v = 1.054571817e-34 * s.k0 / 1.67492749804e-27;
    const double t = 2e-10;
    const double xg = v * t;
    const double d = 1e-8;
    const double centre = std::abs(packet_evaluate(s, xg, t));
    const double left = std::abs(packet_evaluate(s, xg - d, t));
    const double right = std::abs(packet_evaluate(s, xg + d, t));
    CHECK(centre > left);
    CHECK(centre > right);
    CHECK(left == doctest::Approx(right).epsilon(1e-6));
  }

  TEST_CASE("norm is conserved") {
    const auto s = packet();
    for (double t : {0.0, 1e-10}) {
      const double v = 1.054571817e-34 * s.k0 / 1.67492749804e-27;
      const double sigma = 1.0 / (2.0 * s.delta_k);
      const double span = 20.0 * sigma;
      const int n = 800;
      const double h = 2.0 * span / n;
      double norm = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double x = v * t - span + i * h;
        norm += (i == 0 || i == n ? 0.5 : 1.0) * std::norm(packet_evaluate(s, x, t)) * h;
      }
      CAPTURE(t);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-4));
    }
  }

  TEST_CASE("invalid packets are rejected") {
    WavePacketSpec s = packet();
    s.k0 = -1.0;
    CHECK_THROWS_AS(packet_evaluate(s, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(packet_evaluate(packet(), NAN, 0.0), DomainError);
  }
}

TEST_SUITE("geometric estimates") {
  TEST_CASE("Borrmann fan at 30 degrees") {
    CHECK(borrmann_fan_width(thirty_degree_plate()) == doctest::Approx(5.14996440e-3).epsilon(1e-8));
  }

  TEST_CASE("Moire magnification") {
    CHECK(moire_magnification(1.92e-10, 1.92e-10 * (1.0 + 1e-7)) == doctest::Approx(1e7).epsilon(1e-6));
    CHECK(moire_magnification(1.0, 2.0) == 2.0);
    CHECK(std::isinf(moire_magnification(1.0, 1.0)));
    CHECK_THROWS_AS(moire_magnification(0.0, 1.0), DomainError);
  }

  TEST_CASE("neutron energy at 1.8 A") {
    // h^2 / (2 m lambda^2) = 25.25 meV
    CHECK(neutron_energy(1.8e-10) / 1.602176634e-19 == doctest::Approx(0.025249).epsilon(1e-4));
  }
}
