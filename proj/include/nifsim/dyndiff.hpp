#pragma once

// Two-beam dynamical Laue diffraction in a non-absorbing perfect crystal, the
// two-path interferometer output, Gaussian wave packets, and the geometric
// Borrmann/Moire estimates.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace nifsim {

struct CrystalParams {
  double wavelength = 0.0;         // m
  double bragg_angle = 0.0;        // rad
  double plate_thickness = 0.0;    // D (m)
  double fourier_potential = 0.0;  // V(G) (J)
  double neutron_energy = 0.0;     // E (J)
  double asymmetry_cos = 1.0;      // cos(gamma) = k_perp / k
  double lattice_spacing = 0.0;    // d of the diffracting planes (m)

  void validate() const;
  double wavenumber() const;

  /// Symmetric Laue case on Si(220): Bragg angle from lambda = 2 d sin(theta),
  /// V(G) = (2 pi hbar^2 / m) N b_c (|F_220| = 8 b_c for the diamond lattice).
  static CrystalParams silicon_220(double wavelength, double plate_thickness = 4.46e-3);

  friend bool operator==(const CrystalParams&, const CrystalParams&) = default;
};

/// Kinetic energy h^2 / (2 m lambda^2) of a neutron.
double neutron_energy(double wavelength);

struct RockingPoint {
  double y = 0.0;   // deviation parameter, ~ -2 sin(theta_B) dtheta
  double a1 = 0.0;  // thickness parameter A1
};

/// Amplitude ratios X = u(G)/u(0) and excitation errors of the alpha (1) and
/// beta (2) branches.
struct BranchAmplitudes {
  double x1 = 0.0;
  double x2 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

BranchAmplitudes branch_amplitudes(const CrystalParams& params, double y);

struct CrystalFunctions {
  std::complex<double> v0;  // forward beam behind the plate
  std::complex<double> vg;  // diffracted beam behind the plate
};

/// Crystal functions assembled from both dispersion branches.
CrystalFunctions crystal_functions(const CrystalParams& params, double y);

/// Same assembly with the branch phases written through A1 directly.
CrystalFunctions crystal_functions(const RockingPoint& point);

struct LaueIntensities {
  double diffracted = 0.0;  // I_G
  double forward = 0.0;     // I_0
};

/// Closed-form Laue intensities: I_G = sin^2(A1 sqrt(1+y^2)) / (1+y^2).
LaueIntensities laue_intensities(const RockingPoint& point);

/// A1 = k V(G) D / (2 cos(gamma) E).
double a1_parameter(const CrystalParams& params);

/// Plate thickness for which A1 = m pi (forward-beam Pendelloesung maximum).
double pendellosung_thickness(const CrystalParams& params, int order);

struct PortIntensities {
  double forward = 0.0;     // I_O
  double diffracted = 0.0;  // I_G
};

/// Interferometer output for phase difference chi between the paths:
/// I_O = psi0_sq (1 + cos chi) / 2 and I_G = psi0_sq - I_O.
PortIntensities two_path_intensity(double psi0_sq, double chi);

struct WavePacketSpec {
  double k0 = 0.0;       // mean wavenumber (m^-1)
  double delta_k = 0.0;  // spectral width (m^-1)
  double sigma_x = 5e-6;
  double sigma_z = 80e-9;

  void validate() const;
};

/// Gaussian spectral amplitude, normalized to unit integral of |Gamma|^2 dk.
double gaussian_spectrum(const WavePacketSpec& spec, double k);

/// psi(x, t) = (2 pi)^-1/2 Int Gamma(k - k0) exp[i(k x - Omega t)] dk with
/// Omega = hbar k^2 / (2 m), by adaptive Gauss-Kronrod over k0 +- 8 dk.
/// Throws NumericalError when the relative tolerance 1e-8 is not reached.
std::complex<double> packet_evaluate(const WavePacketSpec& spec, double x, double t);

/// Base 2 D tan(theta_B) of the Borrmann triangle.
double borrmann_fan_width(const CrystalParams& params);

/// Beat magnification fringe_d / |fringe_d - lattice_d|; +inf when equal.
double moire_magnification(double lattice_d, double fringe_d);

/// (y, I_G) samples of the rocking curve at fixed A1.
std::vector<std::pair<double, double>> rocking_curve(double a1, double y_min, double y_max, std::size_t samples);

/// (A1, I_G) samples at fixed y: the Pendelloesung oscillation with thickness.
std::vector<std::pair<double, double>> pendellosung_sweep(double y, double a1_min, double a1_max,
                                                          std::size_t samples);

}  // namespace nifsim
