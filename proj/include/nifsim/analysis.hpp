#pragma once

// Scalar feasibility estimates: diffraction regime, n-OAM capture rate, wedge
// deflection and transverse coherence anisotropy.

#include "nifsim/grid.hpp"
#include "nifsim/phase_objects.hpp"

namespace nifsim {

enum class DiffractionRegime { Fresnel, Fraunhofer };

const char* regime_name(DiffractionRegime regime);

struct FresnelNumber {
  double value = 0.0;
  DiffractionRegime regime = DiffractionRegime::Fraunhofer;
};

/// F = a^2 / (lambda y); Fresnel regime when F >= 1.
FresnelNumber fresnel_number(double aperture, double wavelength, double distance);

enum class CoherenceArea {
  Rectangle,  // sigma_x * sigma_z
  Ellipse,    // pi sigma_x sigma_z / 4
  Disc,       // pi sigma_x sigma_z
};

const char* coherence_area_name(CoherenceArea convention);

double coherence_area(double sigma_x, double sigma_z, CoherenceArea convention);

/// Expected number of wave packets centred within one coherence area of the
/// spiral axis: flux * area * duration. Flux in m^-2 s^-1.
double oam_capture_estimate(double flux, double sigma_x, double sigma_z, double duration,
                            CoherenceArea convention = CoherenceArea::Rectangle);

/// |n - 1| = lambda^2 N b_c / (2 pi) for thermal neutrons.
double refractive_decrement(const Material& material, double wavelength);

struct WedgeDeflection {
  double refractive_decrement = 0.0;
  double deflection = 0.0;    // rad
  double flight_path = 0.0;   // m
  double displacement = 0.0;  // deflection * flight_path (m)
  double pixel_pitch = 0.0;   // m
  bool same_pixel = false;    // displacement < pixel_pitch
};

/// Prism deflection |n - 1| tan(alpha) and the resulting lateral shift.
WedgeDeflection wedge_deflection(const Material& material, double wavelength, double opening_angle,
                                 double flight_path = 0.1, double pixel_pitch = 100e-6);

/// Opening angle at which the wedge deflects by `deflection`.
double opening_angle_for_deflection(const Material& material, double wavelength, double deflection);

struct CoherenceParams {
  double sigma_x = 5e-6;
  double sigma_z = 80e-9;
  double aperture = 2e-6;
  double wavelength = 2.71e-10;

  void validate() const;
  bool interferometer_regime() const { return sigma_z * 10.0 < sigma_x; }
};

/// Isotropic transverse Gaussian centred at (x0, y0).
struct TransverseProfile {
  Point2 center;
  double sigma = 0.0;
};

/// psi_t = (2 pi sigma^2)^-1/2 exp(-[(x-x0)^2 + (y-y0)^2] / (4 sigma^2)).
double transverse_amplitude(const TransverseProfile& profile, double x, double y);

struct ProfileComparison {
  double sigma_isotropic = 0.0;
  double sigma_x = 0.0;
  double sigma_z = 0.0;
  double anisotropy_ratio = 0.0;  // sigma_x / sigma_z
  bool anisotropic = false;       // ratio > 10
  double overlap = 0.0;           // <psi_isotropic | psi_realistic> for a common centre
};

ProfileComparison transverse_profile_compare(const TransverseProfile& isotropic, const CoherenceParams& realistic);

}  // namespace nifsim
