#include "nifsim/analysis.hpp"

#include <cmath>

#include "nifsim/constants.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

const char* regime_name(DiffractionRegime regime) {
  return regime == DiffractionRegime::Fresnel ? "Fresnel" : "Fraunhofer";
}

FresnelNumber fresnel_number(double aperture, double wavelength, double distance) {
  if (!(aperture > 0.0) || !(wavelength > 0.0) || !(distance > 0.0))
    throw DomainError("fresnel_number: aperture, wavelength and distance must be > 0");
  const double f = aperture * aperture / (wavelength * distance);
  return {f, f >= 1.0 ? DiffractionRegime::Fresnel : DiffractionRegime::Fraunhofer};
}

const char* coherence_area_name(CoherenceArea convention) {
  switch (convention) {
    case CoherenceArea::Rectangle: return "rectangle";
    case CoherenceArea::Ellipse: return "ellipse";
    case CoherenceArea::Disc: return "disc";
  }
  return "rectangle";
}

double coherence_area(double sigma_x, double sigma_z, CoherenceArea convention) {
  const double rect = sigma_x * sigma_z;
  switch (convention) {
    case CoherenceArea::Rectangle: return rect;
    case CoherenceArea::Ellipse: return 0.25 * constants::pi * rect;
    case CoherenceArea::Disc: return constants::pi * rect;
  }
  return rect;
}

double oam_capture_estimate(double flux, double sigma_x, double sigma_z, double duration, CoherenceArea convention) {
  if (!(flux >= 0.0) || !(sigma_x > 0.0) || !(sigma_z > 0.0) || !(duration >= 0.0))
    throw DomainError("oam_capture_estimate: inputs must be positive");
  return flux * coherence_area(sigma_x, sigma_z, convention) * duration;
}

double refractive_decrement(const Material& material, double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("refractive_decrement: wavelength must be > 0");
  material.validate();
  return std::abs(wavelength * wavelength * material.atom_density * material.coherent_scattering_length /
                  constants::two_pi);
}

WedgeDeflection wedge_deflection(const Material& material, double wavelength, double opening_angle,
                                 double flight_path, double pixel_pitch) {
  if (!(opening_angle > 0.0 && opening_angle < constants::pi / 2))
    throw DomainError("wedge_deflection: opening_angle must lie in (0, pi/2)");
  if (!(flight_path >= 0.0) || !(pixel_pitch > 0.0))
    throw DomainError("wedge_deflection: flight_path must be >= 0 and pixel_pitch > 0");
  WedgeDeflection d;
  d.refractive_decrement = refractive_decrement(material, wavelength);
  d.deflection = d.refractive_decrement * std::tan(opening_angle);
  d.flight_path = flight_path;
  d.displacement = d.deflection * flight_path;
  d.pixel_pitch = pixel_pitch;
  d.same_pixel = d.displacement < pixel_pitch;
  return d;
}

double opening_angle_for_deflection(const Material& material, double wavelength, double deflection) {
  if (!(deflection > 0.0)) throw DomainError("opening_angle_for_deflection: deflection must be > 0");
  return std::atan(deflection / refractive_decrement(material, wavelength));
}

void CoherenceParams::validate() const {
  if (!(sigma_x > 0.0) || !(sigma_z > 0.0) || !(aperture > 0.0) || !(wavelength > 0.0))
    throw DomainError("coherence: sigma_x, sigma_z, aperture and wavelength must be > 0");
}

double transverse_amplitude(const TransverseProfile& profile, double x, double y) {
  if (!(profile.sigma > 0.0)) throw DomainError("transverse_amplitude: sigma must be > 0");
  const double s2 = profile.sigma * profile.sigma;
  const double dx = x - profile.center.u;
  const double dy = y - profile.center.v;
  return std::exp(-(dx * dx + dy * dy) / (4.0 * s2)) / std::sqrt(constants::two_pi * s2);
}

ProfileComparison transverse_profile_compare(const TransverseProfile& isotropic, const CoherenceParams& realistic) {
  if (!(isotropic.sigma > 0.0)) throw DomainError("transverse_profile_compare: sigma must be > 0");
  realistic.validate();
  ProfileComparison c;
  c.sigma_isotropic = isotropic.sigma;
  c.sigma_x = realistic.sigma_x;
  c.sigma_z = realistic.sigma_z;
  c.anisotropy_ratio = realistic.sigma_x / realistic.sigma_z;
  c.anisotropic = c.anisotropy_ratio > 10.0;
  // Gaussian overlap per axis: sqrt(2 s a / (s^2 + a^2)).
  const auto axis = [s = isotropic.sigma](double a) { return std::sqrt(2.0 * s * a / (s * s + a * a)); };
  c.overlap = axis(realistic.sigma_x) * axis(realistic.sigma_z);
  return c;
}

}  // namespace nifsim
