#include "nifsim/dyndiff.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nifsim/constants.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

namespace {

using cplx = std::complex<double>;

CrystalFunctions assemble(double x1, double x2, double phase1, double phase2) {
  if (x1 == x2) throw NumericalError("crystal_functions: X1 == X2, branch amplitudes are degenerate");
  const cplx e1 = std::polar(1.0, phase1);
  const cplx e2 = std::polar(1.0, phase2);
  const double denom = x2 - x1;
  return {(x2 * e1 - x1 * e2) / denom, x1 * x2 * (e1 - e2) / denom};
}

// X_{1,2} = -y +- sqrt(1 + y^2), each evaluated without cancellation.
std::pair<double, double> amplitude_ratios(double y) {
  const double s = std::hypot(1.0, y);
  const double x1 = y > 0.0 ? 1.0 / (y + s) : s - y;
  const double x2 = y < 0.0 ? -1.0 / (s - y) : -(y + s);
  return {x1, x2};
}

constexpr double kPacketHalfWidth = 8.0;  // in units of delta_k
constexpr double kPacketTolerance = 1e-8;

}  // namespace

void CrystalParams::validate() const {
  if (!(wavelength > 0.0)) throw DomainError("crystal: wavelength must be > 0");
  if (!(bragg_angle > 0.0 && bragg_angle < constants::pi / 2))
    throw DomainError("crystal: bragg_angle must lie in (0, pi/2)");
  if (!(plate_thickness > 0.0)) throw DomainError("crystal: plate_thickness must be > 0");
  if (!(asymmetry_cos > 0.0 && asymmetry_cos <= 1.0))
    throw DomainError("crystal: asymmetry_cos must lie in (0, 1]");
  if (!(neutron_energy > 0.0)) throw DomainError("crystal: neutron_energy must be > 0");
  if (!(std::abs(fourier_potential) < 1e-2 * neutron_energy))
    throw DomainError("crystal: fourier_potential must be << neutron_energy");
  if (!(lattice_spacing > 0.0)) throw DomainError("crystal: lattice_spacing must be > 0");
}

double CrystalParams::wavenumber() const { return constants::two_pi / wavelength; }

double neutron_energy(double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("neutron_energy: wavelength must be > 0");
  return constants::planck * constants::planck /
         (2.0 * constants::neutron_mass * wavelength * wavelength);
}

CrystalParams CrystalParams::silicon_220(double wavelength, double plate_thickness) {
  constexpr double a_si = 5.431020511e-10;
  constexpr double b_si = 4.1491e-15;
  constexpr double n_si = 8.0 / (a_si * a_si * a_si);
  CrystalParams p;
  p.wavelength = wavelength;
  p.lattice_spacing = a_si / std::sqrt(8.0);
  const double s = wavelength / (2.0 * p.lattice_spacing);
  if (!(s > 0.0 && s < 1.0)) throw DomainError("silicon_220: no Bragg reflection at this wavelength");
  p.bragg_angle = std::asin(s);
  p.plate_thickness = plate_thickness;
  p.fourier_potential = constants::two_pi * constants::hbar * constants::hbar / constants::neutron_mass * n_si * b_si;
  p.neutron_energy = nifsim::neutron_energy(wavelength);
  p.asymmetry_cos = std::cos(p.bragg_angle);
  return p;
}

BranchAmplitudes branch_amplitudes(const CrystalParams& params, double y) {
  if (!std::isfinite(y)) throw DomainError("branch_amplitudes: y must be finite");
  const auto [x1, x2] = amplitude_ratios(y);
  const double scale = params.fourier_potential / (2.0 * params.neutron_energy);
  return {x1, x2, scale * x1, scale * x2};
}

CrystalFunctions crystal_functions(const CrystalParams& params, double y) {
  params.validate();
  const auto b = branch_amplitudes(params, y);
  const double path = params.wavenumber() * params.plate_thickness / params.asymmetry_cos;
  return assemble(b.x1, b.x2, path * b.eps1, path * b.eps2);
}

CrystalFunctions crystal_functions(const RockingPoint& point) {
  if (!std::isfinite(point.y)) throw DomainError("crystal_functions: y must be finite");
  const auto [x1, x2] = amplitude_ratios(point.y);
  return assemble(x1, x2, point.a1 * x1, point.a1 * x2);
}

LaueIntensities laue_intensities(const RockingPoint& point) {
  const double w = 1.0 + point.y * point.y;
  const double s = std::sin(point.a1 * std::sqrt(w));
  const double ig = std::isfinite(w) ? s * s / w : 0.0;
  return {ig, 1.0 - ig};
}

double a1_parameter(const CrystalParams& params) {
  if (!(params.asymmetry_cos > 0.0)) throw DomainError("a1_parameter: asymmetry_cos must be > 0");
  return params.wavenumber() * params.fourier_potential * params.plate_thickness /
         (2.0 * params.asymmetry_cos * params.neutron_energy);
}

double pendellosung_thickness(const CrystalParams& params, int order) {
  if (order < 1) throw DomainError("pendellosung_thickness: order must be >= 1");
  CrystalParams unit = params;
  unit.plate_thickness = 1.0;
  const double per_metre = a1_parameter(unit);
  if (per_metre == 0.0) throw DomainError("pendellosung_thickness: V(G) = 0, no Pendelloesung");
  return order * constants::pi / std::abs(per_metre);
}

PortIntensities two_path_intensity(double psi0_sq, double chi) {
  if (!(psi0_sq >= 0.0)) throw DomainError("two_path_intensity: psi0_sq must be >= 0");
  const double io = 0.5 * psi0_sq * (1.0 + std::cos(chi));
  return {io, psi0_sq - io};
}

void WavePacketSpec::validate() const {
  if (!(k0 > 0.0)) throw DomainError("wave packet: k0 must be > 0");
  if (!(delta_k > 0.0)) throw DomainError("wave packet: delta_k must be > 0");
  if (!(sigma_x > 0.0 && sigma_z > 0.0)) throw DomainError("wave packet: coherence lengths must be > 0");
}

double gaussian_spectrum(const WavePacketSpec& spec, double k) {
  if (!(spec.delta_k > 0.0)) throw DomainError("gaussian_spectrum: delta_k must be > 0");
  if (!(k > 0.0)) throw DomainError("gaussian_spectrum: k must be > 0");
  const double rel = k / spec.k0 - 1.0;
  const double rel_width = spec.delta_k / spec.k0;
  return std::pow(constants::two_pi * spec.delta_k * spec.delta_k, -0.25) *
         std::exp(-rel * rel / (4.0 * rel_width * rel_width));
}

std::complex<double> packet_evaluate(const WavePacketSpec& spec, double x, double t) {
  spec.validate();
  if (!std::isfinite(x) || !std::isfinite(t)) throw DomainError("packet_evaluate: x and t must be finite");

  // Factor the carrier exp[i(k0 x - Omega(k0) t)] out of the integral; the
  // remainder varies on the scale of delta_k only.
  const double hbar_over_m = constants::hbar / constants::neutron_mass;
  const double group_offset = x - hbar_over_m * spec.k0 * t;
  const double chirp = 0.5 * hbar_over_m * t;
  const auto integrand = [&](double kappa) {
    return gaussian_spectrum(spec, spec.k0 + kappa) * std::polar(1.0, kappa * group_offset - chirp * kappa * kappa);
  };

  // One panel per delta_k: over the whole window a single 15-point panel can
  // pass its own error test while missing the Gaussian by ~1e-5.
  using boost::math::quadrature::gauss_kronrod;
  const double half = kPacketHalfWidth * spec.delta_k;
  constexpr int panels = 2 * static_cast<int>(kPacketHalfWidth);
  cplx integral = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = -half + i * spec.delta_k;
    double e = 0.0;
    double l = 0.0;
    integral += gauss_kronrod<double, 15>::integrate(integrand, a, a + spec.delta_k, 20, kPacketTolerance, &e, &l);
    error += e;
    l1 += l;
  }
  if (!(error <= kPacketTolerance * std::max(std::abs(integral), l1))) {
    std::ostringstream os;
    os << "packet_evaluate: quadrature did not converge at x = " << x << " m, t = " << t
       << " s (error estimate " << error << ", |integral| " << std::abs(integral) << ", L1 " << l1 << ")";
    throw NumericalError(os.str());
  }
  const double carrier = spec.k0 * x - 0.5 * hbar_over_m * spec.k0 * spec.k0 * t;
  return std::polar(1.0 / std::sqrt(constants::two_pi), carrier) * integral;
}

double borrmann_fan_width(const CrystalParams& params) {
  return 2.0 * params.plate_thickness * std::tan(params.bragg_angle);
}

double moire_magnification(double lattice_d, double fringe_d) {
  if (!(lattice_d > 0.0) || !(fringe_d > 0.0)) throw DomainError("moire_magnification: spacings must be > 0");
  if (fringe_d == lattice_d) return std::numeric_limits<double>::infinity();
  return fringe_d / std::abs(fringe_d - lattice_d);
}

std::vector<std::pair<double, double>> rocking_curve(double a1, double y_min, double y_max, std::size_t samples) {
  if (samples < 2) throw DomainError("rocking_curve: need at least two samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = y_min + (y_max - y_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.emplace_back(y, laue_intensities({y, a1}).diffracted);
  }
  return out;
}

std::vector<std::pair<double, double>> pendellosung_sweep(double y, double a1_min, double a1_max,
                                                          std::size_t samples) {
  if (samples < 2) throw DomainError("pendellosung_sweep: need at least two samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a1 = a1_min + (a1_max - a1_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.emplace_back(a1, laue_intensities({y, a1}).diffracted);
  }
  return out;
}

}  // namespace nifsim
