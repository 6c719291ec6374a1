#pragma once

// Numerical reconstruction of interferograms with the discrete Fresnel
// transform
//
//   G(m,n) = i/(ld) exp[-i pi ld (m^2/(N dx)^2 + n^2/(N dy)^2)]
//            * sum_{k,l} h(k,l) exp[-i pi/(ld) (k^2 dx^2 + l^2 dy^2)]
//                               exp[+i 2 pi (k m + l n)/N]
//
// where ld is the product lambda * d. ld, dx and dy are plain numbers in one
// shared length unit (the defaults read as mm^2 and mm). Index k and m run
// along columns (u), l and n along rows (v).

#include <complex>
#include <cstddef>
#include <cstdint>

#include "nifsim/grid.hpp"
#include "nifsim/interferogram.hpp"

namespace nifsim {

enum class Windowing { None, MeanSubtract };

struct ReconstructionParams {
  double lambda_d = 70.0;
  std::size_t n = 100;
  double delta_x = 1.0;
  double delta_y = 1.0;
  Windowing window = Windowing::None;

  void validate() const;
  friend bool operator==(const ReconstructionParams&, const ReconstructionParams&) = default;
};

struct ComplexField {
  Grid2D<std::complex<double>> values;
  ReconstructionParams params;
};

ComplexField discrete_fresnel_transform(const Grid2D<std::complex<double>>& h, const ReconstructionParams& params);
ComplexField discrete_fresnel_transform(const Grid2D<double>& h, const ReconstructionParams& params);

/// Square N x N working grid: center crop to the largest multiple of N that
/// fits, then block mean. Throws ShapeError when the input is smaller than N.
Grid2D<double> resample_to_square(const Grid2D<double>& pattern, std::size_t n);

struct Reconstruction {
  Grid2D<double> intensity;     // |G|^2
  Grid2D<double> phase;         // atan2(Im, Re) in (-pi, pi]; 0 where invalid
  Grid2D<std::uint8_t> valid;   // 0 where |G| vanishes and the phase is undefined
  ReconstructionParams params;
};

Reconstruction reconstruct(const Grid2D<double>& pattern, const ReconstructionParams& params);
Reconstruction reconstruct(const InterferogramGrid& pattern, const ReconstructionParams& params);

/// Output-plane scaling xi = nu * ld. The per-bin pitches follow from
/// nu_m = m / (N dx).
struct KernelScale {
  double xi_per_nu = 0.0;
  double eta_per_mu = 0.0;
  double xi_pitch = 0.0;
  double eta_pitch = 0.0;
};

KernelScale fresnel_kernel_scale(const ReconstructionParams& params);

/// Physical output coordinate for spatial frequency nu.
double output_plane_coordinate(const ReconstructionParams& params, double nu);

}  // namespace nifsim
