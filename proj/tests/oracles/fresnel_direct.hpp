#pragma once

// Direct O(N^4) evaluation of the discrete Fresnel transform, term by term,
// with no FFT and no factorization of the chirps.

#include <cmath>
#include <complex>
#include <numbers>

#include "nifsim/grid.hpp"

namespace oracle {

inline nifsim::Grid2D<std::complex<double>> fresnel_direct(const nifsim::Grid2D<std::complex<double>>& h,
                                                           double lambda_d, double dx, double dy) {
  using cd = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  const std::size_t n = h.rows();
  const double nn = static_cast<double>(n);
  nifsim::Grid2D<cd> out(n, n);
  for (std::size_t row = 0; row < n; ++row) {      // n index (v)
    for (std::size_t col = 0; col < n; ++col) {    // m index (u)
      const double m = static_cast<double>(col);
      const double nv = static_cast<double>(row);
      cd acc = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
          const double kd = static_cast<double>(k);
          const double ld = static_cast<double>(l);
          const double arg = -pi / lambda_d * (kd * kd * dx * dx + ld * ld * dy * dy) +
                             2.0 * pi * (kd * m + ld * nv) / nn;
          acc += h(l, k) * std::polar(1.0, arg);
        }
      }
      const double outer = -pi * lambda_d * (m * m / (nn * dx * nn * dx) + nv * nv / (nn * dy * nn * dy));
      out(row, col) = cd(0.0, 1.0) / lambda_d * std::polar(1.0, outer) * acc;
    }
  }
  return out;
}

}  // namespace oracle
