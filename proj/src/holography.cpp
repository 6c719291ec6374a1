#include "nifsim/holography.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fftw3.h>

#include "nifsim/constants.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

namespace {

using cplx = std::complex<double>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

// Unnormalized 2D transform with the positive exponent (FFTW_BACKWARD).
void inverse_dft_2d(Grid2D<cplx>& data) {
  const auto rows = static_cast<int>(data.rows());
  const auto cols = static_cast<int>(data.cols());
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size())));
  if (!buf) throw NumericalError("discrete_fresnel_transform: FFT buffer allocation failed");
  std::unique_ptr<fftw_plan_s, PlanDestroy> plan(
      fftw_plan_dft_2d(rows, cols, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
  if (!plan) throw NumericalError("discrete_fresnel_transform: FFT planning failed");
  std::copy(data.values().begin(), data.values().end(), reinterpret_cast<cplx*>(buf.get()));
  fftw_execute(plan.get());
  const cplx* out = reinterpret_cast<const cplx*>(buf.get());
  std::copy(out, out + data.size(), data.values().begin());
}

}  // namespace

void ReconstructionParams::validate() const {
  if (!(lambda_d > 0.0)) throw DomainError("reconstruction: lambda_d must be > 0");
  if (n < 2) throw DomainError("reconstruction: N must be >= 2");
  if (!(delta_x > 0.0) || !(delta_y > 0.0)) throw DomainError("reconstruction: sample pitches must be > 0");
}

ComplexField discrete_fresnel_transform(const Grid2D<cplx>& h, const ReconstructionParams& params) {
  params.validate();
  if (h.rows() != h.cols()) throw ShapeError("discrete_fresnel_transform: input must be square");
  if (h.rows() != params.n) throw ShapeError("discrete_fresnel_transform: input must be N x N");
  const std::size_t n = params.n;
  const double nd = static_cast<double>(n);
  const double ld = params.lambda_d;

  Grid2D<cplx> work(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    const double yl = static_cast<double>(l) * params.delta_y;
    for (std::size_t k = 0; k < n; ++k) {
      const double xk = static_cast<double>(k) * params.delta_x;
      work(l, k) = h(l, k) * std::polar(1.0, -constants::pi / ld * (xk * xk + yl * yl));
    }
  }
  inverse_dft_2d(work);

  const cplx prefactor(0.0, 1.0 / ld);
  const double fx = 1.0 / (nd * params.delta_x);
  const double fy = 1.0 / (nd * params.delta_y);
  for (std::size_t row = 0; row < n; ++row) {
    const double nu_n = static_cast<double>(row) * fy;
    for (std::size_t m = 0; m < n; ++m) {
      const double nu_m = static_cast<double>(m) * fx;
      work(row, m) *= prefactor * std::polar(1.0, -constants::pi * ld * (nu_m * nu_m + nu_n * nu_n));
    }
  }
  return {std::move(work), params};
}

ComplexField discrete_fresnel_transform(const Grid2D<double>& h, const ReconstructionParams& params) {
  Grid2D<cplx> c(h.rows(), h.cols());
  std::copy(h.values().begin(), h.values().end(), c.values().begin());
  return discrete_fresnel_transform(c, params);
}

Grid2D<double> resample_to_square(const Grid2D<double>& pattern, std::size_t n) {
  if (n < 1) throw DomainError("resample_to_square: N must be >= 1");
  const std::size_t side = std::min(pattern.rows(), pattern.cols());
  if (side < n) throw ShapeError("resample_to_square: pattern is smaller than N x N");
  const std::size_t block = side / n;
  const std::size_t used = block * n;
  const std::size_t r0 = (pattern.rows() - used) / 2;
  const std::size_t c0 = (pattern.cols() - used) / 2;
  Grid2D<double> out(n, n);
  const double norm = 1.0 / static_cast<double>(block * block);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < block; ++i)
        for (std::size_t j = 0; j < block; ++j) sum += pattern(r0 + r * block + i, c0 + c * block + j);
      out(r, c) = sum * norm;
    }
  }
  return out;
}

Reconstruction reconstruct(const Grid2D<double>& pattern, const ReconstructionParams& params) {
  params.validate();
  Grid2D<double> h = resample_to_square(pattern, params.n);
  if (params.window == Windowing::MeanSubtract) {
    double mean = 0.0;
    for (double v : h.values()) mean += v;
    mean /= static_cast<double>(h.size());
    for (double& v : h.values()) v -= mean;
  }
  const ComplexField field = discrete_fresnel_transform(h, params);

  Reconstruction out;
  out.params = params;
  out.intensity = Grid2D<double>(params.n, params.n);
  out.phase = Grid2D<double>(params.n, params.n);
  out.valid = Grid2D<std::uint8_t>(params.n, params.n, 1);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const cplx g = field.values.values()[i];
    out.intensity.values()[i] = std::norm(g);
    if (g == cplx(0.0, 0.0)) {
      out.valid.values()[i] = 0;
      continue;
    }
    double ph = std::atan2(g.imag(), g.real());
    if (ph <= -constants::pi) ph = constants::pi;
    out.phase.values()[i] = ph;
  }
  return out;
}

Reconstruction reconstruct(const InterferogramGrid& pattern, const ReconstructionParams& params) {
  return reconstruct(pattern.intensity, params);
}

KernelScale fresnel_kernel_scale(const ReconstructionParams& params) {
  params.validate();
  const double nd = static_cast<double>(params.n);
  return {params.lambda_d, params.lambda_d, params.lambda_d / (nd * params.delta_x),
          params.lambda_d / (nd * params.delta_y)};
}

double output_plane_coordinate(const ReconstructionParams& params, double nu) {
  return fresnel_kernel_scale(params).xi_per_nu * nu;
}

}  // namespace nifsim
