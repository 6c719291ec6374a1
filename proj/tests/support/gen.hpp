#pragma once

// Seeded generators for property tests. Each property draws a fixed number of
// cases from its own seed so failures reproduce exactly.

#include <complex>
#include <cstdint>
#include <random>

#include "nifsim/grid.hpp"

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  nifsim::Grid2D<double> real_grid(std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
    nifsim::Grid2D<double> g(rows, cols);
    for (double& x : g.values()) x = uniform(lo, hi);
    return g;
  }

  nifsim::Grid2D<std::complex<double>> complex_grid(std::size_t rows, std::size_t cols) {
    nifsim::Grid2D<std::complex<double>> g(rows, cols);
    for (auto& x : g.values()) x = {uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
    return g;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testgen
