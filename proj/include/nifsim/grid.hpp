#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nifsim {

/// Dense row-major 2D array. Row index runs along v, column index along u.
template <class T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  template <class U>
  bool same_shape(const Grid2D<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Transverse position in the detector plane (m).
struct Point2 {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Cell-centered raster geometry in the (u,v) detector plane.
///
/// Cell (r, c) spans [origin_u + c*pitch_u, origin_u + (c+1)*pitch_u] along u
/// and the analogous interval along v; row 0 is the lowest v.
struct SamplingGrid {
  double origin_u = 0.0;
  double origin_v = 0.0;
  double pitch_u = 0.0;
  double pitch_v = 0.0;
  std::size_t cols = 0;
  std::size_t rows = 0;

  double u_center(std::size_t c) const { return origin_u + (static_cast<double>(c) + 0.5) * pitch_u; }
  double v_center(std::size_t r) const { return origin_v + (static_cast<double>(r) + 0.5) * pitch_v; }
  double width() const { return static_cast<double>(cols) * pitch_u; }
  double height() const { return static_cast<double>(rows) * pitch_v; }
  Point2 center() const { return {origin_u + 0.5 * width(), origin_v + 0.5 * height()}; }

  /// Square-pixel grid of cols x rows cells centered on `c`.
  static SamplingGrid centered(std::size_t cols, std::size_t rows, double pitch, Point2 c = {}) {
    return {c.u - 0.5 * static_cast<double>(cols) * pitch,
            c.v - 0.5 * static_cast<double>(rows) * pitch,
            pitch, pitch, cols, rows};
  }

  /// Same dimensions, and origin/pitch equal to within rel_tol of the pitch.
  bool matches(const SamplingGrid& o, double rel_tol = 1e-9) const {
    if (cols != o.cols || rows != o.rows) return false;
    const double su = rel_tol * std::abs(pitch_u);
    const double sv = rel_tol * std::abs(pitch_v);
    return std::abs(pitch_u - o.pitch_u) <= su && std::abs(pitch_v - o.pitch_v) <= sv &&
           std::abs(origin_u - o.origin_u) <= su && std::abs(origin_v - o.origin_v) <= sv;
  }
};

}  // namespace nifsim
