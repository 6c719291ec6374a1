#pragma once

// Artifact emission: 16-bit grayscale images with JSON sidecars, CSV grids,
// two-column series and SHA-256 file digests.
//
// Image rows are written top-down, so the first image row is the highest v.
// Pixel codes map linearly onto [min, max], by default the data range; the
// sidecar stores both so that value = min + code * (max - min) / 65535. Every
// image is accompanied by a full-precision CSV of the raw values.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nifsim/grid.hpp"

namespace nifsim {

enum class ImageFormat { Png, Pgm, Csv };

const char* format_name(ImageFormat format);
ImageFormat parse_format(std::string_view name);  // throws ConfigError

struct ImageMeta {
  SamplingGrid geometry;
  std::map<std::string, std::string> provenance;
  std::optional<std::pair<double, double>> range;  // fixed [min, max]; values outside are clamped
};

/// Linear 16-bit quantization; a constant image maps to code 0.
struct Quantized {
  Grid2D<std::uint16_t> codes;  // in storage order (row 0 = lowest v)
  double min = 0.0;
  double max = 0.0;
};

Quantized quantize16(const Grid2D<double>& values,
                     std::optional<std::pair<double, double>> range = std::nullopt);
Grid2D<double> dequantize16(const Quantized& q);

/// Writes `<stem>.csv`, `<stem>.json` and, for png/pgm, `<stem>.<ext>`.
/// Returns the paths written.
std::vector<std::filesystem::path> write_image(const std::filesystem::path& stem, const Grid2D<double>& values,
                                               const ImageMeta& meta, ImageFormat format);

/// Reads back a 16-bit PGM written by write_image, in storage order.
Grid2D<std::uint16_t> read_pgm16(const std::filesystem::path& path);

/// Full-precision CSV, one grid row per line in storage order.
void write_csv(const std::filesystem::path& path, const Grid2D<double>& values);
Grid2D<double> read_csv(const std::filesystem::path& path);

/// Header line followed by "x,y" rows.
void write_series_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
                      const std::vector<std::pair<double, double>>& rows);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `text` verbatim (binary mode, no newline translation).
void write_text(const std::filesystem::path& path, std::string_view text);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace nifsim
