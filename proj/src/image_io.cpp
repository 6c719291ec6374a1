#include "nifsim/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <openssl/evp.h>
#include <png.h>

#include <json.hpp>

#include "nifsim/error.hpp"

namespace nifsim {

namespace {

constexpr double kMaxCode = 65535.0;

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

std::unique_ptr<std::FILE, FileCloser> open_file(const std::filesystem::path& path, const char* mode) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

// Big-endian sample bytes, first row = highest v.
std::vector<unsigned char> top_down_bytes(const Grid2D<std::uint16_t>& codes) {
  std::vector<unsigned char> bytes;
  bytes.reserve(codes.size() * 2);
  for (std::size_t r = codes.rows(); r-- > 0;) {
    for (const std::uint16_t c : codes.row(r)) {
      bytes.push_back(static_cast<unsigned char>(c >> 8));
      bytes.push_back(static_cast<unsigned char>(c & 0xFF));
    }
  }
  return bytes;
}

void write_png16(const std::filesystem::path& path, const Grid2D<std::uint16_t>& codes) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: cannot create info struct");
  }
  std::vector<unsigned char> bytes = top_down_bytes(codes);
  std::vector<png_bytep> rows(codes.rows());
  const std::size_t stride = codes.cols() * 2;
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = bytes.data() + r * stride;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: write failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(codes.cols()), static_cast<png_uint_32>(codes.rows()), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_pgm16(const std::filesystem::path& path, const Grid2D<std::uint16_t>& codes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "P5\n" << codes.cols() << ' ' << codes.rows() << "\n65535\n";
  const std::vector<unsigned char> bytes = top_down_bytes(codes);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json geometry_json(const SamplingGrid& g) {
  return {{"origin_u", g.origin_u}, {"origin_v", g.origin_v}, {"pitch_u", g.pitch_u},
          {"pitch_v", g.pitch_v},   {"cols", g.cols},         {"rows", g.rows}};
}

}  // namespace

const char* format_name(ImageFormat format) {
  switch (format) {
    case ImageFormat::Png: return "png";
    case ImageFormat::Pgm: return "pgm";
    case ImageFormat::Csv: return "csv";
  }
  return "png";
}

ImageFormat parse_format(std::string_view name) {
  if (name == "png") return ImageFormat::Png;
  if (name == "pgm") return ImageFormat::Pgm;
  if (name == "csv") return ImageFormat::Csv;
  throw ConfigError("output.format: must be one of png, pgm, csv (got '" + std::string(name) + "')");
}

Quantized quantize16(const Grid2D<double>& values, std::optional<std::pair<double, double>> range) {
  Quantized q;
  q.codes = Grid2D<std::uint16_t>(values.rows(), values.cols(), 0);
  const auto v = values.values();
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError("quantize16: non-finite pixel value");
  if (range) {
    if (!(range->second > range->first)) throw DomainError("quantize16: range must satisfy min < max");
    q.min = range->first;
    q.max = range->second;
  } else if (!v.empty()) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    q.min = *lo;
    q.max = *hi;
  }
  if (q.max > q.min) {
    const double scale = kMaxCode / (q.max - q.min);
    auto codes = q.codes.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      codes[i] = static_cast<std::uint16_t>(std::clamp(std::lround((v[i] - q.min) * scale), 0L, 65535L));
  }
  return q;
}

Grid2D<double> dequantize16(const Quantized& q) {
  Grid2D<double> out(q.codes.rows(), q.codes.cols(), q.min);
  const double step = (q.max - q.min) / kMaxCode;
  const auto codes = q.codes.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < codes.size(); ++i) dst[i] = q.min + static_cast<double>(codes[i]) * step;
  return out;
}

std::vector<std::filesystem::path> write_image(const std::filesystem::path& stem, const Grid2D<double>& values,
                                               const ImageMeta& meta, ImageFormat format) {
  const auto with_ext = [&](const char* ext) {
    std::filesystem::path p = stem;
    p += ext;
    return p;
  };
  const std::filesystem::path csv = with_ext(".csv");
  const std::filesystem::path sidecar = with_ext(".json");

  nlohmann::json side;
  side["data"] = {{"file", csv.filename().string()}, {"encoding", "float64-text"}, {"row_order", "first_line_is_min_v"}};
  side["geometry"] = geometry_json(meta.geometry);
  side["provenance"] = meta.provenance;
  side["rows"] = values.rows();
  side["cols"] = values.cols();

  std::vector<std::filesystem::path> written;
  write_csv(csv, values);
  written.push_back(csv);
  if (format != ImageFormat::Csv) {
    const std::filesystem::path image = with_ext(format == ImageFormat::Png ? ".png" : ".pgm");
    const Quantized q = quantize16(values, meta.range);
    if (format == ImageFormat::Png)
      write_png16(image, q.codes);
    else
      write_pgm16(image, q.codes);
    written.push_back(image);
    side["image"] = {{"file", image.filename().string()},
                     {"encoding", "uint16-linear"},
                     {"row_order", "first_row_is_max_v"},
                     {"min", q.min},
                     {"max", q.max},
                     {"step", (q.max - q.min) / kMaxCode},
                     {"range", meta.range ? "fixed" : "data"}};
  }
  write_text(sidecar, side.dump(2) + "\n");
  written.push_back(sidecar);
  return written;
}

Grid2D<std::uint16_t> read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  std::size_t cols = 0, rows = 0, maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (magic != "P5" || maxval != 65535 || cols == 0 || rows == 0)
    throw IoError("read_pgm16: unsupported header in " + path.string());
  in.get();
  std::vector<unsigned char> bytes(cols * rows * 2);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IoError("read_pgm16: truncated data in " + path.string());
  Grid2D<std::uint16_t> out(rows, cols);
  std::size_t i = 0;
  for (std::size_t r = rows; r-- > 0;)
    for (std::size_t c = 0; c < cols; ++c, i += 2)
      out(r, c) = static_cast<std::uint16_t>((bytes[i] << 8) | bytes[i + 1]);
  return out;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const Grid2D<double>& values) {
  std::string text;
  for (std::size_t r = 0; r < values.rows(); ++r) {
    const auto row = values.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += format_double(row[c]);
    }
    text += '\n';
  }
  write_text(path, text);
}

Grid2D<double> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t n = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double x = 0.0;
      const auto res = std::from_chars(p, end, x);
      if (res.ec != std::errc())
        throw IoError("read_csv: bad number on line " + std::to_string(rows + 1) + " of " + path.string());
      data.push_back(x);
      ++n;
      p = res.ptr;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end && *p != ',')
        throw IoError("read_csv: expected ',' on line " + std::to_string(rows + 1) + " of " + path.string());
      if (p < end) ++p;
    }
    if (rows == 0) cols = n;
    if (n != cols) throw IoError("read_csv: ragged rows in " + path.string());
    ++rows;
  }
  if (rows == 0) throw IoError("read_csv: no data in " + path.string());
  Grid2D<double> out(rows, cols);
  std::copy(data.begin(), data.end(), out.values().begin());
  return out;
}

void write_series_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
                      const std::vector<std::pair<double, double>>& rows) {
  std::string text = x_name + "," + y_name + "\n";
  for (const auto& [x, y] : rows) text += format_double(x) + "," + format_double(y) + "\n";
  write_text(path, text);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace nifsim
