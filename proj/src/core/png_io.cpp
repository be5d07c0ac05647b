#include "png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace cbr {
namespace {

struct FileCloser {
  std::FILE* fp = nullptr;
  ~FileCloser() {
    if (fp) std::fclose(fp);
  }
};

// Full-color 8-bit rows out of any PNG layout.
struct DecodedPng {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;  // row-major, channel-minor
};

DecodedPng read_png(const std::string& path) {
  FileCloser file{std::fopen(path.c_str(), "rb")};
  require(file.fp != nullptr, ErrorCode::Io, "cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorCode::Io, "png reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::Io, "png info allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::CorruptFile, "png decode failed: " + path);
  }
  png_init_io(png, file.fp);
  png_read_png(png, info,
               PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING |
                   PNG_TRANSFORM_EXPAND,
               nullptr);

  DecodedPng out;
  out.height = int(png_get_image_height(png, info));
  out.width = int(png_get_image_width(png, info));
  out.channels = int(png_get_channels(png, info));
  if (out.height <= 0 || out.width <= 0 || out.channels < 1 ||
      out.channels > 4) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::CorruptFile, "unsupported png layout: " + path);
  }
  png_bytepp rows = png_get_rows(png, info);
  out.data.resize(size_t(out.height) * out.width * out.channels);
  size_t stride = size_t(out.width) * out.channels;
  for (int u = 0; u < out.height; ++u) {
    std::copy(rows[u], rows[u] + stride, out.data.begin() + u * stride);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_png(const std::string& path, int height, int width, int channels,
               const std::vector<std::uint8_t>& data) {
  FileCloser file{std::fopen(path.c_str(), "wb")};
  require(file.fp != nullptr, ErrorCode::Io,
          "cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  require(png != nullptr, ErrorCode::Io, "png writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::Io, "png info allocation failed");
  }

  std::vector<png_bytep> rows(static_cast<size_t>(height));
  size_t stride = size_t(width) * channels;
  for (int u = 0; u < height; ++u) {
    rows[size_t(u)] = const_cast<png_bytep>(data.data() + u * stride);
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "png encode failed: " + path);
  }
  png_init_io(png, file.fp);
  int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint8_t channel(double x) {
  return std::uint8_t(std::clamp<long>(std::lround(x), 0, 255));
}

}  // namespace

BinaryMask load_mask_png(const std::string& path) {
  DecodedPng png = read_png(path);
  // Alpha does not vote; a gray or color pixel is foreground when its mean
  // intensity reaches mid-scale.
  int color_channels = png.channels == 2 || png.channels == 4
                           ? png.channels - 1
                           : png.channels;
  BinaryMask mask;
  mask.height = png.height;
  mask.width = png.width;
  mask.data.assign(size_t(png.height) * png.width, 0);
  for (int u = 0; u < png.height; ++u) {
    for (int v = 0; v < png.width; ++v) {
      const std::uint8_t* px =
          png.data.data() + (size_t(u) * png.width + v) * png.channels;
      int sum = 0;
      for (int c = 0; c < color_channels; ++c) sum += px[c];
      mask.at(u, v) = sum >= 128 * color_channels ? 1 : 0;
    }
  }
  return mask;
}

void save_mask_png(const std::string& path, const BinaryMask& mask) {
  require(mask.height > 0 && mask.width > 0, ErrorCode::InvalidArgument,
          "mask must be nonempty");
  std::vector<std::uint8_t> bytes(size_t(mask.height) * mask.width);
  for (size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = mask.data[i] ? 255 : 0;
  }
  write_png(path, mask.height, mask.width, 1, bytes);
}

void save_scalar_png(const std::string& path, const ScalarField& field) {
  require(field.height > 0 && field.width > 0, ErrorCode::InvalidArgument,
          "field must be nonempty");
  std::vector<std::uint8_t> bytes(size_t(field.height) * field.width * 3);
  for (int u = 0; u < field.height; ++u) {
    for (int v = 0; v < field.width; ++v) {
      double t = (std::clamp(double(field.at(u, v)), -1.0, 1.0) + 1.0) / 2.0;
      double r, g, b;
      if (t < 0.5) {  // blue -> white
        double s = t * 2.0;
        r = 255.0 * s;
        g = 255.0 * s;
        b = 255.0;
      } else {  // white -> red
        double s = (t - 0.5) * 2.0;
        r = 255.0;
        g = 255.0 * (1.0 - s);
        b = 255.0 * (1.0 - s);
      }
      std::uint8_t* px = bytes.data() + (size_t(u) * field.width + v) * 3;
      px[0] = channel(r);
      px[1] = channel(g);
      px[2] = channel(b);
    }
  }
  write_png(path, field.height, field.width, 3, bytes);
}

void save_rgb_png(const std::string& path, int height, int width,
                  const std::vector<std::uint8_t>& data) {
  require(height > 0 && width > 0 &&
              data.size() == size_t(height) * width * 3,
          ErrorCode::InvalidArgument, "rgb buffer shape mismatch");
  write_png(path, height, width, 3, data);
}

void save_vector_png(const std::string& path, const VectorField& field) {
  require(field.height > 0 && field.width > 0, ErrorCode::InvalidArgument,
          "field must be nonempty");
  std::vector<std::uint8_t> bytes(size_t(field.height) * field.width * 3);
  for (int u = 0; u < field.height; ++u) {
    for (int v = 0; v < field.width; ++v) {
      double du = field.du(u, v);
      double dv = field.dv(u, v);
      double sat = std::min(1.0, std::hypot(du, dv));
      double h6 = (std::atan2(dv, du) + 3.14159265358979323846) /
                  (2.0 * 3.14159265358979323846) * 6.0;
      h6 = std::clamp(h6, 0.0, 6.0 - 1e-9);
      double c = sat;
      double x = c * (1.0 - std::fabs(std::fmod(h6, 2.0) - 1.0));
      double m = 1.0 - c;
      double r = 0, g = 0, b = 0;
      switch (int(h6)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
      }
      std::uint8_t* px = bytes.data() + (size_t(u) * field.width + v) * 3;
      px[0] = channel(255.0 * (r + m));
      px[1] = channel(255.0 * (g + m));
      px[2] = channel(255.0 * (b + m));
    }
  }
  write_png(path, field.height, field.width, 3, bytes);
}

}  // namespace cbr
