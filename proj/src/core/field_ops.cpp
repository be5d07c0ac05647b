#include "field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbr {

namespace {

constexpr double kInf = 1e20;

// One-dimensional squared-distance transform over a sampled function
// (Felzenszwalb & Huttenlocher lower envelope of parabolas). Exact for
// integer-valued input.
void transform_1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<std::int64_t> distance_to_zero_squared(const BinaryMask& mask) {
  const int h = mask.height, w = mask.width;
  require(h > 0 && w > 0, ErrorCode::InvalidArgument, "empty mask grid");

  bool has_zero = false;
  for (std::uint8_t p : mask.data) {
    if (p == 0) {
      has_zero = true;
      break;
    }
  }
  require(has_zero, ErrorCode::AllOnes, "mask has no zero pixel");

  std::vector<double> grid(size_t(h) * w);
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = mask.data[i] ? kInf : 0.0;

  const int n = std::max(h, w);
  std::vector<double> f(n), d(n), z(size_t(n) + 1);
  std::vector<int> v(n);

  for (int col = 0; col < w; ++col) {
    for (int row = 0; row < h; ++row) f[row] = grid[size_t(row) * w + col];
    transform_1d(f.data(), h, d.data(), v.data(), z.data());
    for (int row = 0; row < h; ++row) grid[size_t(row) * w + col] = d[row];
  }
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) f[col] = grid[size_t(row) * w + col];
    transform_1d(f.data(), w, d.data(), v.data(), z.data());
    for (int col = 0; col < w; ++col) grid[size_t(row) * w + col] = d[col];
  }

  std::vector<std::int64_t> out(grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    out[i] = static_cast<std::int64_t>(std::llround(grid[i]));
  return out;
}

ScalarField distance_to_zero(const BinaryMask& mask) {
  std::vector<std::int64_t> sq = distance_to_zero_squared(mask);
  ScalarField out(mask.height, mask.width);
  for (size_t i = 0; i < sq.size(); ++i)
    out.data[i] = float(std::sqrt(double(sq[i])));
  return out;
}

ScalarField signed_distance(const BinaryMask& mask) {
  const long long fg = mask.count();
  const long long total = (long long)mask.height * mask.width;
  require(fg > 0 && fg < total, ErrorCode::DegenerateMask,
          "mask entirely foreground or entirely background");

  ScalarField inside = distance_to_zero(mask);
  BinaryMask inverted(mask.height, mask.width);
  for (size_t i = 0; i < mask.data.size(); ++i)
    inverted.data[i] = mask.data[i] ? 0 : 1;
  ScalarField outside = distance_to_zero(inverted);

  ScalarField out(mask.height, mask.width);
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = mask.data[i] ? inside.data[i] : -outside.data[i];
  return out;
}

ScalarField boundary_field(const BinaryMask& mask) {
  const long long fg = mask.count();
  require(fg > 0, ErrorCode::EmptyMask, "mask has no foreground pixel");
  const long long total = (long long)mask.height * mask.width;

  ScalarField out(mask.height, mask.width);
  if (fg == total) {
    // No background: measure against a virtual zero ring outside the image.
    const int h = mask.height, w = mask.width;
    float dmax = 0.f;
    for (int u = 0; u < h; ++u)
      for (int v = 0; v < w; ++v) {
        float d = float(std::min(std::min(u + 1, h - u), std::min(v + 1, w - v)));
        out.at(u, v) = d;
        dmax = std::max(dmax, d);
      }
    for (float& x : out.data) x /= dmax;
    return out;
  }

  ScalarField s = signed_distance(mask);
  float fg_max = 0.f, bg_min = 0.f;
  for (size_t i = 0; i < s.data.size(); ++i) {
    if (mask.data[i])
      fg_max = std::max(fg_max, s.data[i]);
    else
      bg_min = std::min(bg_min, s.data[i]);
  }
  for (size_t i = 0; i < s.data.size(); ++i)
    out.data[i] = mask.data[i] ? s.data[i] / fg_max : s.data[i] / -bg_min;
  return out;
}

VectorField center_field(const BinaryMask& mask) {
  VectorField out(mask.height, mask.width);
  if (mask.empty_fg()) return out;

  PixelBox box = tightest_bbox(mask);
  const double cu = 0.5 * (box.u1 + box.u2);
  const double cv = 0.5 * (box.v1 + box.v2);
  for (int u = 0; u < mask.height; ++u) {
    for (int v = 0; v < mask.width; ++v) {
      if (!mask.at(u, v)) continue;
      double du = u - cu, dv = v - cv;
      double norm = std::sqrt(du * du + dv * dv);
      if (norm < 1e-9) continue;
      out.set(u, v, float(du / norm), float(dv / norm));
    }
  }
  return out;
}

double recover_max_distance(const ScalarField& field, int u, int v) {
  require(u >= 1 && u <= field.height - 2 && v >= 1 && v <= field.width - 2,
          ErrorCode::InvalidArgument, "pixel on the field border");
  require(field.at(u, v) > 0.f, ErrorCode::InvalidArgument,
          "recovery requires a positive field value");
  double gu = 0.5 * (double(field.at(u + 1, v)) - double(field.at(u - 1, v)));
  double gv = 0.5 * (double(field.at(u, v + 1)) - double(field.at(u, v - 1)));
  double norm = std::sqrt(gu * gu + gv * gv);
  require(norm >= 1e-9, ErrorCode::ZeroGradient, "gradient norm below 1e-9");
  return 1.0 / norm;
}

PixelBox tightest_bbox(const BinaryMask& mask) {
  int u1 = mask.height, v1 = mask.width, u2 = -1, v2 = -1;
  for (int u = 0; u < mask.height; ++u)
    for (int v = 0; v < mask.width; ++v)
      if (mask.at(u, v)) {
        u1 = std::min(u1, u);
        v1 = std::min(v1, v);
        u2 = std::max(u2, u);
        v2 = std::max(v2, v);
      }
  require(u2 >= 0, ErrorCode::EmptyMask, "mask has no foreground pixel");
  return {u1, v1, u2, v2};
}

PixelBox negative_twin_crop(int height, int width, const PixelBox& object_box) {
  require(object_box.valid() && object_box.u1 >= 0 && object_box.v1 >= 0 &&
              object_box.u2 < height && object_box.v2 < width,
          ErrorCode::InvalidArgument, "object box not inside the image");

  struct Strip {
    PixelBox box;
    bool present;
  };
  const Strip strips[4] = {
      {{0, 0, object_box.u1 - 1, width - 1}, object_box.u1 > 0},
      {{object_box.u2 + 1, 0, height - 1, width - 1}, object_box.u2 < height - 1},
      {{0, 0, height - 1, object_box.v1 - 1}, object_box.v1 > 0},
      {{0, object_box.v2 + 1, height - 1, width - 1}, object_box.v2 < width - 1},
  };

  long long best = -1;
  PixelBox out{};
  for (const Strip& s : strips) {
    if (!s.present) continue;
    if (s.box.area() > best) {
      best = s.box.area();
      out = s.box;
    }
  }
  require(best >= 0, ErrorCode::NoBackground, "object box covers the image");
  return out;
}

namespace {

template <typename Field, int C>
Field resize_impl(const Field& src, int out_h, int out_w) {
  require(src.height >= 1 && src.width >= 1 && out_h >= 1 && out_w >= 1,
          ErrorCode::InvalidArgument, "resize dimensions must be >= 1");
  Field out(out_h, out_w);
  for (int i = 0; i < out_h; ++i) {
    double su = sample_coord(i, out_h, src.height);
    int u0 = int(su);
    int u1 = std::min(u0 + 1, src.height - 1);
    double fu = su - u0;
    for (int j = 0; j < out_w; ++j) {
      double sv = sample_coord(j, out_w, src.width);
      int v0 = int(sv);
      int v1 = std::min(v0 + 1, src.width - 1);
      double fv = sv - v0;
      for (int c = 0; c < C; ++c) {
        double a = src.data[(size_t(u0) * src.width + v0) * C + c];
        double b = src.data[(size_t(u0) * src.width + v1) * C + c];
        double d = src.data[(size_t(u1) * src.width + v0) * C + c];
        double e = src.data[(size_t(u1) * src.width + v1) * C + c];
        double top = a + (b - a) * fv;
        double bot = d + (e - d) * fv;
        out.data[(size_t(i) * out_w + j) * C + c] = float(top + (bot - top) * fu);
      }
    }
  }
  return out;
}

}  // namespace

ScalarField resize_bilinear(const ScalarField& src, int out_h, int out_w) {
  return resize_impl<ScalarField, 1>(src, out_h, out_w);
}

VectorField resize_bilinear(const VectorField& src, int out_h, int out_w) {
  return resize_impl<VectorField, 2>(src, out_h, out_w);
}

}  // namespace cbr
