#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cbr {

enum class ErrorCode {
  InvalidArgument,
  EmptyMask,
  DegenerateMask,
  AllOnes,
  ZeroGradient,
  DegenerateField,
  NoBackground,
  EmptyUnion,
  BudgetExhausted,
  MissingEntry,
  CorruptFile,
  Io,
  Parse,
};

// All recoverable failures inside the core are thrown as Error; the C API
// boundary maps codes 1:1 onto cbr_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Inclusive pixel box: rows u1..u2, columns v1..v2.
struct PixelBox {
  int u1 = 0;
  int v1 = 0;
  int u2 = 0;
  int v2 = 0;

  int height() const { return u2 - u1 + 1; }
  int width() const { return v2 - v1 + 1; }
  long long area() const {
    return static_cast<long long>(height()) * static_cast<long long>(width());
  }
  bool valid() const { return u2 >= u1 && v2 >= v1; }
  bool operator==(const PixelBox& o) const {
    return u1 == o.u1 && v1 == o.v1 && u2 == o.u2 && v2 == o.v2;
  }
  bool operator!=(const PixelBox& o) const { return !(*this == o); }
};

struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // row-major, 0 or 1

  BinaryMask() = default;
  BinaryMask(int h, int w) : height(h), width(w), data(size_t(h) * w, 0) {}

  std::uint8_t at(int u, int v) const { return data[size_t(u) * width + v]; }
  std::uint8_t& at(int u, int v) { return data[size_t(u) * width + v]; }
  long long count() const {
    long long n = 0;
    for (std::uint8_t p : data) n += p != 0;
    return n;
  }
  bool empty_fg() const { return count() == 0; }
};

struct ScalarField {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // row-major

  ScalarField() = default;
  ScalarField(int h, int w) : height(h), width(w), data(size_t(h) * w, 0.f) {}

  float at(int u, int v) const { return data[size_t(u) * width + v]; }
  float& at(int u, int v) { return data[size_t(u) * width + v]; }
};

// Two channels per pixel, (du, dv) interleaved, row-major.
struct VectorField {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  VectorField() = default;
  VectorField(int h, int w)
      : height(h), width(w), data(size_t(h) * w * 2, 0.f) {}

  float du(int u, int v) const { return data[(size_t(u) * width + v) * 2]; }
  float dv(int u, int v) const { return data[(size_t(u) * width + v) * 2 + 1]; }
  void set(int u, int v, float a, float b) {
    data[(size_t(u) * width + v) * 2] = a;
    data[(size_t(u) * width + v) * 2 + 1] = b;
  }
};

// Channel-generic field used at serialization and API boundaries.
struct RawField {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<float> data;  // row-major, channel-minor

  RawField() = default;
  RawField(int h, int w, int c)
      : height(h), width(w), channels(c), data(size_t(h) * w * c, 0.f) {}
};

inline RawField to_raw(const ScalarField& f) {
  RawField r(f.height, f.width, 1);
  r.data = f.data;
  return r;
}

inline RawField to_raw(const VectorField& f) {
  RawField r(f.height, f.width, 2);
  r.data = f.data;
  return r;
}

inline ScalarField to_scalar(const RawField& r) {
  if (r.channels != 1)
    throw Error(ErrorCode::InvalidArgument, "expected a 1-channel field");
  ScalarField f(r.height, r.width);
  f.data = r.data;
  return f;
}

inline VectorField to_vector(const RawField& r) {
  if (r.channels != 2)
    throw Error(ErrorCode::InvalidArgument, "expected a 2-channel field");
  VectorField f(r.height, r.width);
  f.data = r.data;
  return f;
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace cbr
