#include "cbf.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace cbr {

namespace {

const char kMagic[4] = {'C', 'B', 'F', '1'};

void put_u32(std::string& buf, std::uint32_t x) {
  char b[4] = {char(x & 0xff), char((x >> 8) & 0xff), char((x >> 16) & 0xff),
               char((x >> 24) & 0xff)};
  buf.append(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

}  // namespace

void write_cbf(const std::string& path, const RawField& field) {
  require(field.height > 0 && field.width > 0 && field.channels > 0,
          ErrorCode::InvalidArgument, "field dimensions must be positive");
  require(field.data.size() ==
              size_t(field.height) * field.width * field.channels,
          ErrorCode::InvalidArgument, "field buffer size mismatch");

  std::string buf;
  buf.reserve(16 + field.data.size() * 4);
  buf.append(kMagic, 4);
  put_u32(buf, std::uint32_t(field.height));
  put_u32(buf, std::uint32_t(field.width));
  put_u32(buf, std::uint32_t(field.channels));
  for (float x : field.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put_u32(buf, bits);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot open for writing: " + path);
  out.write(buf.data(), std::streamsize(buf.size()));
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

RawField read_cbf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  require(in.good() || in.eof(), ErrorCode::Io, "read failed: " + path);

  require(buf.size() >= 16, ErrorCode::CorruptFile, "truncated header: " + path);
  require(std::memcmp(buf.data(), kMagic, 4) == 0, ErrorCode::CorruptFile,
          "bad magic: " + path);

  const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
  std::uint32_t h = get_u32(p + 4), w = get_u32(p + 8), c = get_u32(p + 12);
  require(h > 0 && w > 0 && c > 0 && h <= (1u << 20) && w <= (1u << 20) &&
              c <= 16,
          ErrorCode::CorruptFile, "implausible dimensions: " + path);
  size_t n = size_t(h) * w * c;
  require(buf.size() == 16 + n * 4, ErrorCode::CorruptFile,
          "payload size mismatch: " + path);

  RawField field{int(h), int(w), int(c)};
  for (size_t i = 0; i < n; ++i) {
    std::uint32_t bits = get_u32(p + 16 + i * 4);
    std::memcpy(&field.data[i], &bits, 4);
  }
  return field;
}

}  // namespace cbr
