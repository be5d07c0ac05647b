#include "rle.hpp"

namespace cbr {

std::vector<std::int64_t> rle_encode(const BinaryMask& mask) {
  std::vector<std::int64_t> counts;
  std::uint8_t current = 0;  // runs start on background
  std::int64_t run = 0;
  for (int v = 0; v < mask.width; ++v) {
    for (int u = 0; u < mask.height; ++u) {
      std::uint8_t p = mask.at(u, v) ? 1 : 0;
      if (p == current) {
        ++run;
      } else {
        counts.push_back(run);
        current = p;
        run = 1;
      }
    }
  }
  counts.push_back(run);
  return counts;
}

BinaryMask rle_decode(int height, int width,
                      const std::vector<std::int64_t>& counts) {
  require(height > 0 && width > 0, ErrorCode::InvalidArgument,
          "mask dimensions must be positive");
  BinaryMask mask(height, width);
  std::int64_t total = std::int64_t(height) * width;
  std::int64_t pos = 0;
  std::uint8_t value = 0;
  for (std::int64_t c : counts) {
    require(c >= 0, ErrorCode::CorruptFile, "negative run length");
    for (std::int64_t k = 0; k < c; ++k) {
      require(pos < total, ErrorCode::CorruptFile, "run lengths overflow mask");
      int v = int(pos / height);
      int u = int(pos % height);
      mask.at(u, v) = value;
      ++pos;
    }
    value = value ? 0 : 1;
  }
  require(pos == total, ErrorCode::CorruptFile, "run lengths underflow mask");
  return mask;
}

}  // namespace cbr
