#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace cbr {

// Uncompressed run-length encoding in column-major (Fortran) pixel order,
// counts alternating background/foreground with the first count background.
std::vector<std::int64_t> rle_encode(const BinaryMask& mask);

// Throws CorruptFile when the counts are negative or do not sum to h*w.
BinaryMask rle_decode(int height, int width,
                      const std::vector<std::int64_t>& counts);

}  // namespace cbr
