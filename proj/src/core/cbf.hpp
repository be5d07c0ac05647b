#pragma once

#include <string>

#include "types.hpp"

namespace cbr {

// CBF1 container: magic "CBF1", then u32 height, u32 width, u32 channels,
// then height*width*channels IEEE-754 binary32 values, row-major with the
// channel index varying fastest. All integers and floats little-endian.
void write_cbf(const std::string& path, const RawField& field);
RawField read_cbf(const std::string& path);

}  // namespace cbr
