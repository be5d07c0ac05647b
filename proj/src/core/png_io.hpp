#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace cbr {

// Reads any PNG (gray, palette, rgb, with or without alpha) and binarizes:
// mean channel intensity >= 128 is foreground.
BinaryMask load_mask_png(const std::string& path);

void save_mask_png(const std::string& path, const BinaryMask& mask);

// Diverging blue-white-red map over [-1, 1]; values outside are clamped.
void save_scalar_png(const std::string& path, const ScalarField& field);

// Direction as hue, magnitude as saturation (clamped at 1), full value.
void save_vector_png(const std::string& path, const VectorField& field);

// data is row-major RGB, 3 bytes per pixel.
void save_rgb_png(const std::string& path, int height, int width,
                  const std::vector<std::uint8_t>& data);

}  // namespace cbr
