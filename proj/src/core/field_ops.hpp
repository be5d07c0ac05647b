#pragma once

#include <cstdint>

#include "types.hpp"

namespace cbr {

// Exact squared Euclidean distance from every pixel to the nearest zero pixel
// of the mask. Squared distances are exact integers. Throws AllOnes when the
// mask has no zero pixel.
std::vector<std::int64_t> distance_to_zero_squared(const BinaryMask& mask);

// sqrt of the exact squared transform.
ScalarField distance_to_zero(const BinaryMask& mask);

// Signed distance: +distance_to_zero(mask) on foreground,
// -distance_to_zero(1-mask) on background. Foreground boundary pixels are at
// least 1 away from the nearest background pixel. Throws DegenerateMask when
// the mask is entirely foreground or entirely background.
ScalarField signed_distance(const BinaryMask& mask);

// Signed distance normalized separately per region: foreground divided by its
// max (so the innermost pixel is exactly +1), background divided by |min| (so
// the farthest background pixel is exactly -1). A mask with no background
// pixel falls back to distances against a virtual zero ring outside the
// image, normalized by their max. Throws EmptyMask when no foreground exists.
ScalarField boundary_field(const BinaryMask& mask);

// Unit vectors pointing away from the center of the tightest bounding box
// (half-integral when a bbox side has even length). Background pixels and
// pixels within 1e-9 of the center get (0, 0). Empty mask gives an all-zero
// field.
VectorField center_field(const BinaryMask& mask);

// Recovers the max interior distance from a normalized boundary field via
// 1 / ||central-difference gradient||. The pixel must not be on the field
// border and must have a positive value. Throws ZeroGradient when the
// gradient norm is below 1e-9 (medial-axis pixels).
double recover_max_distance(const ScalarField& field, int u, int v);

// Tightest bounding box over foreground pixels. Throws EmptyMask.
PixelBox tightest_bbox(const BinaryMask& mask);

// Largest full-width or full-height background strip (above / below / left /
// right of the object box), ties broken in that order. Throws NoBackground
// when the box spans the whole image.
PixelBox negative_twin_crop(int height, int width, const PixelBox& object_box);

// Corner-aligned bilinear resampling, applied per channel.
ScalarField resize_bilinear(const ScalarField& src, int out_h, int out_w);
VectorField resize_bilinear(const VectorField& src, int out_h, int out_w);

// Corner-aligned source coordinate for a destination index (shared by the
// bilinear and nearest-neighbor samplers so crops and paste-backs agree).
inline double sample_coord(int dst_index, int dst_len, int src_len) {
  if (dst_len <= 1 || src_len <= 1) return 0.0;
  return double(dst_index) * double(src_len - 1) / double(dst_len - 1);
}

}  // namespace cbr
