#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scene.hpp"

namespace cbr {

enum class ShapeKind { Rectangle, Disk, Ellipse };

struct SynthConfig {
  int height = 256;
  int width = 256;
  int min_objects = 1;
  int max_objects = 1;
  std::vector<ShapeKind> shapes = {ShapeKind::Rectangle, ShapeKind::Disk,
                                   ShapeKind::Ellipse};
  int min_size = 40;       // bounding extent per axis
  int max_size = 120;
  double min_gap = 8.0;    // min inter-mask pixel distance; negative allows overlap
  int gap_min = 0;         // adjacency_pair gap range, in empty pixels
  int gap_max = 4;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Scene scene;
  int requested = 0;  // objects asked for; scene may hold fewer after retries
};

// Rejection-sampled placement: each object gets up to 1000 attempts to land
// with pairwise mask distance >= min_gap (and no overlap when min_gap >= 0);
// unplaceable objects are skipped, not fatal.
SynthResult generate(const SynthConfig& config);

// Exactly two congruent shapes separated by a sampled gap of gap_min..gap_max
// empty pixels along one axis.
SynthResult adjacency_pair(const SynthConfig& config);

ShapeKind shape_from_name(const std::string& name);
std::string shape_name(ShapeKind kind);

}  // namespace cbr
