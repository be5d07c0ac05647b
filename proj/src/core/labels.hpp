#pragma once

#include <vector>

#include "reasoning.hpp"

namespace cbr {

struct LabelSelectionConfig {
  double min_existence = 0.5;
  double min_center_norm = 0.8;
  double min_boundary = 0.75;
  // When set, weights normalize by the largest mask among ALL discovered
  // objects instead of only the kept ones.
  bool weight_over_all_discovered = false;
};

struct PseudoLabel {
  DetectedObject object;
  double weight = 0;  // (mask area / normalizer area)^0.25
};

// Keeps detections whose existence, peak center norm and peak boundary value
// all clear their thresholds; order preserved. Raising any threshold never
// grows the selection.
std::vector<PseudoLabel> select_labels(
    const std::vector<DetectedObject>& detections,
    const LabelSelectionConfig& config);

}  // namespace cbr
