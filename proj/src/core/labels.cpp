#include "labels.hpp"

#include <algorithm>
#include <cmath>

namespace cbr {

std::vector<PseudoLabel> select_labels(
    const std::vector<DetectedObject>& detections,
    const LabelSelectionConfig& config) {
  std::vector<PseudoLabel> kept;
  for (const DetectedObject& d : detections) {
    if (d.parts.existence >= config.min_existence &&
        d.parts.max_center_norm >= config.min_center_norm &&
        d.parts.max_boundary >= config.min_boundary)
      kept.push_back({d, 0.0});
  }

  long long normalizer = 0;
  if (config.weight_over_all_discovered) {
    for (const DetectedObject& d : detections)
      normalizer = std::max(normalizer, d.mask.count());
  } else {
    for (const PseudoLabel& l : kept)
      normalizer = std::max(normalizer, l.object.mask.count());
  }
  for (PseudoLabel& l : kept)
    l.weight = normalizer > 0
                   ? std::pow(double(l.object.mask.count()) / double(normalizer),
                              0.25)
                   : 0.0;
  return kept;
}

}  // namespace cbr
