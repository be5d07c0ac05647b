#pragma once

#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace cbr {

// Intersection over union with inclusive pixel areas ((u2-u1+1)*(v2-v1+1)).
// Throws EmptyUnion when the union has no area.
double iou_box(const PixelBox& a, const PixelBox& b);

// Pixelwise IoU. Throws EmptyUnion when both masks are empty.
double iou_mask(const BinaryMask& a, const BinaryMask& b);

struct EvalDetection {
  PixelBox box;
  BinaryMask mask;
  double confidence = 0;
};

struct EvalInstance {
  PixelBox box;
  BinaryMask mask;
};

// COCO-style thresholds 0.50:0.05:0.95.
std::vector<double> default_iou_thresholds();

// name -> value, flat: ap_box, ap50_box, ap75_box, ar100_box and the same
// four with _mask. AP is 101-point interpolated, averaged over thresholds;
// AR is mean recall over thresholds with at most max_dets detections per
// scene. Matching is greedy per scene: detections in descending confidence
// each take the highest-IoU unmatched ground truth at or above the threshold.
using Metrics = std::map<std::string, double>;
Metrics evaluate(const std::vector<std::vector<EvalDetection>>& detections,
                 const std::vector<std::vector<EvalInstance>>& ground_truth,
                 const std::vector<double>& iou_thresholds =
                     default_iou_thresholds(),
                 int max_dets = 100);

}  // namespace cbr
