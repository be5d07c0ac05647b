#pragma once

#include <cstdint>
#include <vector>

#include "provider.hpp"
#include "types.hpp"

namespace cbr {

struct ReasoningConfig {
  std::vector<int> scales = {32, 64, 128, 256, 512};
  std::vector<double> aspect_ratios = {0.5, 1.0, 2.0};
  double tau_e = 0.5;        // existence gate
  double tau_c = 0.25;       // anti-center split trigger
  double tau_adjust = 0.5;   // border step over/under-shoot factor
  double shrink_margin = 16.0;  // scene px of tolerated pending contraction
  int max_iterations = 50;
  double nms_iou = 0.5;
  std::uint64_t seed = 0;
};

// 5x5 unit-vector kernel pointing at the kernel center (zero at the center
// cell). Centrally antisymmetric: K[i][j] == -K[4-i][4-j].
VectorField anti_center_kernel();

// Mean cosine response of the kernel over the 24 non-center cells with zero
// padding, in [-1, 1]. Peaks where neighboring field vectors run toward each
// other, i.e. between crowded objects. One-sided transitions at the edge of
// the field's support respond spuriously (about +0.31 on a straight edge);
// with mask_support_boundary set, support pixels with a zero 4-neighbor and
// support-adjacent zero pixels not sandwiched between support within 2 px
// along an axis are forced to -1. Image borders count as zero.
ScalarField anti_center_map(const VectorField& center,
                            bool mask_support_boundary = true);

struct CenterDecision {
  enum Kind { SingleObject, Split, Components } kind = SingleObject;
  int split_u = 0;  // crop coords, valid when kind == Split
  int split_v = 0;
  std::vector<PixelBox> components;  // crop coords, valid when kind == Components
};

// Step #2: split when the anti-center max exceeds tau_c; otherwise fall back
// to 4-connected components over ||f^c|| >= 0.5 (their bounding boxes must be
// pairwise disjoint to count as separate objects).
CenterDecision center_reasoning(const VectorField& center, double tau_c);

// Step #2 fan-out: partitions the box at the crop pixel mapped back to scene
// coordinates. Children: left/right split by column, upper/lower by row,
// disjoint halves; children thinner than 2 px are dropped.
std::vector<PixelBox> split_at(const PixelBox& box, int crop_u, int crop_v);

// Gradient-norm field blended from soft foreground/background region means,
// weighted by the logistic of the field value. A vanished region (weight sum
// below 1e-9) falls back to the other region's mean everywhere.
ScalarField averaged_gradient_norm(const ScalarField& field);

// Raw border steps in scene pixels, positive = expansion. Expansions are
// capped at the room left inside the scene so borders pinned at the image
// edge can converge.
struct BorderStepReport {
  double raw_top = 0, raw_bottom = 0, raw_left = 0, raw_right = 0;
};

struct StepOutcome {
  PixelBox box;  // updated box, clamped to scene, at least 2x2
  BorderStepReport report;
};

// Step #3: per border, raw step = (max f^b along border) / averaged gradient
// norm at the argmax, converted to scene pixels; applied step adds
// tau_adjust * |raw| outward (net x1.5 expansion, x0.5 contraction).
StepOutcome boundary_update(const PixelBox& box, const ScalarField& boundary,
                            const ReasoningConfig& cfg, int scene_h,
                            int scene_w);

// Converged when no border wants to expand and every pending contraction is
// smaller than shrink_margin scene pixels.
bool has_converged(const BorderStepReport& report, double shrink_margin);

// Crop-space mask (||f^c|| >= 0.5 or f^b >= 0) resized to the box extent with
// nearest-neighbor sampling and pasted into a scene-sized zero mask.
BinaryMask extract_mask(const FieldBundle& bundle, const PixelBox& box,
                        int scene_h, int scene_w);

struct ConfidenceParts {
  double existence = 0;
  double max_center_norm = 0;
  double max_boundary = 0;
  double area_factor = 0;  // (mask area / largest mask area in scene)^0.25
};

inline double confidence(const ConfidenceParts& p) {
  return p.existence * p.max_center_norm * p.max_boundary * p.area_factor;
}

struct DetectedObject {
  PixelBox box;
  BinaryMask mask;  // scene-sized, foreground confined to box
  double conf = 0;
  ConfidenceParts parts;
  int iterations = 0;   // boundary updates applied before convergence
  int proposal_id = 0;
};

// Greedy by descending confidence; a detection is dropped when its box IoU
// with an already-kept detection exceeds the threshold. Stable among ties.
std::vector<DetectedObject> nms(std::vector<DetectedObject> detections,
                                double iou_threshold);

// Step #0: per scale, anchors on a stride-s grid with seeded jitter in
// [-s/4, +s/4] per axis, one box per aspect ratio (height s*sqrt(r), width
// s/sqrt(r)), clamped to the scene; scales exceeding the scene collapse to
// full-frame boxes. Duplicates are removed, first occurrence kept.
std::vector<PixelBox> generate_initial_proposals(int scene_h, int scene_w,
                                                 const ReasoningConfig& cfg);

// Observer for per-iteration traces.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_query(int proposal_id, int iteration, const PixelBox& box,
                        const FieldBundle& bundle) = 0;
};

struct DiscoverResult {
  std::vector<DetectedObject> detections;  // post-NMS, descending confidence
  std::vector<int> converged_iterations;   // pre-NMS, one per converged proposal
  int proposals_created = 0;
  bool budget_exhausted = false;
};

// Full multi-object loop. Per proposal, every iteration runs the existence
// gate, center reasoning (split children re-enter as fresh proposals with a
// fresh iteration budget) and one boundary update, until convergence or
// max_iterations. Converged proposals get confidence scores and pass through
// NMS. Total proposals ever created are capped at 20x the initial count;
// hitting the cap flags the result and keeps whatever converged.
// Deterministic for a fixed seed regardless of thread count.
DiscoverResult discover(FieldProvider& provider, const ReasoningConfig& cfg,
                        int threads = 1, TraceSink* trace = nullptr);

}  // namespace cbr
