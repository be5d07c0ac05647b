#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cbr {

double iou_box(const PixelBox& a, const PixelBox& b) {
  long long union_area = 0;
  long long inter = 0;
  if (a.valid() && b.valid()) {
    long long iu1 = std::max(a.u1, b.u1), iu2 = std::min(a.u2, b.u2);
    long long iv1 = std::max(a.v1, b.v1), iv2 = std::min(a.v2, b.v2);
    if (iu2 >= iu1 && iv2 >= iv1) inter = (iu2 - iu1 + 1) * (iv2 - iv1 + 1);
    union_area = a.area() + b.area() - inter;
  } else if (a.valid()) {
    union_area = a.area();
  } else if (b.valid()) {
    union_area = b.area();
  }
  require(union_area > 0, ErrorCode::EmptyUnion, "boxes have no union area");
  return double(inter) / double(union_area);
}

double iou_mask(const BinaryMask& a, const BinaryMask& b) {
  require(a.height == b.height && a.width == b.width,
          ErrorCode::InvalidArgument, "mask dimensions differ");
  long long inter = 0, uni = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    bool pa = a.data[i] != 0, pb = b.data[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  require(uni > 0, ErrorCode::EmptyUnion, "masks have no union area");
  return double(inter) / double(uni);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

namespace {

// Greedy per-scene matching at one threshold; returns per-detection hit flags
// (detections already sorted by descending confidence).
std::vector<char> match_scene(const std::vector<std::vector<double>>& iou,
                              int n_gt, double threshold) {
  std::vector<char> hit(iou.size(), 0);
  std::vector<char> taken(size_t(n_gt), 0);
  for (size_t d = 0; d < iou.size(); ++d) {
    int best = -1;
    double best_iou = -1.0;
    for (int g = 0; g < n_gt; ++g) {
      if (taken[size_t(g)]) continue;
      double v = iou[d][size_t(g)];
      if (v >= threshold && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[size_t(best)] = 1;
      hit[d] = 1;
    }
  }
  return hit;
}

// 101-point interpolated average precision.
double interpolated_ap(const std::vector<char>& hits_ranked, long long n_gt) {
  if (n_gt == 0) return 0.0;
  std::vector<double> precision, recall;
  long long tp = 0;
  for (size_t i = 0; i < hits_ranked.size(); ++i) {
    tp += hits_ranked[i] != 0;
    precision.push_back(double(tp) / double(i + 1));
    recall.push_back(double(tp) / double(n_gt));
  }
  for (int i = int(precision.size()) - 2; i >= 0; --i)
    precision[size_t(i)] = std::max(precision[size_t(i)], precision[size_t(i) + 1]);

  double ap = 0.0;
  for (int r = 0; r <= 100; ++r) {
    double want = r / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), want);
    if (it != recall.end()) ap += precision[size_t(it - recall.begin())];
  }
  return ap / 101.0;
}

}  // namespace

Metrics evaluate(const std::vector<std::vector<EvalDetection>>& detections,
                 const std::vector<std::vector<EvalInstance>>& ground_truth,
                 const std::vector<double>& iou_thresholds, int max_dets) {
  require(detections.size() == ground_truth.size(), ErrorCode::InvalidArgument,
          "detections and ground truth must cover the same scenes");
  require(!iou_thresholds.empty() && max_dets > 0, ErrorCode::InvalidArgument,
          "bad evaluation parameters");

  const size_t n_scenes = detections.size();
  long long n_gt = 0;
  for (const auto& g : ground_truth) n_gt += (long long)g.size();

  // Confidence-ranked detection order per scene, truncated to max_dets.
  std::vector<std::vector<int>> order(n_scenes);
  for (size_t s = 0; s < n_scenes; ++s) {
    order[s].resize(detections[s].size());
    std::iota(order[s].begin(), order[s].end(), 0);
    std::stable_sort(order[s].begin(), order[s].end(), [&](int a, int b) {
      return detections[s][size_t(a)].confidence >
             detections[s][size_t(b)].confidence;
    });
    if (int(order[s].size()) > max_dets) order[s].resize(size_t(max_dets));
  }

  Metrics out;
  for (int kind = 0; kind < 2; ++kind) {  // 0 = box, 1 = mask
    const std::string suffix = kind == 0 ? "_box" : "_mask";

    // IoU matrices in ranked detection order.
    std::vector<std::vector<std::vector<double>>> iou(n_scenes);
    for (size_t s = 0; s < n_scenes; ++s) {
      iou[s].resize(order[s].size());
      for (size_t d = 0; d < order[s].size(); ++d) {
        const EvalDetection& det = detections[s][size_t(order[s][d])];
        iou[s][d].resize(ground_truth[s].size());
        for (size_t g = 0; g < ground_truth[s].size(); ++g) {
          const EvalInstance& gt = ground_truth[s][g];
          double v = 0.0;
          try {
            v = kind == 0 ? iou_box(det.box, gt.box)
                          : iou_mask(det.mask, gt.mask);
          } catch (const Error&) {
            v = 0.0;  // degenerate pair contributes no overlap
          }
          iou[s][d][g] = v;
        }
      }
    }

    // Pooled ranking across scenes: confidence descending, stable.
    struct Ref {
      double conf;
      size_t scene;
      size_t rank;  // position within the scene's ranked order
    };
    std::vector<Ref> pooled;
    for (size_t s = 0; s < n_scenes; ++s)
      for (size_t d = 0; d < order[s].size(); ++d)
        pooled.push_back(
            {detections[s][size_t(order[s][d])].confidence, s, d});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const Ref& a, const Ref& b) { return a.conf > b.conf; });

    double ap_sum = 0, ap50 = 0, ap75 = 0, recall_sum = 0;
    for (double threshold : iou_thresholds) {
      std::vector<std::vector<char>> hits(n_scenes);
      long long matched = 0;
      for (size_t s = 0; s < n_scenes; ++s) {
        hits[s] = match_scene(iou[s], int(ground_truth[s].size()), threshold);
        for (char h : hits[s]) matched += h != 0;
      }
      std::vector<char> ranked;
      ranked.reserve(pooled.size());
      for (const Ref& r : pooled) ranked.push_back(hits[r.scene][r.rank]);

      double ap = interpolated_ap(ranked, n_gt);
      ap_sum += ap;
      if (std::abs(threshold - 0.5) < 1e-12) ap50 = ap;
      if (std::abs(threshold - 0.75) < 1e-12) ap75 = ap;
      recall_sum += n_gt > 0 ? double(matched) / double(n_gt) : 0.0;
    }

    out["ap" + suffix] = ap_sum / double(iou_thresholds.size());
    out["ap50" + suffix] = ap50;
    out["ap75" + suffix] = ap75;
    out["ar100" + suffix] = recall_sum / double(iou_thresholds.size());
  }
  return out;
}

}  // namespace cbr
