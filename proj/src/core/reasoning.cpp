#include "reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "eval.hpp"
#include "field_ops.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace cbr {

namespace {

constexpr int kBudgetFactor = 20;

inline bool support(const VectorField& f, int u, int v) {
  return f.du(u, v) != 0.f || f.dv(u, v) != 0.f;
}

int clampi(int x, int lo, int hi) { return std::max(lo, std::min(hi, x)); }

// Keeps a box inside the scene at minimum extent 2x2 without moving borders
// that already satisfy the constraints.
PixelBox sanitize_box(PixelBox b, int scene_h, int scene_w) {
  b.u1 = clampi(b.u1, 0, scene_h - 1);
  b.u2 = clampi(b.u2, 0, scene_h - 1);
  b.v1 = clampi(b.v1, 0, scene_w - 1);
  b.v2 = clampi(b.v2, 0, scene_w - 1);
  if (b.u2 < b.u1) std::swap(b.u1, b.u2);
  if (b.v2 < b.v1) std::swap(b.v1, b.v2);
  if (b.height() < 2) {
    if (b.u1 > 0)
      --b.u1;
    else
      b.u2 = clampi(b.u2 + 1, 0, scene_h - 1);
  }
  if (b.width() < 2) {
    if (b.v1 > 0)
      --b.v1;
    else
      b.v2 = clampi(b.v2 + 1, 0, scene_w - 1);
  }
  return b;
}

int crop_to_scene(int crop_index, int box_lo, int box_extent) {
  return box_lo +
         int(std::llround(sample_coord(crop_index, kCropSize, box_extent)));
}

}  // namespace

VectorField anti_center_kernel() {
  VectorField k(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == 2 && j == 2) continue;
      double du = 2.0 - i, dv = 2.0 - j;
      double norm = std::sqrt(du * du + dv * dv);
      k.set(i, j, float(du / norm), float(dv / norm));
    }
  return k;
}

ScalarField anti_center_map(const VectorField& center,
                            bool mask_support_boundary) {
  const int h = center.height, w = center.width;
  static const VectorField kernel = anti_center_kernel();
  ScalarField out(h, w);

  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        int su = u + i - 2;
        if (su < 0 || su >= h) continue;  // zero padding contributes nothing
        for (int j = 0; j < 5; ++j) {
          if (i == 2 && j == 2) continue;
          int sv = v + j - 2;
          if (sv < 0 || sv >= w) continue;
          sum += double(kernel.du(i, j)) * double(center.du(su, sv)) +
                 double(kernel.dv(i, j)) * double(center.dv(su, sv));
        }
      }
      out.at(u, v) = float(sum / 24.0);
    }
  }

  if (mask_support_boundary) {
    auto on = [&](int u, int v) {
      return u >= 0 && u < h && v >= 0 && v < w && support(center, u, v);
    };
    // Support within the kernel half-window (2 px) along one axis ray.
    auto reach = [&](int u, int v, int du, int dv) {
      return on(u + du, v + dv) || on(u + 2 * du, v + 2 * dv);
    };
    for (int u = 0; u < h; ++u)
      for (int v = 0; v < w; ++v) {
        if (support(center, u, v)) {
          // Outer support edge; the field ends here and the one-sided
          // response is spurious.
          bool edge = !on(u - 1, v) || !on(u + 1, v) || !on(u, v - 1) ||
                      !on(u, v + 1);
          if (edge) out.at(u, v) = -1.f;
        } else {
          bool adjacent = on(u - 1, v) || on(u + 1, v) || on(u, v - 1) ||
                          on(u, v + 1);
          if (!adjacent) continue;
          // Background flush against support rings isolated objects with the
          // same one-sided response; keep only pixels sandwiched between
          // support along an axis, which is where genuine inter-object
          // evidence lives.
          bool sandwiched = (reach(u, v, -1, 0) && reach(u, v, 1, 0)) ||
                            (reach(u, v, 0, -1) && reach(u, v, 0, 1));
          if (!sandwiched) out.at(u, v) = -1.f;
        }
      }
  }
  return out;
}

CenterDecision center_reasoning(const VectorField& center, double tau_c) {
  const int h = center.height, w = center.width;
  ScalarField acm = anti_center_map(center);

  float best = -2.f;
  int bu = 0, bv = 0;
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v)
      if (acm.at(u, v) > best) {
        best = acm.at(u, v);
        bu = u;
        bv = v;
      }

  CenterDecision decision;
  if (best > tau_c) {
    decision.kind = CenterDecision::Split;
    decision.split_u = bu;
    decision.split_v = bv;
    return decision;
  }

  // Connected components over pixels with a meaningful center vector.
  std::vector<int> label(size_t(h) * w, -1);
  std::vector<PixelBox> boxes;
  std::vector<int> stack;
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      size_t p = size_t(u) * w + v;
      double du = center.du(u, v), dv = center.dv(u, v);
      if (label[p] >= 0 || du * du + dv * dv < 0.25) continue;
      int id = int(boxes.size());
      boxes.push_back({u, v, u, v});
      label[p] = id;
      stack.assign(1, int(p));
      while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        int qu = q / w, qv = q % w;
        boxes[size_t(id)].u1 = std::min(boxes[size_t(id)].u1, qu);
        boxes[size_t(id)].u2 = std::max(boxes[size_t(id)].u2, qu);
        boxes[size_t(id)].v1 = std::min(boxes[size_t(id)].v1, qv);
        boxes[size_t(id)].v2 = std::max(boxes[size_t(id)].v2, qv);
        const int nu[4] = {qu - 1, qu + 1, qu, qu};
        const int nv[4] = {qv, qv, qv - 1, qv + 1};
        for (int n = 0; n < 4; ++n) {
          if (nu[n] < 0 || nu[n] >= h || nv[n] < 0 || nv[n] >= w) continue;
          size_t np = size_t(nu[n]) * w + nv[n];
          double ndu = center.du(nu[n], nv[n]), ndv = center.dv(nu[n], nv[n]);
          if (label[np] >= 0 || ndu * ndu + ndv * ndv < 0.25) continue;
          label[np] = id;
          stack.push_back(int(np));
        }
      }
    }
  }

  if (boxes.size() >= 2) {
    bool disjoint = true;
    for (size_t a = 0; a < boxes.size() && disjoint; ++a)
      for (size_t b = a + 1; b < boxes.size() && disjoint; ++b) {
        bool overlap = boxes[a].u1 <= boxes[b].u2 && boxes[b].u1 <= boxes[a].u2 &&
                       boxes[a].v1 <= boxes[b].v2 && boxes[b].v1 <= boxes[a].v2;
        if (overlap) disjoint = false;
      }
    if (disjoint) {
      decision.kind = CenterDecision::Components;
      decision.components = std::move(boxes);
      return decision;
    }
  }
  return decision;  // SingleObject
}

std::vector<PixelBox> split_at(const PixelBox& box, int crop_u, int crop_v) {
  require(crop_u >= 0 && crop_u < kCropSize && crop_v >= 0 && crop_v < kCropSize,
          ErrorCode::InvalidArgument, "split pixel outside the crop");
  int su = crop_to_scene(crop_u, box.u1, box.height());
  int sv = crop_to_scene(crop_v, box.v1, box.width());

  const PixelBox candidates[4] = {
      {box.u1, box.v1, box.u2, sv - 1},  // left
      {box.u1, sv, box.u2, box.v2},      // right
      {box.u1, box.v1, su - 1, box.v2},  // upper
      {su, box.v1, box.u2, box.v2},      // lower
  };
  std::vector<PixelBox> out;
  for (const PixelBox& c : candidates)
    if (c.valid() && c.height() >= 2 && c.width() >= 2) out.push_back(c);
  return out;
}

ScalarField averaged_gradient_norm(const ScalarField& field) {
  const int h = field.height, w = field.width;
  require(h >= 2 && w >= 2, ErrorCode::InvalidArgument,
          "field too small for gradients");

  ScalarField g(h, w);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      double du, dv;
      if (u == 0)
        du = double(field.at(1, v)) - double(field.at(0, v));
      else if (u == h - 1)
        du = double(field.at(h - 1, v)) - double(field.at(h - 2, v));
      else
        du = 0.5 * (double(field.at(u + 1, v)) - double(field.at(u - 1, v)));
      if (v == 0)
        dv = double(field.at(u, 1)) - double(field.at(u, 0));
      else if (v == w - 1)
        dv = double(field.at(u, w - 1)) - double(field.at(u, w - 2));
      else
        dv = 0.5 * (double(field.at(u, v + 1)) - double(field.at(u, v - 1)));
      g.at(u, v) = float(std::sqrt(du * du + dv * dv));
    }
  }

  double wsum = 0, fg_acc = 0, bg_acc = 0, bg_wsum = 0;
  std::vector<float> weight(size_t(h) * w);
  for (size_t p = 0; p < weight.size(); ++p) {
    double s = 1.0 / (1.0 + std::exp(-double(field.data[p])));
    weight[p] = float(s);
    wsum += s;
    bg_wsum += 1.0 - s;
    fg_acc += s * g.data[p];
    bg_acc += (1.0 - s) * g.data[p];
  }

  ScalarField out(h, w);
  if (wsum < 1e-9 || bg_wsum < 1e-9) {
    // One region vanished: the other region's mean is the whole story.
    double mean = wsum >= 1e-9 ? fg_acc / wsum : bg_acc / bg_wsum;
    for (float& x : out.data) x = float(mean);
    return out;
  }
  double fg_mean = fg_acc / wsum;
  double bg_mean = bg_acc / bg_wsum;
  for (size_t p = 0; p < out.data.size(); ++p)
    out.data[p] = float(fg_mean * weight[p] + bg_mean * (1.0 - weight[p]));
  return out;
}

namespace {

struct Border {
  float max_value;
  int arg_u, arg_v;
};

Border scan_row(const ScalarField& f, int row) {
  Border b{f.at(row, 0), row, 0};
  for (int v = 1; v < f.width; ++v)
    if (f.at(row, v) > b.max_value) b = {f.at(row, v), row, v};
  return b;
}

Border scan_col(const ScalarField& f, int col) {
  Border b{f.at(0, col), 0, col};
  for (int u = 1; u < f.height; ++u)
    if (f.at(u, col) > b.max_value) b = {f.at(u, col), u, col};
  return b;
}

}  // namespace

StepOutcome boundary_update(const PixelBox& box, const ScalarField& boundary,
                            const ReasoningConfig& cfg, int scene_h,
                            int scene_w) {
  require(boundary.height == kCropSize && boundary.width == kCropSize,
          ErrorCode::InvalidArgument, "boundary field must be crop-sized");

  ScalarField avg = averaged_gradient_norm(boundary);
  const Border borders[4] = {
      scan_row(boundary, 0),              // top
      scan_row(boundary, kCropSize - 1),  // bottom
      scan_col(boundary, 0),              // left
      scan_col(boundary, kCropSize - 1),  // right
  };
  const double scale[4] = {
      double(box.height()) / kCropSize, double(box.height()) / kCropSize,
      double(box.width()) / kCropSize, double(box.width()) / kCropSize};
  const double room[4] = {
      double(box.u1), double(scene_h - 1 - box.u2),
      double(box.v1), double(scene_w - 1 - box.v2)};

  StepOutcome outcome;
  outcome.box = box;
  double raw[4];
  int delta[4];  // applied border motion, positive = outward
  for (int k = 0; k < 4; ++k) {
    double g = std::max(double(avg.at(borders[k].arg_u, borders[k].arg_v)), 1e-6);
    double raw_crop = double(borders[k].max_value) / g;
    double raw_scene = raw_crop * scale[k];
    double adj_scene = (raw_crop + cfg.tau_adjust * std::abs(raw_crop)) * scale[k];
    if (raw_scene > 0) {
      raw_scene = std::min(raw_scene, room[k]);
      adj_scene = std::min(adj_scene, room[k]);
      delta[k] = int(std::llround(adj_scene));
      // A pending sub-pixel expansion must still make progress or the
      // proposal would stall against the convergence test forever.
      if (delta[k] == 0 && raw_scene > 0) delta[k] = 1;
    } else {
      delta[k] = int(std::llround(adj_scene));
    }
    raw[k] = raw_scene;
  }

  outcome.report = {raw[0], raw[1], raw[2], raw[3]};
  outcome.box.u1 -= delta[0];
  outcome.box.u2 += delta[1];
  outcome.box.v1 -= delta[2];
  outcome.box.v2 += delta[3];
  outcome.box = sanitize_box(outcome.box, scene_h, scene_w);
  return outcome;
}

bool has_converged(const BorderStepReport& report, double shrink_margin) {
  const double raws[4] = {report.raw_top, report.raw_bottom, report.raw_left,
                          report.raw_right};
  for (double r : raws) {
    if (r > 0) return false;                       // a border wants to expand
    if (r < 0 && -r >= shrink_margin) return false;  // contraction too large
  }
  return true;
}

BinaryMask extract_mask(const FieldBundle& bundle, const PixelBox& box,
                        int scene_h, int scene_w) {
  BinaryMask crop(kCropSize, kCropSize);
  for (int u = 0; u < kCropSize; ++u)
    for (int v = 0; v < kCropSize; ++v) {
      double du = bundle.center.du(u, v), dv = bundle.center.dv(u, v);
      bool fg = du * du + dv * dv >= 0.25 || bundle.boundary.at(u, v) >= 0.f;
      crop.at(u, v) = fg ? 1 : 0;
    }

  BinaryMask scene(scene_h, scene_w);
  const int bh = box.height(), bw = box.width();
  std::vector<int> row(static_cast<size_t>(bh)), col(static_cast<size_t>(bw));
  for (int i = 0; i < bh; ++i)
    row[size_t(i)] = int(std::llround(sample_coord(i, bh, kCropSize)));
  for (int j = 0; j < bw; ++j)
    col[size_t(j)] = int(std::llround(sample_coord(j, bw, kCropSize)));
  for (int i = 0; i < bh; ++i)
    for (int j = 0; j < bw; ++j)
      if (crop.at(row[size_t(i)], col[size_t(j)]))
        scene.at(box.u1 + i, box.v1 + j) = 1;
  return scene;
}

std::vector<DetectedObject> nms(std::vector<DetectedObject> detections,
                                double iou_threshold) {
  std::stable_sort(detections.begin(), detections.end(),
                   [](const DetectedObject& a, const DetectedObject& b) {
                     return a.conf > b.conf;
                   });
  std::vector<DetectedObject> kept;
  for (DetectedObject& d : detections) {
    bool suppressed = false;
    for (const DetectedObject& k : kept)
      if (iou_box(d.box, k.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    if (!suppressed) kept.push_back(std::move(d));
  }
  return kept;
}

std::vector<PixelBox> generate_initial_proposals(int scene_h, int scene_w,
                                                 const ReasoningConfig& cfg) {
  require(scene_h >= 2 && scene_w >= 2, ErrorCode::InvalidArgument,
          "scene too small for proposals");
  Rng rng(cfg.seed);
  std::vector<PixelBox> out;
  std::set<std::array<int, 4>> seen;

  auto push = [&](PixelBox b) {
    b = sanitize_box(b, scene_h, scene_w);
    std::array<int, 4> key = {b.u1, b.v1, b.u2, b.v2};
    if (seen.insert(key).second) out.push_back(b);
  };

  auto box_at = [&](double cu, double cv, int s, double ratio) {
    double bh = s * std::sqrt(ratio);
    double bw = s / std::sqrt(ratio);
    PixelBox b;
    b.u1 = int(std::llround(cu - 0.5 * bh));
    b.v1 = int(std::llround(cv - 0.5 * bw));
    b.u2 = b.u1 + int(std::llround(bh)) - 1;
    b.v2 = b.v1 + int(std::llround(bw)) - 1;
    return b;
  };

  for (int s : cfg.scales) {
    if (s > std::min(scene_h, scene_w)) {
      // Oversized scale: every anchor clamps to (nearly) the full frame.
      for (double r : cfg.aspect_ratios)
        push(box_at(0.5 * (scene_h - 1), 0.5 * (scene_w - 1), s, r));
      continue;
    }
    int rows = (scene_h + s - 1) / s;
    int cols = (scene_w + s - 1) / s;
    for (int a = 0; a < rows; ++a) {
      for (int b = 0; b < cols; ++b) {
        double ju = (rng.u01() * 2.0 - 1.0) * (s / 4.0);
        double jv = (rng.u01() * 2.0 - 1.0) * (s / 4.0);
        double cu = std::min(double(scene_h - 1),
                             std::max(0.0, (a + 0.5) * s + ju));
        double cv = std::min(double(scene_w - 1),
                             std::max(0.0, (b + 0.5) * s + jv));
        for (double r : cfg.aspect_ratios) push(box_at(cu, cv, s, r));
      }
    }
  }
  return out;
}

namespace {

struct Proposal {
  int id;
  PixelBox box;
};

struct Outcome {
  enum Kind { Discarded, Converged, Children } kind = Discarded;
  DetectedObject det;
  std::vector<PixelBox> children;
};

Outcome evaluate_proposal(const Proposal& p, FieldProvider& provider,
                          const ReasoningConfig& cfg, int scene_h, int scene_w,
                          TraceSink* trace) {
  Outcome outcome;
  PixelBox box = p.box;
  for (int iter = 0;; ++iter) {
    FieldBundle bundle = provider.query(box);
    if (trace) trace->on_query(p.id, iter, box, bundle);

    if (bundle.existence < cfg.tau_e) return outcome;  // Step #1 gate

    // Step #2 guards every iteration, not just entry: a refining box can
    // drift over a neighboring object, and the existence gate alone cannot
    // catch that (a crop holding several complete objects still scores 1).
    // Left unsplit, such a proposal converges on the union of the objects.
    CenterDecision decision = center_reasoning(bundle.center, cfg.tau_c);
    if (decision.kind == CenterDecision::Split) {
      outcome.kind = Outcome::Children;
      outcome.children = split_at(box, decision.split_u, decision.split_v);
      return outcome;
    }
    if (decision.kind == CenterDecision::Components) {
      outcome.kind = Outcome::Children;
      for (const PixelBox& c : decision.components) {
        PixelBox child;
        child.u1 = crop_to_scene(c.u1, box.u1, box.height());
        child.u2 = crop_to_scene(c.u2, box.u1, box.height());
        child.v1 = crop_to_scene(c.v1, box.v1, box.width());
        child.v2 = crop_to_scene(c.v2, box.v1, box.width());
        outcome.children.push_back(sanitize_box(child, scene_h, scene_w));
      }
      return outcome;
    }

    StepOutcome step = boundary_update(box, bundle.boundary, cfg, scene_h,
                                       scene_w);
    if (has_converged(step.report, cfg.shrink_margin)) {
      outcome.kind = Outcome::Converged;
      outcome.det.box = box;
      outcome.det.mask = extract_mask(bundle, box, scene_h, scene_w);
      // The convergence test tolerates up to shrink_margin of residual
      // slack, so the converged frame can sit several pixels outside the
      // object.  The extracted mask is pixel-accurate; report its tight
      // bounding box instead of the frame whenever it is non-empty.
      for (int u = box.u1; u <= box.u2; ++u) {
        bool any = false;
        for (int v = box.v1; v <= box.v2; ++v)
          if (outcome.det.mask.at(u, v)) { any = true; break; }
        if (any) {
          outcome.det.box = tightest_bbox(outcome.det.mask);
          break;
        }
      }
      outcome.det.parts.existence = bundle.existence;
      double cmax = 0, bmax = -2;
      for (int u = 0; u < kCropSize; ++u)
        for (int v = 0; v < kCropSize; ++v) {
          double du = bundle.center.du(u, v), dv = bundle.center.dv(u, v);
          cmax = std::max(cmax, std::sqrt(du * du + dv * dv));
          bmax = std::max(bmax, double(bundle.boundary.at(u, v)));
        }
      // True vector norms never exceed 1; float storage can overshoot by a
      // few ulps, which would push the confidence product above 1.
      outcome.det.parts.max_center_norm = std::min(cmax, 1.0);
      outcome.det.parts.max_boundary = bmax;
      outcome.det.iterations = iter;
      outcome.det.proposal_id = p.id;
      return outcome;
    }
    if (iter >= cfg.max_iterations) return outcome;  // Discarded
    box = step.box;
  }
}

}  // namespace

DiscoverResult discover(FieldProvider& provider, const ReasoningConfig& cfg,
                        int threads, TraceSink* trace) {
  const int scene_h = provider.scene_height();
  const int scene_w = provider.scene_width();

  std::vector<PixelBox> initial = generate_initial_proposals(scene_h, scene_w,
                                                             cfg);
  const long long budget = kBudgetFactor * (long long)initial.size();

  DiscoverResult result;
  std::vector<DetectedObject> converged;

  std::vector<Proposal> wave;
  wave.reserve(initial.size());
  for (size_t i = 0; i < initial.size(); ++i)
    wave.push_back({int(i), initial[i]});
  long long created = (long long)initial.size();

  while (!wave.empty()) {
    std::vector<Outcome> outcomes(wave.size());
    parallel_for(int(wave.size()), threads, [&](int i) {
      outcomes[size_t(i)] = evaluate_proposal(wave[size_t(i)], provider, cfg,
                                              scene_h, scene_w, trace);
    });

    // Merge strictly in id order so threading cannot reorder anything.
    // Children past the budget are dropped (flagged), but every outcome of
    // the wave is still consumed and already-created children still run.
    std::vector<Proposal> next;
    for (size_t i = 0; i < outcomes.size(); ++i) {
      Outcome& o = outcomes[i];
      if (o.kind == Outcome::Converged) {
        converged.push_back(std::move(o.det));
        result.converged_iterations.push_back(converged.back().iterations);
      } else if (o.kind == Outcome::Children) {
        for (const PixelBox& child : o.children) {
          if (created >= budget) {
            result.budget_exhausted = true;
            break;
          }
          next.push_back({int(created++), child});
        }
      }
    }
    wave = std::move(next);
  }

  result.proposals_created = int(created);
  if (converged.empty()) return result;

  long long max_area = 0;
  for (const DetectedObject& d : converged)
    max_area = std::max(max_area, d.mask.count());
  for (DetectedObject& d : converged) {
    d.parts.area_factor =
        max_area > 0 ? std::pow(double(d.mask.count()) / double(max_area), 0.25)
                     : 0.0;
    d.conf = confidence(d.parts);
  }

  result.detections = nms(std::move(converged), cfg.nms_iou);
  return result;
}

}  // namespace cbr
