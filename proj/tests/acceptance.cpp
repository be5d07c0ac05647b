// Acceptance gate: nine end-to-end checks over the field representations,
// the discovery loop, scoring and the CLI. Prints one PASS/FAIL line per
// criterion and exits 0 only when every criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "core/eval.hpp"
#include "core/field_ops.hpp"
#include "core/labels.hpp"
#include "core/provider.hpp"
#include "core/reasoning.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

using namespace cbr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return 0.5 * (values[(n - 1) / 2] + values[n / 2]);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

// Random mask with at least one zero pixel.
BinaryMask random_mask_with_zero(Rng& rng, int max_side) {
  const int h = int(rng.range(1, max_side));
  const int w = int(rng.range(1, max_side));
  BinaryMask m(h, w);
  const double p = rng.uniform(0.2, 0.95);
  for (auto& px : m.data) px = rng.u01() < p ? 1 : 0;
  if (m.count() == (long long)m.data.size())
    m.data[size_t(rng.index(m.data.size()))] = 0;
  return m;
}

// Random mask holding both phases.
BinaryMask random_two_phase_mask(Rng& rng, int min_side, int max_side) {
  const int h = int(rng.range(min_side, max_side));
  const int w = int(rng.range(min_side, max_side));
  BinaryMask m(h, w);
  const double p = rng.uniform(0.05, 0.95);
  for (auto& px : m.data) px = rng.u01() < p ? 1 : 0;
  if (m.count() == 0) m.data[size_t(rng.index(m.data.size()))] = 1;
  if (m.count() == (long long)m.data.size())
    m.data[size_t(rng.index(m.data.size()))] = 0;
  return m;
}

// ---------------------------------------------------------------------------
// 1. Exact distance transform against the all-pairs oracle.

Outcome criterion_distance_exact() {
  const auto start = Clock::now();
  Rng rng(101);
  int exact = 0;
  const int total = 200;
  for (int trial = 0; trial < total; ++trial) {
    BinaryMask m = random_mask_with_zero(rng, 24);
    ScalarField d = distance_to_zero(m);

    bool ok = true;
    for (int u = 0; u < m.height && ok; ++u) {
      for (int v = 0; v < m.width && ok; ++v) {
        long long best = -1;
        for (int zu = 0; zu < m.height; ++zu)
          for (int zv = 0; zv < m.width; ++zv) {
            if (m.at(zu, zv)) continue;
            long long sq = (long long)(u - zu) * (u - zu) +
                           (long long)(v - zv) * (v - zv);
            if (best < 0 || sq < best) best = sq;
          }
        if (d.at(u, v) != float(std::sqrt(double(best)))) ok = false;
      }
    }
    exact += ok;
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = exact == total && elapsed < 10.0;
  out.detail = fmt("%d/%d masks exact, %.2fs (limit 10s)", exact, total,
                   elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Boundary field normalization hits +1 on foreground, -1 on background.

Outcome criterion_boundary_normalized() {
  Rng rng(202);
  int good = 0;
  const int total = 100;
  for (int trial = 0; trial < total; ++trial) {
    BinaryMask m = random_two_phase_mask(rng, 4, 64);
    ScalarField b = boundary_field(m);
    double max_fg = -2, min_bg = 2;
    for (int u = 0; u < m.height; ++u)
      for (int v = 0; v < m.width; ++v) {
        if (m.at(u, v))
          max_fg = std::max(max_fg, double(b.at(u, v)));
        else
          min_bg = std::min(min_bg, double(b.at(u, v)));
      }
    if (std::abs(max_fg - 1.0) <= 1e-6 && std::abs(min_bg + 1.0) <= 1e-6)
      ++good;
  }
  Outcome out;
  out.pass = good == total;
  out.detail = fmt("%d/%d masks with max(fg)=+1 and min(bg)=-1 within 1e-6",
                   good, total);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Peak-distance recovery on rasterized disks.

Outcome criterion_disk_recovery() {
  Outcome out;
  out.pass = true;
  for (int r : {10, 20, 40}) {
    const int side = 2 * r + 21;
    const int c = side / 2;
    BinaryMask m(side, side);
    for (int u = 0; u < side; ++u)
      for (int v = 0; v < side; ++v)
        if ((u - c) * (u - c) + (v - c) * (v - c) <= r * r) m.at(u, v) = 1;
    ScalarField b = boundary_field(m);

    std::vector<double> rel_errors;
    for (int u = 1; u < side - 1; ++u)
      for (int v = 1; v < side - 1; ++v) {
        const double value = b.at(u, v);
        if (value < 0.2 || value > 0.8) continue;
        double rel;
        try {
          rel = std::abs(recover_max_distance(b, u, v) - r) / double(r);
        } catch (const Error&) {
          rel = 1e9;  // unusable sample counts against the median
        }
        rel_errors.push_back(rel);
      }
    const double med = median(rel_errors);
    if (med > 0.15 || rel_errors.empty()) out.pass = false;
    out.detail += fmt("r=%d median %.3f (n=%zu)  ", r, med,
                      rel_errors.size());
  }
  out.detail += "(limit 0.15)";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Single-object scenes: tight convergence, few iterations, bounded time.

Outcome criterion_single_object() {
  const auto start = Clock::now();
  SynthConfig sc;
  sc.height = 256;
  sc.width = 256;
  sc.min_objects = 1;
  sc.max_objects = 1;

  ReasoningConfig rc;
  const int total = 100;
  int tight = 0;
  int max_iterations_seen = 0;
  std::vector<double> top_iterations;
  for (int i = 0; i < total; ++i) {
    sc.seed = 4000 + std::uint64_t(i);
    SynthResult sr = generate(sc);
    if (sr.scene.instances.size() != 1) continue;

    OracleProvider provider(sr.scene, 1);
    DiscoverResult res = discover(provider, rc, 1);
    for (int it : res.converged_iterations)
      max_iterations_seen = std::max(max_iterations_seen, it);
    if (res.detections.empty()) continue;

    const DetectedObject& top = res.detections.front();
    top_iterations.push_back(double(top.iterations));
    const PixelBox want = tightest_bbox(sr.scene.instances[0]);
    if (iou_box(top.box, want) >= 0.9) ++tight;
  }
  const double elapsed = seconds_since(start);
  const double med = median(top_iterations);

  Outcome out;
  out.pass = tight >= 95 && max_iterations_seen <= 50 && med <= 10.0 &&
             elapsed < 120.0;
  out.detail =
      fmt("IoU>=0.9 in %d/%d (need 95), max iterations %d (cap 50), "
          "median iterations %.1f (limit 10), %.1fs (limit 120s)",
          tight, total, max_iterations_seen, med, elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Near-contact pairs: the anti-center response fires in the gap and both
//    objects come back as separate masks.

Outcome criterion_adjacent_pairs() {
  SynthConfig sc;
  sc.height = 256;
  sc.width = 256;  // gap_min 0 .. gap_max 4 by default

  ReasoningConfig rc;
  const int total = 100;
  int good = 0;
  int gap_fired = 0, both_found = 0;
  for (int i = 0; i < total; ++i) {
    sc.seed = 5000 + std::uint64_t(i);
    SynthResult sr = adjacency_pair(sc);
    const Scene& scene = sr.scene;
    if (scene.instances.size() != 2) continue;

    OracleProvider provider(scene, 1);

    // Gap response on the full-frame view, the same view the split logic
    // sees when it first meets the pair.
    PixelBox box_a = tightest_bbox(scene.instances[0]);
    PixelBox box_b = tightest_bbox(scene.instances[1]);
    const bool along_u = box_a.u2 < box_b.u1 || box_b.u2 < box_a.u1;
    int band_lo, band_hi, cross_lo, cross_hi;
    if (along_u) {
      const PixelBox& first = box_a.u2 < box_b.u1 ? box_a : box_b;
      const PixelBox& second = box_a.u2 < box_b.u1 ? box_b : box_a;
      band_lo = first.u2;
      band_hi = second.u1;
      cross_lo = std::max(box_a.v1, box_b.v1);
      cross_hi = std::min(box_a.v2, box_b.v2);
    } else {
      const PixelBox& first = box_a.v2 < box_b.v1 ? box_a : box_b;
      const PixelBox& second = box_a.v2 < box_b.v1 ? box_b : box_a;
      band_lo = first.v2;
      band_hi = second.v1;
      cross_lo = std::max(box_a.u1, box_b.u1);
      cross_hi = std::min(box_a.u2, box_b.u2);
    }

    FieldBundle full = provider.query({0, 0, scene.height - 1,
                                       scene.width - 1});
    ScalarField anti = anti_center_map(full.center);
    double best = -2;
    for (int u = 0; u < anti.height; ++u) {
      const int su = int(std::llround(sample_coord(u, anti.height,
                                                   scene.height)));
      for (int v = 0; v < anti.width; ++v) {
        const int sv = int(std::llround(sample_coord(v, anti.width,
                                                     scene.width)));
        const int axis = along_u ? su : sv;
        const int cross = along_u ? sv : su;
        if (axis < band_lo || axis > band_hi) continue;
        if (cross < cross_lo || cross > cross_hi) continue;
        best = std::max(best, double(anti.at(u, v)));
      }
    }
    const bool fired = best > rc.tau_c;
    gap_fired += fired;

    // Full discovery must recover each instance as its own mask.
    DiscoverResult res = discover(provider, rc, 1);
    bool found_a = false, found_b = false;
    for (const DetectedObject& d : res.detections) {
      try {
        if (iou_mask(d.mask, scene.instances[0]) >= 0.8) found_a = true;
      } catch (const Error&) {
      }
      try {
        if (iou_mask(d.mask, scene.instances[1]) >= 0.8) found_b = true;
      } catch (const Error&) {
      }
    }
    both_found += found_a && found_b;
    good += fired && found_a && found_b;
  }
  Outcome out;
  out.pass = good >= 90;
  out.detail = fmt(
      "gap response >0.25 in %d, both masks IoU>=0.8 in %d, "
      "joint %d/%d (need 90)",
      gap_fired, both_found, good, total);
  return out;
}

// ---------------------------------------------------------------------------
// 6. Crowded scenes score well under the project evaluator.

Outcome criterion_multi_object() {
  SynthConfig sc;
  sc.height = 256;
  sc.width = 256;
  sc.min_objects = 3;
  sc.max_objects = 8;
  sc.min_gap = 12.0;
  sc.min_size = 20;
  sc.max_size = 44;

  ReasoningConfig rc;
  std::vector<std::vector<EvalDetection>> dets;
  std::vector<std::vector<EvalInstance>> gts;
  std::uint64_t seed = 6000;
  while (dets.size() < 50) {
    sc.seed = seed++;
    SynthResult sr = generate(sc);
    // Keep only scenes where every requested object found a spot.
    if (int(sr.scene.instances.size()) != sr.requested) continue;

    std::vector<EvalInstance> gt;
    for (const BinaryMask& inst : sr.scene.instances)
      gt.push_back({tightest_bbox(inst), inst});

    OracleProvider provider(sr.scene, 1);
    DiscoverResult res = discover(provider, rc, 1);
    std::vector<EvalDetection> det;
    for (const DetectedObject& d : res.detections)
      det.push_back({d.box, d.mask, d.conf});

    gts.push_back(std::move(gt));
    dets.push_back(std::move(det));
  }

  Metrics m = evaluate(dets, gts);
  Outcome out;
  out.pass = m.at("ap50_box") >= 0.90 && m.at("ar100_box") >= 0.90;
  out.detail = fmt("ap50_box %.4f ar100_box %.4f (need 0.90 each); "
                   "ap50_mask %.4f ar100_mask %.4f",
                   m.at("ap50_box"), m.at("ar100_box"), m.at("ap50_mask"),
                   m.at("ar100_mask"));
  return out;
}

// ---------------------------------------------------------------------------
// 7. Confidence products and pseudo-label thresholds are exact.

Outcome criterion_confidence_formulas() {
  Outcome out;
  out.pass = true;

  ConfidenceParts full{1.0, 1.0, 1.0, 1.0};
  ConfidenceParts sixteenth{1.0, 1.0, 1.0, std::pow(1.0 / 16.0, 0.25)};
  if (confidence(full) != 1.0) out.pass = false;
  if (confidence(sixteenth) != 0.5) out.pass = false;

  // The same 1:16 area ratio drives label weights through the mask counts.
  auto make = [](int id, double e, double c, double b, long long area) {
    DetectedObject d;
    d.proposal_id = id;
    d.parts = {e, c, b, 1.0};
    d.conf = confidence(d.parts);
    d.mask = BinaryMask(32, 32);
    for (long long i = 0; i < area; ++i) d.mask.data[size_t(i)] = 1;
    d.box = {0, 0, 31, 31};
    return d;
  };
  std::vector<DetectedObject> ratio = {make(0, 1, 1, 1, 256),
                                       make(1, 1, 1, 1, 16)};
  auto weighted = select_labels(ratio, LabelSelectionConfig{});
  if (weighted.size() != 2 || weighted[0].weight != 1.0 ||
      weighted[1].weight != 0.5)
    out.pass = false;

  // Threshold filter on a mixed set: inclusive at (0.5, 0.8, 0.75), any
  // single dimension below drops the detection.
  std::vector<DetectedObject> mixed = {
      make(0, 0.50, 0.80, 0.75, 10),  // exactly at all three: kept
      make(1, 0.49, 0.90, 0.90, 10),  // existence short: dropped
      make(2, 0.90, 0.79, 0.90, 10),  // center norm short: dropped
      make(3, 0.90, 0.90, 0.74, 10),  // boundary short: dropped
      make(4, 1.00, 1.00, 1.00, 10),  // clear: kept
      make(5, 0.51, 0.81, 0.76, 10),  // just above: kept
      make(6, 0.00, 0.00, 0.00, 10),  // hopeless: dropped
  };
  auto kept = select_labels(mixed, LabelSelectionConfig{});
  std::vector<int> ids;
  for (const PseudoLabel& l : kept) ids.push_back(l.object.proposal_id);
  if (ids != std::vector<int>{0, 4, 5}) out.pass = false;

  out.detail = fmt("confidences {%.17g, %.17g} want {1, 0.5}; "
                   "threshold filter kept %zu of 7 (want ids 0,4,5)",
                   confidence(full), confidence(sixteenth), ids.size());
  return out;
}

// ---------------------------------------------------------------------------
// 8. The evaluator agrees with a brute-force reference on random tiny sets.

namespace reference {

double box_overlap(const PixelBox& a, const PixelBox& b) {
  bool av = a.u2 >= a.u1 && a.v2 >= a.v1;
  bool bv = b.u2 >= b.u1 && b.v2 >= b.v1;
  double inter = 0;
  if (av && bv) {
    int lu = std::max(a.u1, b.u1), hu = std::min(a.u2, b.u2);
    int lv = std::max(a.v1, b.v1), hv = std::min(a.v2, b.v2);
    if (hu >= lu && hv >= lv) inter = double(hu - lu + 1) * double(hv - lv + 1);
  }
  double uni = 0;
  if (av) uni += double(a.u2 - a.u1 + 1) * double(a.v2 - a.v1 + 1);
  if (bv) uni += double(b.u2 - b.u1 + 1) * double(b.v2 - b.v1 + 1);
  uni -= inter;
  return uni <= 0 ? 0.0 : inter / uni;
}

double mask_overlap(const BinaryMask& a, const BinaryMask& b) {
  if (a.height != b.height || a.width != b.width) return 0.0;
  double inter = 0, uni = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    bool pa = a.data[i] != 0, pb = b.data[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni <= 0 ? 0.0 : inter / uni;
}

// Stable descending-confidence order by repeated scan.
std::vector<int> ranked(const std::vector<EvalDetection>& dets, int cap) {
  std::vector<int> order;
  std::vector<char> used(dets.size(), 0);
  while (order.size() < dets.size()) {
    int pick = -1;
    for (int i = 0; i < int(dets.size()); ++i) {
      if (used[size_t(i)]) continue;
      if (pick < 0 ||
          dets[size_t(i)].confidence > dets[size_t(pick)].confidence)
        pick = i;
    }
    used[size_t(pick)] = 1;
    order.push_back(pick);
  }
  if (int(order.size()) > cap) order.resize(size_t(cap));
  return order;
}

Metrics evaluate(const std::vector<std::vector<EvalDetection>>& dets,
                 const std::vector<std::vector<EvalInstance>>& gts,
                 const std::vector<double>& thresholds, int max_dets) {
  const size_t n_scenes = dets.size();
  std::vector<std::vector<int>> order(n_scenes);
  for (size_t s = 0; s < n_scenes; ++s) order[s] = ranked(dets[s], max_dets);
  long long total_gt = 0;
  for (const auto& g : gts) total_gt += (long long)g.size();

  struct Entry {
    double conf;
    size_t scene, rank;
  };
  std::vector<Entry> entries;
  for (size_t s = 0; s < n_scenes; ++s)
    for (size_t r = 0; r < order[s].size(); ++r)
      entries.push_back({dets[s][size_t(order[s][r])].confidence, s, r});
  std::vector<Entry> pooled;
  std::vector<char> used(entries.size(), 0);
  while (pooled.size() < entries.size()) {
    int pick = -1;
    for (int i = 0; i < int(entries.size()); ++i) {
      if (used[size_t(i)]) continue;
      if (pick < 0 || entries[size_t(i)].conf > entries[size_t(pick)].conf)
        pick = i;
    }
    used[size_t(pick)] = 1;
    pooled.push_back(entries[size_t(pick)]);
  }

  Metrics out;
  for (int kind = 0; kind < 2; ++kind) {
    double ap_acc = 0, ap50 = 0, ap75 = 0, ar_acc = 0;
    for (double t : thresholds) {
      std::vector<std::vector<char>> hit(n_scenes);
      long long matched = 0;
      for (size_t s = 0; s < n_scenes; ++s) {
        hit[s].assign(order[s].size(), 0);
        std::vector<char> taken(gts[s].size(), 0);
        for (size_t r = 0; r < order[s].size(); ++r) {
          const EvalDetection& d = dets[s][size_t(order[s][r])];
          int best_g = -1;
          double best = -1.0;
          for (size_t g = 0; g < gts[s].size(); ++g) {
            if (taken[g]) continue;
            double v = kind == 0 ? box_overlap(d.box, gts[s][g].box)
                                 : mask_overlap(d.mask, gts[s][g].mask);
            if (v >= t && v > best) {
              best = v;
              best_g = int(g);
            }
          }
          if (best_g >= 0) {
            taken[size_t(best_g)] = 1;
            hit[s][r] = 1;
            ++matched;
          }
        }
      }
      double ap = 0;
      if (total_gt > 0) {
        std::vector<double> prec, rec;
        long long tp = 0;
        for (size_t k = 0; k < pooled.size(); ++k) {
          tp += hit[pooled[k].scene][pooled[k].rank] != 0;
          prec.push_back(double(tp) / double(k + 1));
          rec.push_back(double(tp) / double(total_gt));
        }
        for (int i = int(prec.size()) - 2; i >= 0; --i)
          prec[size_t(i)] = std::max(prec[size_t(i)], prec[size_t(i) + 1]);
        double sum = 0;
        for (int r100 = 0; r100 <= 100; ++r100) {
          double want = r100 / 100.0;
          for (size_t i = 0; i < rec.size(); ++i)
            if (rec[i] >= want) {
              sum += prec[i];
              break;
            }
        }
        ap = sum / 101.0;
      }
      ap_acc += ap;
      if (std::abs(t - 0.50) < 1e-12) ap50 = ap;
      if (std::abs(t - 0.75) < 1e-12) ap75 = ap;
      ar_acc += total_gt > 0 ? double(matched) / double(total_gt) : 0.0;
    }
    const std::string sfx = kind == 0 ? "_box" : "_mask";
    out["ap" + sfx] = ap_acc / double(thresholds.size());
    out["ap50" + sfx] = ap50;
    out["ap75" + sfx] = ap75;
    out["ar100" + sfx] = ar_acc / double(thresholds.size());
  }
  return out;
}

}  // namespace reference

Outcome criterion_evaluator_equivalence() {
  Rng rng(808);
  const int total = 50;
  int agreeing = 0;
  double worst = 0;
  for (int set = 0; set < total; ++set) {
    const int n_scenes = int(rng.range(1, 3));
    std::vector<std::vector<EvalDetection>> dets(
        static_cast<size_t>(n_scenes));
    std::vector<std::vector<EvalInstance>> gts(static_cast<size_t>(n_scenes));
    auto random_box = [&]() {
      PixelBox b;
      b.u1 = int(rng.range(0, 7));
      b.v1 = int(rng.range(0, 7));
      b.u2 = std::min(7, b.u1 + int(rng.range(0, 4)));
      b.v2 = std::min(7, b.v1 + int(rng.range(0, 4)));
      return b;
    };
    auto random_mask = [&]() {
      BinaryMask m(8, 8);
      for (auto& p : m.data) p = rng.u01() < 0.3 ? 1 : 0;
      return m;
    };
    for (int s = 0; s < n_scenes; ++s) {
      const int n_det = int(rng.range(0, 5));
      const int n_gt = int(rng.range(0, 5));
      for (int d = 0; d < n_det; ++d)
        dets[size_t(s)].push_back(
            {random_box(), random_mask(), double(rng.range(1, 10)) / 10.0});
      for (int g = 0; g < n_gt; ++g)
        gts[size_t(s)].push_back({random_box(), random_mask()});
    }

    Metrics got = evaluate(dets, gts);
    Metrics want =
        reference::evaluate(dets, gts, default_iou_thresholds(), 100);
    bool same = got.size() == want.size();
    for (const auto& [key, value] : want) {
      const double diff = std::abs(got.at(key) - value);
      worst = std::max(worst, diff);
      if (diff > 1e-9) same = false;
    }
    agreeing += same;
  }
  Outcome out;
  out.pass = agreeing == total;
  out.detail = fmt("%d/%d sets agree on all metrics, worst gap %.2e "
                   "(limit 1e-9)",
                   agreeing, total, worst);
  return out;
}

// ---------------------------------------------------------------------------
// 9. The CLI is deterministic across repeats and thread counts.

int run_quiet(const std::string& cmd) {
  int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "<unreadable:" + path.string() + ">";
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

Outcome criterion_cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "cbr_accept_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = CBR_CLI_PATH;
  const std::string scenes = (dir / "scenes.json").string();

  Outcome out;
  if (run_quiet(cli + " synth --count 2 --seed 3 --out " + scenes) != 0) {
    out.detail = "scene synthesis failed";
    fs::remove_all(dir);
    return out;
  }
  for (const auto& [name, threads] :
       {std::pair{"r1", 1}, std::pair{"r2", 1}, std::pair{"r8", 8}}) {
    const std::string run_dir = (dir / name).string();
    if (run_quiet(cli + " discover --scenes " + scenes + " --threads " +
                  std::to_string(threads) + " --out " + run_dir) != 0) {
      out.detail = fmt("discover failed for %s", name);
      fs::remove_all(dir);
      return out;
    }
  }
  const std::string r1 = file_bytes(dir / "r1" / "detections.json");
  const std::string r2 = file_bytes(dir / "r2" / "detections.json");
  const std::string r8 = file_bytes(dir / "r8" / "detections.json");
  const bool repeat_same = r1 == r2;
  const bool threads_same = r1 == r8;
  fs::remove_all(dir);

  out.pass = repeat_same && threads_same && !r1.empty();
  out.detail = fmt("repeat identical: %s, threads 1 vs 8 identical: %s "
                   "(%zu bytes)",
                   repeat_same ? "yes" : "no", threads_same ? "yes" : "no",
                   r1.size());
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"exact distance transform", criterion_distance_exact},
      {"boundary field normalization", criterion_boundary_normalized},
      {"disk peak-distance recovery", criterion_disk_recovery},
      {"single-object convergence", criterion_single_object},
      {"near-contact pair splitting", criterion_adjacent_pairs},
      {"multi-object discovery quality", criterion_multi_object},
      {"confidence and label formulas", criterion_confidence_formulas},
      {"evaluator reference equivalence", criterion_evaluator_equivalence},
      {"CLI determinism", criterion_cli_determinism},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d (%s): %s - %s\n", index, c.label,
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  if (failures == 0) {
    std::printf("RESULT: ALL PASS (9/9)\n");
    return 0;
  }
  std::printf("RESULT: %d of 9 criteria failed\n", failures);
  return 1;
}
