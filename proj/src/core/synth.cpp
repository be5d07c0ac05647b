#include "synth.hpp"

#include <algorithm>
#include <cmath>

#include "field_ops.hpp"
#include "rng.hpp"

namespace cbr {

namespace {

constexpr int kMaxAttempts = 1000;

// Rasterizes a shape whose bounding box spans rows [u0, u0+eh) and columns
// [v0, v0+ew) into the mask. Disks and ellipses are inscribed in that box.
void rasterize(BinaryMask& mask, ShapeKind kind, int u0, int v0, int eh,
               int ew) {
  double cu = u0 + 0.5 * (eh - 1);
  double cv = v0 + 0.5 * (ew - 1);
  double ru = 0.5 * eh;
  double rv = 0.5 * ew;
  for (int u = u0; u < u0 + eh; ++u) {
    for (int v = v0; v < v0 + ew; ++v) {
      bool on = true;
      if (kind != ShapeKind::Rectangle) {
        double nu = (u - cu) / ru;
        double nv = (v - cv) / rv;
        on = nu * nu + nv * nv <= 1.0;
      }
      if (on) mask.at(u, v) = 1;
    }
  }
}

// Distance from every pixel to the nearest placed foreground pixel; infinity
// (large sentinel) when nothing is placed yet.
ScalarField distance_to_placed(const BinaryMask& occupied) {
  if (occupied.empty_fg()) {
    ScalarField inf(occupied.height, occupied.width);
    for (float& x : inf.data) x = 1e9f;
    return inf;
  }
  BinaryMask inverted(occupied.height, occupied.width);
  for (size_t i = 0; i < occupied.data.size(); ++i)
    inverted.data[i] = occupied.data[i] ? 0 : 1;
  return distance_to_zero(inverted);
}

bool placement_ok(const BinaryMask& candidate, const ScalarField& dist,
                  double min_gap) {
  if (min_gap < 0) return true;
  double need = std::max(1.0, min_gap);
  for (int u = 0; u < candidate.height; ++u)
    for (int v = 0; v < candidate.width; ++v)
      if (candidate.at(u, v) && dist.at(u, v) < need) return false;
  return true;
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
  require(config.height >= 8 && config.width >= 8, ErrorCode::InvalidArgument,
          "scene too small");
  require(config.min_objects >= 0 && config.max_objects >= config.min_objects,
          ErrorCode::InvalidArgument, "bad object count range");
  require(!config.shapes.empty(), ErrorCode::InvalidArgument,
          "no shapes configured");
  require(config.min_size >= 2 && config.max_size >= config.min_size,
          ErrorCode::InvalidArgument, "bad size range");

  Rng rng(config.seed);
  SynthResult result;
  result.scene.height = config.height;
  result.scene.width = config.width;
  result.requested =
      int(rng.range(config.min_objects, config.max_objects));

  BinaryMask occupied(config.height, config.width);
  ScalarField dist = distance_to_placed(occupied);

  for (int i = 0; i < result.requested; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      ShapeKind kind = config.shapes[size_t(rng.index(config.shapes.size()))];
      int eh = int(rng.range(config.min_size,
                             std::min(config.max_size, config.height)));
      int ew = int(rng.range(config.min_size,
                             std::min(config.max_size, config.width)));
      int u0 = int(rng.range(0, config.height - eh));
      int v0 = int(rng.range(0, config.width - ew));

      BinaryMask candidate(config.height, config.width);
      rasterize(candidate, kind, u0, v0, eh, ew);
      if (!placement_ok(candidate, dist, config.min_gap)) continue;

      for (size_t p = 0; p < occupied.data.size(); ++p)
        occupied.data[p] |= candidate.data[p];
      dist = distance_to_placed(occupied);
      result.scene.instances.push_back(std::move(candidate));
      placed = true;
    }
  }
  return result;
}

SynthResult adjacency_pair(const SynthConfig& config) {
  require(config.gap_min >= 0 && config.gap_max >= config.gap_min,
          ErrorCode::InvalidArgument, "bad gap range");
  Rng rng(config.seed);
  SynthResult result;
  result.scene.height = config.height;
  result.scene.width = config.width;
  result.requested = 2;

  ShapeKind kind = config.shapes[size_t(rng.index(config.shapes.size()))];
  int gap = int(rng.range(config.gap_min, config.gap_max));
  bool horizontal = rng.u01() < 0.5;

  // Both shapes share one extent; the paired axis must fit twice plus gap.
  int along_cap = horizontal ? config.width : config.height;
  int cross_cap = horizontal ? config.height : config.width;
  int max_along = std::min(config.max_size, (along_cap - gap) / 2);
  if (kind == ShapeKind::Disk) max_along = std::min(max_along, cross_cap);
  require(max_along >= config.min_size, ErrorCode::InvalidArgument,
          "scene cannot fit an adjacency pair with this size range");
  int ea = int(rng.range(config.min_size, max_along));  // extent along axis
  int ec = kind == ShapeKind::Disk
               ? ea  // congruent disks stay circular
               : int(rng.range(config.min_size,
                               std::min(config.max_size, cross_cap)));

  int span = 2 * ea + gap;
  if (horizontal) {
    int v0 = int(rng.range(0, config.width - span));
    int u0 = int(rng.range(0, config.height - ec));
    BinaryMask a(config.height, config.width);
    BinaryMask b(config.height, config.width);
    rasterize(a, kind, u0, v0, ec, ea);
    rasterize(b, kind, u0, v0 + ea + gap, ec, ea);
    result.scene.instances.push_back(std::move(a));
    result.scene.instances.push_back(std::move(b));
  } else {
    int u0 = int(rng.range(0, config.height - span));
    int v0 = int(rng.range(0, config.width - ec));
    BinaryMask a(config.height, config.width);
    BinaryMask b(config.height, config.width);
    rasterize(a, kind, u0, v0, ea, ec);
    rasterize(b, kind, u0 + ea + gap, v0, ea, ec);
    result.scene.instances.push_back(std::move(a));
    result.scene.instances.push_back(std::move(b));
  }
  return result;
}

ShapeKind shape_from_name(const std::string& name) {
  if (name == "rectangle") return ShapeKind::Rectangle;
  if (name == "disk") return ShapeKind::Disk;
  if (name == "ellipse") return ShapeKind::Ellipse;
  throw Error(ErrorCode::Parse, "unknown shape: " + name);
}

std::string shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Disk: return "disk";
    case ShapeKind::Ellipse: return "ellipse";
  }
  return "rectangle";
}

}  // namespace cbr
