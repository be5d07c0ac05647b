#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scene.hpp"
#include "types.hpp"

namespace cbr {

// Working resolution of every crop-local field.
constexpr int kCropSize = 128;

struct FieldBundle {
  double existence = 0.0;  // in [0, 1]
  VectorField center;      // kCropSize x kCropSize x 2
  ScalarField boundary;    // kCropSize x kCropSize
};

// Answers per-box field queries at crop resolution. Implementations must be
// deterministic: identical boxes yield identical bundles.
class FieldProvider {
 public:
  virtual ~FieldProvider() = default;
  virtual FieldBundle query(const PixelBox& box) = 0;
  virtual int scene_height() const = 0;
  virtual int scene_width() const = 0;
};

// Derives ideal fields from ground-truth instance masks: instances are
// clipped to the box, resampled to crop resolution, and the representations
// are computed on the clipped masks. Overlap ownership goes to the lowest
// instance id; objects below min_pixels crop pixels are dropped.
class OracleProvider : public FieldProvider {
 public:
  explicit OracleProvider(const Scene& scene, int min_pixels = 1);

  FieldBundle query(const PixelBox& box) override;
  int scene_height() const override { return scene_.height; }
  int scene_width() const override { return scene_.width; }

 private:
  Scene scene_;
  int min_pixels_;
};

// Replays bundles recorded in a tab-separated manifest:
// u1 v1 u2 v2 existence.cbf center.cbf boundary.cbf (paths relative to the
// manifest). Throws MissingEntry for unknown boxes and CorruptFile for
// malformed payloads.
class ReplayProvider : public FieldProvider {
 public:
  ReplayProvider(int scene_height, int scene_width,
                 const std::string& manifest_path);

  FieldBundle query(const PixelBox& box) override;
  int scene_height() const override { return height_; }
  int scene_width() const override { return width_; }

 private:
  struct Entry {
    std::string existence, center, boundary;
  };
  int height_, width_;
  std::string dir_;
  std::map<std::array<int, 4>, Entry> entries_;
};

// Forwards to an inner provider while persisting each distinct query as a
// manifest entry plus three CBF1 files, so a later ReplayProvider reproduces
// the session bit-identically.
class RecordingProvider : public FieldProvider {
 public:
  RecordingProvider(FieldProvider& inner, const std::string& out_dir);

  FieldBundle query(const PixelBox& box) override;
  int scene_height() const override { return inner_.scene_height(); }
  int scene_width() const override { return inner_.scene_width(); }

 private:
  FieldProvider& inner_;
  std::string dir_;
  std::map<std::array<int, 4>, bool> seen_;
  int next_index_ = 0;
};

// Records one entry per query, duplicates included, in list order.
void record_session(FieldProvider& provider, const std::vector<PixelBox>& queries,
                    const std::string& out_dir);

std::string manifest_path_for(const std::string& out_dir);

}  // namespace cbr
