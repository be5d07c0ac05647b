#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reasoning.hpp"
#include "scene.hpp"
#include "serialize.hpp"
#include "synth.hpp"

namespace cbr {

// ---- fields ----------------------------------------------------------------

struct FieldsReport {
  double max_inside_distance = 0;  // max signed distance over the foreground
  int peak_u = 0, peak_v = 0;      // first row-major argmax
  bool recovery_ok = false;
  double recovered = 0;  // inverse boundary-gradient estimate at the peak
  std::string note;      // reason when the estimate is unavailable
};

// Computes the three representations for one mask PNG and writes
// center.cbf/boundary.cbf/signed.cbf plus PNG renderings and report.json
// under out_dir.
FieldsReport run_fields(const std::string& mask_path,
                        const std::string& out_dir);

// ---- discover --------------------------------------------------------------

enum class ProviderMode { Oracle, Replay, Record };

struct DiscoverRunOptions {
  ReasoningConfig config;
  int threads = 1;
  bool trace_png = false;
  ProviderMode mode = ProviderMode::Oracle;
  std::string recorded_dir;  // replay source or record destination
  std::string out_dir;
  std::vector<std::string> inputs;  // input descriptions for the run manifest
};

struct SceneRunSummary {
  std::int64_t id = 0;
  int detections = 0;
  int proposals_created = 0;
  bool budget_exhausted = false;
  std::vector<int> iterations;  // per converged pre-NMS proposal
};

struct DiscoverRunResult {
  std::vector<DetectionRecord> records;
  std::vector<SceneRunSummary> scenes;
  bool budget_exhausted = false;
};

// Runs discovery over every scene and writes detections.json plus
// run_manifest.json under out_dir. Record mode forces serial execution
// (single-writer recording) and fills recorded_dir/scene<id>/ per scene;
// replay mode reads the same layout back.
DiscoverRunResult run_discover(const SceneSet& scenes,
                               const DiscoverRunOptions& options);

std::string scene_record_dir(const std::string& root, std::int64_t scene_id);

// ---- synth -----------------------------------------------------------------

// count scenes with ids 0..count-1, scene i seeded with config.seed + i.
// adjacency_pairs switches to the two-object contact generator. requested_out
// (optional) reports the object count asked of each scene.
SceneSet make_scenes(const SynthConfig& config, int count,
                     bool adjacency_pairs,
                     std::vector<int>* requested_out = nullptr);

// ---- eval ------------------------------------------------------------------

// Groups detections by scene id (every id must exist in scenes) and scores
// them against the instance masks.
Metrics run_eval(const std::vector<DetectionRecord>& records,
                 const SceneSet& scenes,
                 int max_dets = 100);

// ---- render ----------------------------------------------------------------

// Writes one overlay PNG per scene: instances gray, detection masks tinted,
// detection boxes outlined.
void render_scenes(const SceneSet& scenes,
                   const std::vector<DetectionRecord>& records,
                   const std::string& out_dir);

}  // namespace cbr
