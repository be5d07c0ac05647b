#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eval.hpp"
#include "labels.hpp"
#include "reasoning.hpp"
#include "scene.hpp"
#include "synth.hpp"

namespace cbr {

struct DetectionRecord {
  std::int64_t scene_id = 0;
  DetectedObject object;
};

struct LabelRecord {
  std::int64_t scene_id = 0;
  PseudoLabel label;
};

// Scene sets: {"scenes": [{"id", "height", "width", "instances": [{"rle"}]}]}
// with masks in column-major RLE, first count background.
std::string scenes_to_json(const SceneSet& scenes);
SceneSet scenes_from_json(const std::string& text);
void save_scenes(const std::string& path, const SceneSet& scenes);
SceneSet load_scenes(const std::string& path);

// Detections: {"detections": [{"scene", "box", "confidence", "existence",
// "max_center_norm", "max_boundary", "area_factor", "iterations", "mask"}]}
std::string detections_to_json(const std::vector<DetectionRecord>& records);
std::vector<DetectionRecord> detections_from_json(const std::string& text);
void save_detections(const std::string& path,
                     const std::vector<DetectionRecord>& records);
std::vector<DetectionRecord> load_detections(const std::string& path);

// Labels add a "weight" per record.
std::string labels_to_json(const std::vector<LabelRecord>& records);
std::vector<LabelRecord> labels_from_json(const std::string& text);
void save_labels(const std::string& path,
                 const std::vector<LabelRecord>& records);
std::vector<LabelRecord> load_labels(const std::string& path);

// Flat key-value config mirroring ReasoningConfig field names. Unknown keys
// are rejected (Parse).
std::string config_to_json(const ReasoningConfig& config);
ReasoningConfig config_from_json(const std::string& text);
ReasoningConfig load_config(const std::string& path);

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);
SynthConfig load_synth_config(const std::string& path);

std::string metrics_to_json(const Metrics& metrics);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cbr
