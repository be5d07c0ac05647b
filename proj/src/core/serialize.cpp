#include "serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rle.hpp"

namespace cbr {
namespace {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad json: ") + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  require(it != j.end(), ErrorCode::Parse,
          std::string("missing key '") + key + "'");
  return *it;
}

template <typename T>
T as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Parse, std::string("bad value for '") + key + "'");
  }
}

Json mask_to_json(const BinaryMask& mask) {
  Json j;
  j["height"] = mask.height;
  j["width"] = mask.width;
  // Box-only records carry a 0x0 mask; encode it as an empty run list.
  j["rle"] = mask.height > 0 && mask.width > 0 ? rle_encode(mask)
                                               : std::vector<std::int64_t>{};
  return j;
}

BinaryMask mask_from_json(const Json& j) {
  int height = as<int>(j, "height");
  int width = as<int>(j, "width");
  auto counts = as<std::vector<std::int64_t>>(j, "rle");
  if (height == 0 && width == 0) {
    require(counts.empty(), ErrorCode::Parse, "0x0 mask with nonempty runs");
    return BinaryMask{};
  }
  return rle_decode(height, width, counts);
}

Json box_to_json(const PixelBox& box) {
  return Json::array({box.u1, box.v1, box.u2, box.v2});
}

PixelBox box_from_json(const Json& j) {
  require(j.is_array() && j.size() == 4, ErrorCode::Parse,
          "box must be [u1, v1, u2, v2]");
  PixelBox box;
  try {
    box.u1 = j[0].get<int>();
    box.v1 = j[1].get<int>();
    box.u2 = j[2].get<int>();
    box.v2 = j[3].get<int>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Parse, "box coordinates must be integers");
  }
  return box;
}

Json object_to_json(std::int64_t scene_id, const DetectedObject& object) {
  Json j;
  j["scene"] = scene_id;
  j["box"] = box_to_json(object.box);
  j["confidence"] = object.conf;
  j["existence"] = object.parts.existence;
  j["max_center_norm"] = object.parts.max_center_norm;
  j["max_boundary"] = object.parts.max_boundary;
  j["area_factor"] = object.parts.area_factor;
  j["iterations"] = object.iterations;
  j["mask"] = mask_to_json(object.mask);
  return j;
}

DetectionRecord object_from_json(const Json& j) {
  DetectionRecord record;
  record.scene_id = as<std::int64_t>(j, "scene");
  record.object.box = box_from_json(field(j, "box"));
  record.object.conf = as<double>(j, "confidence");
  record.object.parts.existence = as<double>(j, "existence");
  record.object.parts.max_center_norm = as<double>(j, "max_center_norm");
  record.object.parts.max_boundary = as<double>(j, "max_boundary");
  record.object.parts.area_factor = as<double>(j, "area_factor");
  record.object.iterations = as<int>(j, "iterations");
  record.object.mask = mask_from_json(field(j, "mask"));
  return record;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string scenes_to_json(const SceneSet& scenes) {
  Json list = Json::array();
  for (const Scene& scene : scenes) {
    Json s;
    s["id"] = scene.id;
    s["height"] = scene.height;
    s["width"] = scene.width;
    Json instances = Json::array();
    for (const BinaryMask& mask : scene.instances) {
      Json inst;
      inst["rle"] = rle_encode(mask);
      instances.push_back(std::move(inst));
    }
    s["instances"] = std::move(instances);
    list.push_back(std::move(s));
  }
  Json root;
  root["scenes"] = std::move(list);
  return dump(root);
}

SceneSet scenes_from_json(const std::string& text) {
  Json root = parse_json(text);
  const Json& list = field(root, "scenes");
  require(list.is_array(), ErrorCode::Parse, "'scenes' must be an array");
  SceneSet scenes;
  for (const Json& s : list) {
    Scene scene;
    scene.id = as<std::int64_t>(s, "id");
    scene.height = as<int>(s, "height");
    scene.width = as<int>(s, "width");
    require(scene.height > 0 && scene.width > 0, ErrorCode::Parse,
            "scene extent must be positive");
    const Json& instances = field(s, "instances");
    require(instances.is_array(), ErrorCode::Parse,
            "'instances' must be an array");
    for (const Json& inst : instances) {
      auto counts = as<std::vector<std::int64_t>>(inst, "rle");
      scene.instances.push_back(
          rle_decode(scene.height, scene.width, counts));
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

void save_scenes(const std::string& path, const SceneSet& scenes) {
  write_text_file(path, scenes_to_json(scenes));
}

SceneSet load_scenes(const std::string& path) {
  return scenes_from_json(read_text_file(path));
}

std::string detections_to_json(const std::vector<DetectionRecord>& records) {
  Json list = Json::array();
  for (const DetectionRecord& record : records) {
    list.push_back(object_to_json(record.scene_id, record.object));
  }
  Json root;
  root["detections"] = std::move(list);
  return dump(root);
}

std::vector<DetectionRecord> detections_from_json(const std::string& text) {
  Json root = parse_json(text);
  const Json& list = field(root, "detections");
  require(list.is_array(), ErrorCode::Parse, "'detections' must be an array");
  std::vector<DetectionRecord> records;
  for (const Json& j : list) records.push_back(object_from_json(j));
  return records;
}

void save_detections(const std::string& path,
                     const std::vector<DetectionRecord>& records) {
  write_text_file(path, detections_to_json(records));
}

std::vector<DetectionRecord> load_detections(const std::string& path) {
  return detections_from_json(read_text_file(path));
}

std::string labels_to_json(const std::vector<LabelRecord>& records) {
  Json list = Json::array();
  for (const LabelRecord& record : records) {
    Json j = object_to_json(record.scene_id, record.label.object);
    j["weight"] = record.label.weight;
    list.push_back(std::move(j));
  }
  Json root;
  root["labels"] = std::move(list);
  return dump(root);
}

std::vector<LabelRecord> labels_from_json(const std::string& text) {
  Json root = parse_json(text);
  const Json& list = field(root, "labels");
  require(list.is_array(), ErrorCode::Parse, "'labels' must be an array");
  std::vector<LabelRecord> records;
  for (const Json& j : list) {
    DetectionRecord base = object_from_json(j);
    LabelRecord record;
    record.scene_id = base.scene_id;
    record.label.object = std::move(base.object);
    record.label.weight = as<double>(j, "weight");
    records.push_back(std::move(record));
  }
  return records;
}

void save_labels(const std::string& path,
                 const std::vector<LabelRecord>& records) {
  write_text_file(path, labels_to_json(records));
}

std::vector<LabelRecord> load_labels(const std::string& path) {
  return labels_from_json(read_text_file(path));
}

std::string config_to_json(const ReasoningConfig& config) {
  Json j;
  j["scales"] = config.scales;
  j["aspect_ratios"] = config.aspect_ratios;
  j["tau_e"] = config.tau_e;
  j["tau_c"] = config.tau_c;
  j["tau_adjust"] = config.tau_adjust;
  j["shrink_margin"] = config.shrink_margin;
  j["max_iterations"] = config.max_iterations;
  j["nms_iou"] = config.nms_iou;
  j["seed"] = config.seed;
  return dump(j);
}

ReasoningConfig config_from_json(const std::string& text) {
  Json j = parse_json(text);
  require(j.is_object(), ErrorCode::Parse, "config must be an object");
  static const std::set<std::string> known = {
      "scales",        "aspect_ratios", "tau_e",
      "tau_c",         "tau_adjust",    "shrink_margin",
      "max_iterations", "nms_iou",      "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(known.count(it.key()) != 0, ErrorCode::Parse,
            "unknown config key '" + it.key() + "'");
  }
  ReasoningConfig config;
  if (j.contains("scales")) config.scales = as<std::vector<int>>(j, "scales");
  if (j.contains("aspect_ratios")) {
    config.aspect_ratios = as<std::vector<double>>(j, "aspect_ratios");
  }
  if (j.contains("tau_e")) config.tau_e = as<double>(j, "tau_e");
  if (j.contains("tau_c")) config.tau_c = as<double>(j, "tau_c");
  if (j.contains("tau_adjust")) config.tau_adjust = as<double>(j, "tau_adjust");
  if (j.contains("shrink_margin")) {
    config.shrink_margin = as<double>(j, "shrink_margin");
  }
  if (j.contains("max_iterations")) {
    config.max_iterations = as<int>(j, "max_iterations");
  }
  if (j.contains("nms_iou")) config.nms_iou = as<double>(j, "nms_iou");
  if (j.contains("seed")) config.seed = as<std::uint64_t>(j, "seed");
  require(!config.scales.empty(), ErrorCode::Parse, "scales must be nonempty");
  require(!config.aspect_ratios.empty(), ErrorCode::Parse,
          "aspect_ratios must be nonempty");
  for (int s : config.scales) {
    require(s >= 2, ErrorCode::Parse, "scales must be >= 2");
  }
  for (double r : config.aspect_ratios) {
    require(r > 0, ErrorCode::Parse, "aspect ratios must be positive");
  }
  require(config.max_iterations > 0, ErrorCode::Parse,
          "max_iterations must be positive");
  return config;
}

ReasoningConfig load_config(const std::string& path) {
  return config_from_json(read_text_file(path));
}

std::string synth_config_to_json(const SynthConfig& config) {
  Json j;
  j["height"] = config.height;
  j["width"] = config.width;
  j["min_objects"] = config.min_objects;
  j["max_objects"] = config.max_objects;
  std::vector<std::string> names;
  for (ShapeKind kind : config.shapes) names.push_back(shape_name(kind));
  j["shapes"] = names;
  j["min_size"] = config.min_size;
  j["max_size"] = config.max_size;
  j["min_gap"] = config.min_gap;
  j["gap_min"] = config.gap_min;
  j["gap_max"] = config.gap_max;
  j["seed"] = config.seed;
  return dump(j);
}

SynthConfig synth_config_from_json(const std::string& text) {
  Json j = parse_json(text);
  require(j.is_object(), ErrorCode::Parse, "synth config must be an object");
  static const std::set<std::string> known = {
      "height",  "width",   "min_objects", "max_objects", "shapes",
      "min_size", "max_size", "min_gap",    "gap_min",     "gap_max",
      "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(known.count(it.key()) != 0, ErrorCode::Parse,
            "unknown synth config key '" + it.key() + "'");
  }
  SynthConfig config;
  if (j.contains("height")) config.height = as<int>(j, "height");
  if (j.contains("width")) config.width = as<int>(j, "width");
  if (j.contains("min_objects")) {
    config.min_objects = as<int>(j, "min_objects");
  }
  if (j.contains("max_objects")) {
    config.max_objects = as<int>(j, "max_objects");
  }
  if (j.contains("shapes")) {
    auto names = as<std::vector<std::string>>(j, "shapes");
    config.shapes.clear();
    for (const std::string& name : names) {
      config.shapes.push_back(shape_from_name(name));
    }
  }
  if (j.contains("min_size")) config.min_size = as<int>(j, "min_size");
  if (j.contains("max_size")) config.max_size = as<int>(j, "max_size");
  if (j.contains("min_gap")) config.min_gap = as<double>(j, "min_gap");
  if (j.contains("gap_min")) config.gap_min = as<int>(j, "gap_min");
  if (j.contains("gap_max")) config.gap_max = as<int>(j, "gap_max");
  if (j.contains("seed")) config.seed = as<std::uint64_t>(j, "seed");
  require(config.height >= 2 && config.width >= 2, ErrorCode::Parse,
          "scene extent must be at least 2x2");
  require(config.min_objects >= 0 && config.max_objects >= config.min_objects,
          ErrorCode::Parse, "object count range is inverted");
  require(!config.shapes.empty(), ErrorCode::Parse, "shapes must be nonempty");
  require(config.min_size >= 2 && config.max_size >= config.min_size,
          ErrorCode::Parse, "size range is invalid");
  require(config.gap_min >= 0 && config.gap_max >= config.gap_min,
          ErrorCode::Parse, "gap range is invalid");
  return config;
}

SynthConfig load_synth_config(const std::string& path) {
  return synth_config_from_json(read_text_file(path));
}

std::string metrics_to_json(const Metrics& metrics) {
  Json j = Json::object();
  for (const auto& [key, value] : metrics) j[key] = value;
  return dump(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  require(!in.bad(), ErrorCode::Io, "read failed for " + path);
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  require(out.good(), ErrorCode::Io, "write failed for " + path);
}

}  // namespace cbr
