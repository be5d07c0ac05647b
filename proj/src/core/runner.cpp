#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>

#include <json.hpp>

#include "cbf.hpp"
#include "eval.hpp"
#include "field_ops.hpp"
#include "png_io.hpp"
#include "provider.hpp"

namespace cbr {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  require(!ec, ErrorCode::Io, "cannot create directory " + path);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Per-query PNG dumps; file names are unique per (proposal, iteration) so
// concurrent proposals never collide.
class PngTraceSink : public TraceSink {
 public:
  explicit PngTraceSink(std::string dir) : dir_(std::move(dir)) {
    ensure_dir(dir_);
  }

  void on_query(int proposal_id, int iteration, const PixelBox& box,
                const FieldBundle& bundle) override {
    char stem[64];
    std::snprintf(stem, sizeof stem, "p%05d_i%03d", proposal_id, iteration);
    save_scalar_png(join(dir_, std::string(stem) + "_boundary.png"),
                    bundle.boundary);
    save_vector_png(join(dir_, std::string(stem) + "_center.png"),
                    bundle.center);
    (void)box;
  }

 private:
  std::string dir_;
};

Json summary_to_json(const SceneRunSummary& s) {
  Json j;
  j["id"] = s.id;
  j["detections"] = s.detections;
  j["proposals_created"] = s.proposals_created;
  j["budget_exhausted"] = s.budget_exhausted;
  j["iterations"] = s.iterations;
  return j;
}

}  // namespace

FieldsReport run_fields(const std::string& mask_path,
                        const std::string& out_dir) {
  BinaryMask mask = load_mask_png(mask_path);
  require(mask.count() > 0, ErrorCode::EmptyMask,
          "mask has no foreground: " + mask_path);

  ScalarField signed_field = signed_distance(mask);
  VectorField center = center_field(mask);
  ScalarField boundary = boundary_field(mask);

  ensure_dir(out_dir);
  write_cbf(join(out_dir, "signed.cbf"), to_raw(signed_field));
  write_cbf(join(out_dir, "center.cbf"), to_raw(center));
  write_cbf(join(out_dir, "boundary.cbf"), to_raw(boundary));

  // Signed distances exceed [-1,1]; rescale for display only.
  double max_abs = 0;
  for (float v : signed_field.data) max_abs = std::max(max_abs, std::fabs(double(v)));
  ScalarField display = signed_field;
  if (max_abs > 0) {
    for (float& v : display.data) v = float(v / max_abs);
  }
  save_scalar_png(join(out_dir, "signed.png"), display);
  save_vector_png(join(out_dir, "center.png"), center);
  save_scalar_png(join(out_dir, "boundary.png"), boundary);

  FieldsReport report;
  for (int u = 0; u < mask.height; ++u) {
    for (int v = 0; v < mask.width; ++v) {
      if (mask.at(u, v) &&
          double(signed_field.at(u, v)) > report.max_inside_distance) {
        report.max_inside_distance = signed_field.at(u, v);
        report.peak_u = u;
        report.peak_v = v;
      }
    }
  }
  try {
    report.recovered = recover_max_distance(boundary, report.peak_u,
                                            report.peak_v);
    report.recovery_ok = true;
  } catch (const Error& e) {
    report.note = e.what();
  }

  Json j;
  j["max_inside_distance"] = report.max_inside_distance;
  j["peak"] = Json::array({report.peak_u, report.peak_v});
  j["recovery_ok"] = report.recovery_ok;
  if (report.recovery_ok) {
    j["recovered_max_distance"] = report.recovered;
  } else {
    j["recovery_note"] = report.note;
  }
  write_text_file(join(out_dir, "report.json"), j.dump(2) + "\n");
  return report;
}

std::string scene_record_dir(const std::string& root, std::int64_t scene_id) {
  char name[32];
  std::snprintf(name, sizeof name, "scene%06lld",
                static_cast<long long>(scene_id));
  return join(root, name);
}

DiscoverRunResult run_discover(const SceneSet& scenes,
                               const DiscoverRunOptions& options) {
  require(!options.out_dir.empty(), ErrorCode::InvalidArgument,
          "out_dir is required");
  if (options.mode != ProviderMode::Oracle) {
    require(!options.recorded_dir.empty(), ErrorCode::InvalidArgument,
            "recorded_dir is required for replay/record runs");
  }
  ensure_dir(options.out_dir);

  // Recording is single-writer; serialize it so manifests come out in query
  // order.
  int threads = options.mode == ProviderMode::Record ? 1 : options.threads;

  DiscoverRunResult result;
  for (const Scene& scene : scenes) {
    std::unique_ptr<FieldProvider> provider;
    std::unique_ptr<OracleProvider> oracle;
    switch (options.mode) {
      case ProviderMode::Oracle:
        provider = std::make_unique<OracleProvider>(scene);
        break;
      case ProviderMode::Replay:
        provider = std::make_unique<ReplayProvider>(
            scene.height, scene.width,
            manifest_path_for(scene_record_dir(options.recorded_dir,
                                               scene.id)));
        break;
      case ProviderMode::Record: {
        std::string dir = scene_record_dir(options.recorded_dir, scene.id);
        ensure_dir(dir);
        oracle = std::make_unique<OracleProvider>(scene);
        provider = std::make_unique<RecordingProvider>(*oracle, dir);
        break;
      }
    }

    std::unique_ptr<PngTraceSink> sink;
    if (options.trace_png) {
      sink = std::make_unique<PngTraceSink>(
          join(join(options.out_dir, "trace"),
               fs::path(scene_record_dir("", scene.id)).filename().string()));
    }

    DiscoverResult scene_result =
        discover(*provider, options.config, threads, sink.get());

    SceneRunSummary summary;
    summary.id = scene.id;
    summary.detections = int(scene_result.detections.size());
    summary.proposals_created = scene_result.proposals_created;
    summary.budget_exhausted = scene_result.budget_exhausted;
    summary.iterations = scene_result.converged_iterations;
    result.budget_exhausted |= scene_result.budget_exhausted;
    result.scenes.push_back(std::move(summary));

    for (DetectedObject& object : scene_result.detections) {
      result.records.push_back(DetectionRecord{scene.id, std::move(object)});
    }
  }

  save_detections(join(options.out_dir, "detections.json"), result.records);

  Json manifest;
  manifest["seed"] = options.config.seed;
  manifest["threads"] = options.threads;
  switch (options.mode) {
    case ProviderMode::Oracle: manifest["provider"] = "oracle"; break;
    case ProviderMode::Replay: manifest["provider"] = "replay"; break;
    case ProviderMode::Record: manifest["provider"] = "record"; break;
  }
  manifest["config"] = Json::parse(config_to_json(options.config));
  manifest["inputs"] = options.inputs;
  manifest["outputs"] = Json::array({"detections.json"});
  manifest["budget_exhausted"] = result.budget_exhausted;
  Json scene_list = Json::array();
  for (const SceneRunSummary& s : result.scenes) {
    scene_list.push_back(summary_to_json(s));
  }
  manifest["scenes"] = std::move(scene_list);
  write_text_file(join(options.out_dir, "run_manifest.json"),
                  manifest.dump(2) + "\n");
  return result;
}

SceneSet make_scenes(const SynthConfig& config, int count,
                     bool adjacency_pairs, std::vector<int>* requested_out) {
  require(count >= 0, ErrorCode::InvalidArgument, "count must be >= 0");
  SceneSet scenes;
  if (requested_out) requested_out->clear();
  for (int i = 0; i < count; ++i) {
    SynthConfig per_scene = config;
    per_scene.seed = config.seed + std::uint64_t(i);
    SynthResult generated =
        adjacency_pairs ? adjacency_pair(per_scene) : generate(per_scene);
    generated.scene.id = i;
    if (requested_out) requested_out->push_back(generated.requested);
    scenes.push_back(std::move(generated.scene));
  }
  return scenes;
}

Metrics run_eval(const std::vector<DetectionRecord>& records,
                 const SceneSet& scenes, int max_dets) {
  std::map<std::int64_t, size_t> index;
  for (size_t i = 0; i < scenes.size(); ++i) {
    require(index.emplace(scenes[i].id, i).second, ErrorCode::InvalidArgument,
            "duplicate scene id in ground truth");
  }

  std::vector<std::vector<EvalDetection>> detections(scenes.size());
  for (const DetectionRecord& record : records) {
    auto it = index.find(record.scene_id);
    require(it != index.end(), ErrorCode::InvalidArgument,
            "detection references unknown scene id " +
                std::to_string(record.scene_id));
    EvalDetection det;
    det.box = record.object.box;
    det.mask = record.object.mask;
    det.confidence = record.object.conf;
    detections[it->second].push_back(std::move(det));
  }

  std::vector<std::vector<EvalInstance>> ground_truth(scenes.size());
  for (size_t i = 0; i < scenes.size(); ++i) {
    for (const BinaryMask& mask : scenes[i].instances) {
      if (mask.count() == 0) continue;
      EvalInstance inst;
      inst.box = tightest_bbox(mask);
      inst.mask = mask;
      ground_truth[i].push_back(std::move(inst));
    }
  }

  return evaluate(detections, ground_truth, default_iou_thresholds(),
                  max_dets);
}

void render_scenes(const SceneSet& scenes,
                   const std::vector<DetectionRecord>& records,
                   const std::string& out_dir) {
  ensure_dir(out_dir);
  static const std::uint8_t palette[6][3] = {
      {230, 80, 80},  {80, 200, 90},   {90, 120, 240},
      {230, 200, 60}, {200, 90, 220},  {70, 210, 210}};

  for (const Scene& scene : scenes) {
    std::vector<std::uint8_t> canvas(size_t(scene.height) * scene.width * 3,
                                     0);
    auto px = [&](int u, int v) {
      return canvas.data() + (size_t(u) * scene.width + v) * 3;
    };
    for (const BinaryMask& mask : scene.instances) {
      for (int u = 0; u < scene.height; ++u) {
        for (int v = 0; v < scene.width; ++v) {
          if (mask.at(u, v)) {
            std::uint8_t* p = px(u, v);
            p[0] = p[1] = p[2] = 90;
          }
        }
      }
    }
    int color_index = 0;
    for (const DetectionRecord& record : records) {
      if (record.scene_id != scene.id) continue;
      const std::uint8_t* color = palette[color_index % 6];
      ++color_index;
      const BinaryMask& mask = record.object.mask;
      if (mask.height == scene.height && mask.width == scene.width) {
        for (int u = 0; u < scene.height; ++u) {
          for (int v = 0; v < scene.width; ++v) {
            if (mask.at(u, v)) {
              std::uint8_t* p = px(u, v);
              for (int c = 0; c < 3; ++c) {
                p[c] = std::uint8_t((p[c] + color[c]) / 2);
              }
            }
          }
        }
      }
      PixelBox box = record.object.box;
      int u1 = std::clamp(box.u1, 0, scene.height - 1);
      int u2 = std::clamp(box.u2, 0, scene.height - 1);
      int v1 = std::clamp(box.v1, 0, scene.width - 1);
      int v2 = std::clamp(box.v2, 0, scene.width - 1);
      for (int v = v1; v <= v2; ++v) {
        std::copy(color, color + 3, px(u1, v));
        std::copy(color, color + 3, px(u2, v));
      }
      for (int u = u1; u <= u2; ++u) {
        std::copy(color, color + 3, px(u, v1));
        std::copy(color, color + 3, px(u, v2));
      }
    }

    char name[32];
    std::snprintf(name, sizeof name, "scene%06lld.png",
                  static_cast<long long>(scene.id));
    save_rgb_png(join(out_dir, name), scene.height, scene.width, canvas);
  }
}

}  // namespace cbr
