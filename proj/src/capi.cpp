#include "cbreason/cbreason.h"

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/cbf.hpp"
#include "core/eval.hpp"
#include "core/field_ops.hpp"
#include "core/labels.hpp"
#include "core/png_io.hpp"
#include "core/provider.hpp"
#include "core/reasoning.hpp"
#include "core/rle.hpp"
#include "core/runner.hpp"
#include "core/serialize.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

struct cbr_mask {
  cbr::BinaryMask m;
};
struct cbr_field {
  cbr::RawField f;
};
struct cbr_scene_set {
  cbr::SceneSet s;
};
struct cbr_config {
  cbr::ReasoningConfig c;
};
struct cbr_provider {
  std::unique_ptr<cbr::OracleProvider> oracle_keepalive;
  std::unique_ptr<cbr::FieldProvider> p;
};
struct cbr_detections {
  std::vector<cbr::DetectionRecord> d;
};
struct cbr_labels {
  std::vector<cbr::LabelRecord> l;
};

namespace {

thread_local std::string g_last_error = "no error";

cbr_status map_code(cbr::ErrorCode code) {
  // ErrorCode enumerators and cbr_status values share one ordering with a
  // +1 offset for CBR_OK.
  return cbr_status(int(code) + 1);
}

template <typename Fn>
cbr_status wrap(Fn&& fn) {
  try {
    fn();
    return CBR_OK;
  } catch (const cbr::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CBR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CBR_ERR_INTERNAL;
  }
}

void check(bool ok, const char* what) {
  cbr::require(ok, cbr::ErrorCode::InvalidArgument, what);
}

void check_handle(const void* handle, const char* what) {
  check(handle != nullptr, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cbr::PixelBox box_from(int u1, int v1, int u2, int v2) {
  cbr::PixelBox box;
  box.u1 = u1;
  box.v1 = v1;
  box.u2 = u2;
  box.v2 = v2;
  return box;
}

const cbr::Scene& scene_at(const cbr_scene_set* scenes, int64_t index) {
  check_handle(scenes, "scene set handle is null");
  check(index >= 0 && size_t(index) < scenes->s.size(),
        "scene index out of range");
  return scenes->s[size_t(index)];
}

const cbr::DetectionRecord& record_at(const cbr_detections* dets,
                                      int64_t index) {
  check_handle(dets, "detections handle is null");
  check(index >= 0 && size_t(index) < dets->d.size(),
        "detection index out of range");
  return dets->d[size_t(index)];
}

const cbr::LabelRecord& label_at(const cbr_labels* labels, int64_t index) {
  check_handle(labels, "labels handle is null");
  check(index >= 0 && size_t(index) < labels->l.size(),
        "label index out of range");
  return labels->l[size_t(index)];
}

cbr::ProviderMode mode_from(cbr_provider_mode mode) {
  switch (mode) {
    case CBR_PROVIDER_ORACLE: return cbr::ProviderMode::Oracle;
    case CBR_PROVIDER_REPLAY: return cbr::ProviderMode::Replay;
    case CBR_PROVIDER_RECORD: return cbr::ProviderMode::Record;
  }
  cbr::require(false, cbr::ErrorCode::InvalidArgument,
               "unknown provider mode");
  return cbr::ProviderMode::Oracle;
}

}  // namespace

extern "C" {

const char* cbr_version(void) { return "1.0.0"; }

const char* cbr_last_error(void) { return g_last_error.c_str(); }

void cbr_string_free(char* s) { delete[] s; }

/* ---- masks ---- */

cbr_status cbr_mask_create(int height, int width, const uint8_t* data,
                           cbr_mask** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    check(height > 0 && width > 0, "mask extent must be positive");
    auto mask = std::make_unique<cbr_mask>();
    mask->m = cbr::BinaryMask(height, width);
    if (data) {
      for (size_t i = 0; i < mask->m.data.size(); ++i) {
        mask->m.data[i] = data[i] ? 1 : 0;
      }
    }
    *out = mask.release();
  });
}

void cbr_mask_destroy(cbr_mask* mask) { delete mask; }

int cbr_mask_height(const cbr_mask* mask) { return mask ? mask->m.height : 0; }

int cbr_mask_width(const cbr_mask* mask) { return mask ? mask->m.width : 0; }

cbr_status cbr_mask_copy_data(const cbr_mask* mask, uint8_t* out) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(out, "out pointer is null");
    std::copy(mask->m.data.begin(), mask->m.data.end(), out);
  });
}

cbr_status cbr_mask_load_png(const char* path, cbr_mask** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto mask = std::make_unique<cbr_mask>();
    mask->m = cbr::load_mask_png(path);
    *out = mask.release();
  });
}

cbr_status cbr_mask_save_png(const cbr_mask* mask, const char* path) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(path, "path is null");
    cbr::save_mask_png(path, mask->m);
  });
}

/* ---- fields ---- */

void cbr_field_destroy(cbr_field* field) { delete field; }

int cbr_field_height(const cbr_field* field) {
  return field ? field->f.height : 0;
}

int cbr_field_width(const cbr_field* field) {
  return field ? field->f.width : 0;
}

int cbr_field_channels(const cbr_field* field) {
  return field ? field->f.channels : 0;
}

cbr_status cbr_field_copy_data(const cbr_field* field, float* out) {
  return wrap([&] {
    check_handle(field, "field handle is null");
    check_handle(out, "out pointer is null");
    std::copy(field->f.data.begin(), field->f.data.end(), out);
  });
}

cbr_status cbr_distance_to_zero(const cbr_mask* mask, cbr_field** out) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(out, "out pointer is null");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::to_raw(cbr::distance_to_zero(mask->m));
    *out = field.release();
  });
}

cbr_status cbr_signed_distance(const cbr_mask* mask, cbr_field** out) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(out, "out pointer is null");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::to_raw(cbr::signed_distance(mask->m));
    *out = field.release();
  });
}

cbr_status cbr_center_field(const cbr_mask* mask, cbr_field** out) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(out, "out pointer is null");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::to_raw(cbr::center_field(mask->m));
    *out = field.release();
  });
}

cbr_status cbr_boundary_field(const cbr_mask* mask, cbr_field** out) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    check_handle(out, "out pointer is null");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::to_raw(cbr::boundary_field(mask->m));
    *out = field.release();
  });
}

cbr_status cbr_recover_max_distance(const cbr_field* boundary, int u, int v,
                                    double* out) {
  return wrap([&] {
    check_handle(boundary, "field handle is null");
    check_handle(out, "out pointer is null");
    check(boundary->f.channels == 1, "boundary field must have 1 channel");
    *out = cbr::recover_max_distance(cbr::to_scalar(boundary->f), u, v);
  });
}

cbr_status cbr_anti_center_map(const cbr_field* center, cbr_field** out) {
  return wrap([&] {
    check_handle(center, "field handle is null");
    check_handle(out, "out pointer is null");
    check(center->f.channels == 2, "center field must have 2 channels");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::to_raw(cbr::anti_center_map(cbr::to_vector(center->f)));
    *out = field.release();
  });
}

cbr_status cbr_field_save_cbf(const cbr_field* field, const char* path) {
  return wrap([&] {
    check_handle(field, "field handle is null");
    check_handle(path, "path is null");
    cbr::write_cbf(path, field->f);
  });
}

cbr_status cbr_field_load_cbf(const char* path, cbr_field** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto field = std::make_unique<cbr_field>();
    field->f = cbr::read_cbf(path);
    *out = field.release();
  });
}

cbr_status cbr_field_save_png(const cbr_field* field, const char* path) {
  return wrap([&] {
    check_handle(field, "field handle is null");
    check_handle(path, "path is null");
    if (field->f.channels == 1) {
      cbr::save_scalar_png(path, cbr::to_scalar(field->f));
    } else if (field->f.channels == 2) {
      cbr::save_vector_png(path, cbr::to_vector(field->f));
    } else {
      check(false, "png rendering needs a 1- or 2-channel field");
    }
  });
}

/* ---- scene sets ---- */

cbr_status cbr_scene_set_create(cbr_scene_set** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = new cbr_scene_set();
  });
}

void cbr_scene_set_destroy(cbr_scene_set* scenes) { delete scenes; }

cbr_status cbr_scene_set_load(const char* path, cbr_scene_set** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto scenes = std::make_unique<cbr_scene_set>();
    scenes->s = cbr::load_scenes(path);
    *out = scenes.release();
  });
}

cbr_status cbr_scene_set_save(const cbr_scene_set* scenes, const char* path) {
  return wrap([&] {
    check_handle(scenes, "scene set handle is null");
    check_handle(path, "path is null");
    cbr::save_scenes(path, scenes->s);
  });
}

int64_t cbr_scene_set_count(const cbr_scene_set* scenes) {
  return scenes ? int64_t(scenes->s.size()) : 0;
}

cbr_status cbr_scene_set_add(cbr_scene_set* scenes, int64_t id, int height,
                             int width) {
  return wrap([&] {
    check_handle(scenes, "scene set handle is null");
    check(height > 0 && width > 0, "scene extent must be positive");
    for (const cbr::Scene& scene : scenes->s) {
      check(scene.id != id, "duplicate scene id");
    }
    cbr::Scene scene;
    scene.id = id;
    scene.height = height;
    scene.width = width;
    scenes->s.push_back(std::move(scene));
  });
}

cbr_status cbr_scene_add_instance(cbr_scene_set* scenes, int64_t scene_index,
                                  const cbr_mask* mask) {
  return wrap([&] {
    check_handle(mask, "mask handle is null");
    const cbr::Scene& scene = scene_at(scenes, scene_index);
    check(mask->m.height == scene.height && mask->m.width == scene.width,
          "instance mask must match the scene extent");
    scenes->s[size_t(scene_index)].instances.push_back(mask->m);
  });
}

cbr_status cbr_scene_id(const cbr_scene_set* scenes, int64_t scene_index,
                        int64_t* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = scene_at(scenes, scene_index).id;
  });
}

cbr_status cbr_scene_extent(const cbr_scene_set* scenes, int64_t scene_index,
                            int* height, int* width) {
  return wrap([&] {
    const cbr::Scene& scene = scene_at(scenes, scene_index);
    if (height) *height = scene.height;
    if (width) *width = scene.width;
  });
}

cbr_status cbr_scene_instance_count(const cbr_scene_set* scenes,
                                    int64_t scene_index, int64_t* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = int64_t(scene_at(scenes, scene_index).instances.size());
  });
}

cbr_status cbr_scene_instance(const cbr_scene_set* scenes,
                              int64_t scene_index, int64_t instance_index,
                              cbr_mask** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    const cbr::Scene& scene = scene_at(scenes, scene_index);
    check(instance_index >= 0 &&
              size_t(instance_index) < scene.instances.size(),
          "instance index out of range");
    auto mask = std::make_unique<cbr_mask>();
    mask->m = scene.instances[size_t(instance_index)];
    *out = mask.release();
  });
}

cbr_status cbr_scene_set_synth(const char* config_json, int count,
                               int adjacency_pairs,
                               const uint64_t* seed_override,
                               cbr_scene_set** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    check(count >= 0, "count must be >= 0");
    cbr::SynthConfig config;
    if (config_json && *config_json) {
      config = cbr::synth_config_from_json(config_json);
    }
    if (seed_override) config.seed = *seed_override;
    auto scenes = std::make_unique<cbr_scene_set>();
    scenes->s = cbr::make_scenes(config, count, adjacency_pairs != 0);
    *out = scenes.release();
  });
}

/* ---- config ---- */

cbr_status cbr_config_create(cbr_config** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = new cbr_config();
  });
}

void cbr_config_destroy(cbr_config* config) { delete config; }

cbr_status cbr_config_from_json(const char* json, cbr_config** out) {
  return wrap([&] {
    check_handle(json, "json is null");
    check_handle(out, "out pointer is null");
    auto config = std::make_unique<cbr_config>();
    config->c = cbr::config_from_json(json);
    *out = config.release();
  });
}

cbr_status cbr_config_load(const char* path, cbr_config** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto config = std::make_unique<cbr_config>();
    config->c = cbr::load_config(path);
    *out = config.release();
  });
}

cbr_status cbr_config_to_json(const cbr_config* config, char** out) {
  return wrap([&] {
    check_handle(config, "config handle is null");
    check_handle(out, "out pointer is null");
    *out = dup_string(cbr::config_to_json(config->c));
  });
}

cbr_status cbr_config_set_seed(cbr_config* config, uint64_t seed) {
  return wrap([&] {
    check_handle(config, "config handle is null");
    config->c.seed = seed;
  });
}

/* ---- providers ---- */

cbr_status cbr_provider_oracle(const cbr_scene_set* scenes,
                               int64_t scene_index, int min_pixels,
                               cbr_provider** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    const cbr::Scene& scene = scene_at(scenes, scene_index);
    auto provider = std::make_unique<cbr_provider>();
    provider->p = std::make_unique<cbr::OracleProvider>(scene, min_pixels);
    *out = provider.release();
  });
}

cbr_status cbr_provider_replay(int scene_height, int scene_width,
                               const char* manifest_path,
                               cbr_provider** out) {
  return wrap([&] {
    check_handle(manifest_path, "manifest path is null");
    check_handle(out, "out pointer is null");
    auto provider = std::make_unique<cbr_provider>();
    provider->p = std::make_unique<cbr::ReplayProvider>(
        scene_height, scene_width, manifest_path);
    *out = provider.release();
  });
}

cbr_status cbr_provider_recording(cbr_provider* inner, const char* out_dir,
                                  cbr_provider** out) {
  return wrap([&] {
    check_handle(inner, "inner provider handle is null");
    check_handle(out_dir, "out_dir is null");
    check_handle(out, "out pointer is null");
    auto provider = std::make_unique<cbr_provider>();
    provider->p =
        std::make_unique<cbr::RecordingProvider>(*inner->p, out_dir);
    *out = provider.release();
  });
}

void cbr_provider_destroy(cbr_provider* provider) { delete provider; }

cbr_status cbr_provider_scene_extent(const cbr_provider* provider,
                                     int* height, int* width) {
  return wrap([&] {
    check_handle(provider, "provider handle is null");
    if (height) *height = provider->p->scene_height();
    if (width) *width = provider->p->scene_width();
  });
}

cbr_status cbr_provider_query(cbr_provider* provider, int u1, int v1, int u2,
                              int v2, double* existence, cbr_field** center,
                              cbr_field** boundary) {
  return wrap([&] {
    check_handle(provider, "provider handle is null");
    cbr::FieldBundle bundle = provider->p->query(box_from(u1, v1, u2, v2));
    if (existence) *existence = bundle.existence;
    if (center) {
      auto field = std::make_unique<cbr_field>();
      field->f = cbr::to_raw(bundle.center);
      *center = field.release();
    }
    if (boundary) {
      auto field = std::make_unique<cbr_field>();
      field->f = cbr::to_raw(bundle.boundary);
      *boundary = field.release();
    }
  });
}

cbr_status cbr_record_session(cbr_provider* provider, const int* boxes,
                              int64_t count, const char* out_dir) {
  return wrap([&] {
    check_handle(provider, "provider handle is null");
    check(boxes != nullptr || count == 0, "boxes is null");
    check(count >= 0, "count must be >= 0");
    check_handle(out_dir, "out_dir is null");
    std::vector<cbr::PixelBox> queries;
    for (int64_t i = 0; i < count; ++i) {
      queries.push_back(box_from(boxes[4 * i], boxes[4 * i + 1],
                                 boxes[4 * i + 2], boxes[4 * i + 3]));
    }
    cbr::record_session(*provider->p, queries, out_dir);
  });
}

/* ---- detections ---- */

cbr_status cbr_detections_create(cbr_detections** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = new cbr_detections();
  });
}

void cbr_detections_destroy(cbr_detections* dets) { delete dets; }

int64_t cbr_detections_count(const cbr_detections* dets) {
  return dets ? int64_t(dets->d.size()) : 0;
}

cbr_status cbr_detections_load(const char* path, cbr_detections** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto dets = std::make_unique<cbr_detections>();
    dets->d = cbr::load_detections(path);
    *out = dets.release();
  });
}

cbr_status cbr_detections_save(const cbr_detections* dets, const char* path) {
  return wrap([&] {
    check_handle(dets, "detections handle is null");
    check_handle(path, "path is null");
    cbr::save_detections(path, dets->d);
  });
}

cbr_status cbr_detections_merge(cbr_detections* dst,
                                const cbr_detections* src) {
  return wrap([&] {
    check_handle(dst, "dst handle is null");
    check_handle(src, "src handle is null");
    dst->d.insert(dst->d.end(), src->d.begin(), src->d.end());
  });
}

cbr_status cbr_detections_add(cbr_detections* dets, int64_t scene_id,
                              const int box[4], const double parts[4],
                              const cbr_mask* mask) {
  return wrap([&] {
    check_handle(dets, "detections handle is null");
    check_handle(box, "box is null");
    check_handle(parts, "parts is null");
    cbr::DetectionRecord record;
    record.scene_id = scene_id;
    record.object.box = box_from(box[0], box[1], box[2], box[3]);
    check(record.object.box.valid(), "box is not a valid inclusive box");
    record.object.parts.existence = parts[0];
    record.object.parts.max_center_norm = parts[1];
    record.object.parts.max_boundary = parts[2];
    record.object.parts.area_factor = parts[3];
    record.object.conf = confidence(record.object.parts);
    if (mask) record.object.mask = mask->m;
    dets->d.push_back(std::move(record));
  });
}

cbr_status cbr_detection_scene(const cbr_detections* dets, int64_t index,
                               int64_t* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = record_at(dets, index).scene_id;
  });
}

cbr_status cbr_detection_box(const cbr_detections* dets, int64_t index,
                             int out[4]) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    const cbr::PixelBox& box = record_at(dets, index).object.box;
    out[0] = box.u1;
    out[1] = box.v1;
    out[2] = box.u2;
    out[3] = box.v2;
  });
}

cbr_status cbr_detection_confidence(const cbr_detections* dets, int64_t index,
                                    double* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = record_at(dets, index).object.conf;
  });
}

cbr_status cbr_detection_parts(const cbr_detections* dets, int64_t index,
                               double out[4]) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    const cbr::ConfidenceParts& parts = record_at(dets, index).object.parts;
    out[0] = parts.existence;
    out[1] = parts.max_center_norm;
    out[2] = parts.max_boundary;
    out[3] = parts.area_factor;
  });
}

cbr_status cbr_detection_iterations(const cbr_detections* dets, int64_t index,
                                    int* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = record_at(dets, index).object.iterations;
  });
}

cbr_status cbr_detection_mask(const cbr_detections* dets, int64_t index,
                              cbr_mask** out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    auto mask = std::make_unique<cbr_mask>();
    mask->m = record_at(dets, index).object.mask;
    *out = mask.release();
  });
}

cbr_status cbr_discover(cbr_provider* provider, const cbr_config* config,
                        int64_t scene_id, int threads, cbr_detections** out) {
  cbr::DiscoverResult result;
  cbr_status status = wrap([&] {
    check_handle(provider, "provider handle is null");
    check_handle(config, "config handle is null");
    check_handle(out, "out pointer is null");
    result = cbr::discover(*provider->p, config->c, threads);
  });
  if (status != CBR_OK) return status;
  auto dets = std::make_unique<cbr_detections>();
  for (cbr::DetectedObject& object : result.detections) {
    dets->d.push_back(cbr::DetectionRecord{scene_id, std::move(object)});
  }
  *out = dets.release();
  if (result.budget_exhausted) {
    g_last_error = "proposal budget exhausted; detections are partial";
    return CBR_ERR_BUDGET_EXHAUSTED;
  }
  return CBR_OK;
}

/* ---- labels ---- */

void cbr_labels_destroy(cbr_labels* labels) { delete labels; }

int64_t cbr_labels_count(const cbr_labels* labels) {
  return labels ? int64_t(labels->l.size()) : 0;
}

cbr_status cbr_labels_save(const cbr_labels* labels, const char* path) {
  return wrap([&] {
    check_handle(labels, "labels handle is null");
    check_handle(path, "path is null");
    cbr::save_labels(path, labels->l);
  });
}

cbr_status cbr_labels_load(const char* path, cbr_labels** out) {
  return wrap([&] {
    check_handle(path, "path is null");
    check_handle(out, "out pointer is null");
    auto labels = std::make_unique<cbr_labels>();
    labels->l = cbr::load_labels(path);
    *out = labels.release();
  });
}

cbr_status cbr_label_scene(const cbr_labels* labels, int64_t index,
                           int64_t* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = label_at(labels, index).scene_id;
  });
}

cbr_status cbr_label_box(const cbr_labels* labels, int64_t index,
                         int out[4]) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    const cbr::PixelBox& box = label_at(labels, index).label.object.box;
    out[0] = box.u1;
    out[1] = box.v1;
    out[2] = box.u2;
    out[3] = box.v2;
  });
}

cbr_status cbr_label_weight(const cbr_labels* labels, int64_t index,
                            double* out) {
  return wrap([&] {
    check_handle(out, "out pointer is null");
    *out = label_at(labels, index).label.weight;
  });
}

cbr_status cbr_select_labels(const cbr_detections* dets, double min_existence,
                             double min_center_norm, double min_boundary,
                             int over_all_discovered, cbr_labels** out) {
  return wrap([&] {
    check_handle(dets, "detections handle is null");
    check_handle(out, "out pointer is null");
    cbr::LabelSelectionConfig config;
    if (min_existence >= 0) config.min_existence = min_existence;
    if (min_center_norm >= 0) config.min_center_norm = min_center_norm;
    if (min_boundary >= 0) config.min_boundary = min_boundary;
    config.weight_over_all_discovered = over_all_discovered != 0;

    // Selection and weight normalization run per scene, scenes in order of
    // first appearance.
    std::vector<int64_t> order;
    std::map<int64_t, std::vector<cbr::DetectedObject>> grouped;
    for (const cbr::DetectionRecord& record : dets->d) {
      auto [it, inserted] = grouped.try_emplace(record.scene_id);
      if (inserted) order.push_back(record.scene_id);
      it->second.push_back(record.object);
    }
    auto labels = std::make_unique<cbr_labels>();
    for (int64_t scene_id : order) {
      for (cbr::PseudoLabel& label :
           cbr::select_labels(grouped[scene_id], config)) {
        labels->l.push_back(cbr::LabelRecord{scene_id, std::move(label)});
      }
    }
    *out = labels.release();
  });
}

/* ---- evaluation ---- */

cbr_status cbr_evaluate(const cbr_detections* dets,
                        const cbr_scene_set* scenes, int max_dets,
                        char** metrics_json_out) {
  return wrap([&] {
    check_handle(dets, "detections handle is null");
    check_handle(scenes, "scene set handle is null");
    check_handle(metrics_json_out, "out pointer is null");
    check(max_dets > 0, "max_dets must be positive");
    cbr::Metrics metrics = cbr::run_eval(dets->d, scenes->s, max_dets);
    *metrics_json_out = dup_string(cbr::metrics_to_json(metrics));
  });
}

/* ---- batch runners ---- */

cbr_status cbr_run_fields(const char* mask_png_path, const char* out_dir,
                          char** report_json_out) {
  return wrap([&] {
    check_handle(mask_png_path, "mask path is null");
    check_handle(out_dir, "out_dir is null");
    cbr::run_fields(mask_png_path, out_dir);
    if (report_json_out) {
      *report_json_out = dup_string(cbr::read_text_file(
          std::string(out_dir) + "/report.json"));
    }
  });
}

cbr_status cbr_run_discover(const cbr_scene_set* scenes,
                            const cbr_config* config, int threads,
                            int trace_png, cbr_provider_mode mode,
                            const char* recorded_dir, const char* out_dir,
                            cbr_detections** out) {
  cbr::DiscoverRunResult result;
  cbr_status status = wrap([&] {
    check_handle(scenes, "scene set handle is null");
    check_handle(config, "config handle is null");
    check_handle(out_dir, "out_dir is null");
    cbr::DiscoverRunOptions options;
    options.config = config->c;
    options.threads = threads;
    options.trace_png = trace_png != 0;
    options.mode = mode_from(mode);
    options.recorded_dir = recorded_dir ? recorded_dir : "";
    options.out_dir = out_dir;
    result = cbr::run_discover(scenes->s, options);
  });
  if (status != CBR_OK) return status;
  if (out) {
    auto dets = std::make_unique<cbr_detections>();
    dets->d = std::move(result.records);
    *out = dets.release();
  }
  if (result.budget_exhausted) {
    g_last_error = "proposal budget exhausted; detections are partial";
    return CBR_ERR_BUDGET_EXHAUSTED;
  }
  return CBR_OK;
}

cbr_status cbr_render(const cbr_scene_set* scenes, const cbr_detections* dets,
                      const char* out_dir) {
  return wrap([&] {
    check_handle(scenes, "scene set handle is null");
    check_handle(dets, "detections handle is null");
    check_handle(out_dir, "out_dir is null");
    cbr::render_scenes(scenes->s, dets->d, out_dir);
  });
}

} /* extern "C" */
