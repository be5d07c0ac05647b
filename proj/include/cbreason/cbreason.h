/* cbreason: center-boundary object representations and network-free
 * multi-object discovery.
 *
 * Opaque-handle C API over the C++ core. Every function that can fail
 * returns a cbr_status; on failure the thread-local message from
 * cbr_last_error() describes the problem and out-parameters are left
 * untouched (except where noted for partial results). Handles are created
 * by cbr_*_create/load functions and released with the matching
 * cbr_*_destroy; destroy functions accept NULL.
 *
 * Pixel convention: u indexes rows (downward), v indexes columns
 * (rightward). Boxes are inclusive [u1, v1, u2, v2].
 */

#ifndef CBREASON_H
#define CBREASON_H

#include <stddef.h>
#include <stdint.h>

#ifndef CBR_API
#define CBR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbr_status {
  CBR_OK = 0,
  CBR_ERR_INVALID_ARGUMENT = 1,
  CBR_ERR_EMPTY_MASK = 2,       /* mask has no foreground */
  CBR_ERR_DEGENERATE_MASK = 3,  /* mask lacks both phases */
  CBR_ERR_ALL_ONES = 4,         /* no zero pixel for a distance transform */
  CBR_ERR_ZERO_GRADIENT = 5,    /* flat field at the queried pixel */
  CBR_ERR_DEGENERATE_FIELD = 6,
  CBR_ERR_NO_BACKGROUND = 7,    /* box flush against every scene edge */
  CBR_ERR_EMPTY_UNION = 8,      /* IoU undefined for empty shapes */
  CBR_ERR_BUDGET_EXHAUSTED = 9, /* proposal cap hit; output still valid */
  CBR_ERR_MISSING_ENTRY = 10,   /* replay manifest lacks the queried box */
  CBR_ERR_CORRUPT_FILE = 11,
  CBR_ERR_IO = 12,
  CBR_ERR_PARSE = 13,
  CBR_ERR_INTERNAL = 14
} cbr_status;

/* Library version, static storage. */
CBR_API const char* cbr_version(void);

/* Message for the most recent failure on this thread; static until the next
 * failing call. Never NULL. */
CBR_API const char* cbr_last_error(void);

/* Frees strings returned through char** out-parameters. */
CBR_API void cbr_string_free(char* s);

/* ---- binary masks ------------------------------------------------------ */

typedef struct cbr_mask cbr_mask;

/* data is row-major height*width bytes, nonzero = foreground; NULL data
 * creates an all-background mask. */
CBR_API cbr_status cbr_mask_create(int height, int width,
                                   const uint8_t* data, cbr_mask** out);
CBR_API void cbr_mask_destroy(cbr_mask* mask);
CBR_API int cbr_mask_height(const cbr_mask* mask);
CBR_API int cbr_mask_width(const cbr_mask* mask);
/* out must hold height*width bytes; written as 0/1. */
CBR_API cbr_status cbr_mask_copy_data(const cbr_mask* mask, uint8_t* out);
/* Any PNG layout; pixels with mean intensity >= 128 become foreground. */
CBR_API cbr_status cbr_mask_load_png(const char* path, cbr_mask** out);
CBR_API cbr_status cbr_mask_save_png(const cbr_mask* mask, const char* path);

/* ---- fields ------------------------------------------------------------ */

/* A dense float field: 1 channel (scalar) or 2 channels (per-pixel (du, dv)
 * vectors), row-major with the channel index fastest. */
typedef struct cbr_field cbr_field;

CBR_API void cbr_field_destroy(cbr_field* field);
CBR_API int cbr_field_height(const cbr_field* field);
CBR_API int cbr_field_width(const cbr_field* field);
CBR_API int cbr_field_channels(const cbr_field* field);
/* out must hold height*width*channels floats. */
CBR_API cbr_status cbr_field_copy_data(const cbr_field* field, float* out);

/* Exact Euclidean distance to the nearest zero pixel (1 channel). */
CBR_API cbr_status cbr_distance_to_zero(const cbr_mask* mask,
                                        cbr_field** out);
/* Positive inside the mask, negative outside (1 channel). */
CBR_API cbr_status cbr_signed_distance(const cbr_mask* mask, cbr_field** out);
/* Unit vectors pointing away from the bbox midpoint (2 channels). */
CBR_API cbr_status cbr_center_field(const cbr_mask* mask, cbr_field** out);
/* Signed distance normalized to max +1 inside, min -1 outside (1 channel). */
CBR_API cbr_status cbr_boundary_field(const cbr_mask* mask, cbr_field** out);
/* Inverse gradient magnitude of a 1-channel field at (u, v); estimates the
 * peak inside distance from any off-peak interior sample. */
CBR_API cbr_status cbr_recover_max_distance(const cbr_field* boundary, int u,
                                            int v, double* out);
/* Cross-correlation of a 2-channel field with the 5x5 anti-center kernel
 * (1 channel in [-1, 1]); pixels on one-sided support edges are forced
 * to -1. */
CBR_API cbr_status cbr_anti_center_map(const cbr_field* center,
                                       cbr_field** out);

CBR_API cbr_status cbr_field_save_cbf(const cbr_field* field,
                                      const char* path);
CBR_API cbr_status cbr_field_load_cbf(const char* path, cbr_field** out);
/* 1-channel fields render on a diverging [-1,1] palette, 2-channel fields as
 * hue=direction, saturation=magnitude. */
CBR_API cbr_status cbr_field_save_png(const cbr_field* field,
                                      const char* path);

/* ---- scene sets -------------------------------------------------------- */

typedef struct cbr_scene_set cbr_scene_set;

CBR_API cbr_status cbr_scene_set_create(cbr_scene_set** out);
CBR_API void cbr_scene_set_destroy(cbr_scene_set* scenes);
CBR_API cbr_status cbr_scene_set_load(const char* path, cbr_scene_set** out);
CBR_API cbr_status cbr_scene_set_save(const cbr_scene_set* scenes,
                                      const char* path);
CBR_API int64_t cbr_scene_set_count(const cbr_scene_set* scenes);
/* Appends an empty scene; fails on duplicate id. */
CBR_API cbr_status cbr_scene_set_add(cbr_scene_set* scenes, int64_t id,
                                     int height, int width);
/* Appends a copy of mask (must match the scene extent) as a new instance. */
CBR_API cbr_status cbr_scene_add_instance(cbr_scene_set* scenes,
                                          int64_t scene_index,
                                          const cbr_mask* mask);
CBR_API cbr_status cbr_scene_id(const cbr_scene_set* scenes,
                                int64_t scene_index, int64_t* out);
CBR_API cbr_status cbr_scene_extent(const cbr_scene_set* scenes,
                                    int64_t scene_index, int* height,
                                    int* width);
CBR_API cbr_status cbr_scene_instance_count(const cbr_scene_set* scenes,
                                            int64_t scene_index,
                                            int64_t* out);
CBR_API cbr_status cbr_scene_instance(const cbr_scene_set* scenes,
                                      int64_t scene_index,
                                      int64_t instance_index, cbr_mask** out);

/* count scenes with ids 0..count-1; scene i runs the generator with
 * seed + i. adjacency_pairs != 0 produces two congruent near-contact shapes
 * per scene instead of free placement. config_json uses the synth config
 * schema; NULL or "" means defaults. seed_override (nullable) replaces the
 * config's seed. */
CBR_API cbr_status cbr_scene_set_synth(const char* config_json, int count,
                                       int adjacency_pairs,
                                       const uint64_t* seed_override,
                                       cbr_scene_set** out);

/* ---- reasoning config -------------------------------------------------- */

typedef struct cbr_config cbr_config;

CBR_API cbr_status cbr_config_create(cbr_config** out); /* defaults */
CBR_API void cbr_config_destroy(cbr_config* config);
CBR_API cbr_status cbr_config_from_json(const char* json, cbr_config** out);
CBR_API cbr_status cbr_config_load(const char* path, cbr_config** out);
CBR_API cbr_status cbr_config_to_json(const cbr_config* config, char** out);
CBR_API cbr_status cbr_config_set_seed(cbr_config* config, uint64_t seed);

/* ---- field providers ---------------------------------------------------- */

typedef struct cbr_provider cbr_provider;

/* Ideal fields derived from the scene's instance masks. Objects whose
 * clipped mask falls below min_pixels crop pixels are dropped (>= 1). */
CBR_API cbr_status cbr_provider_oracle(const cbr_scene_set* scenes,
                                       int64_t scene_index, int min_pixels,
                                       cbr_provider** out);
/* Replays a recorded session manifest (tab-separated boxes + CBF paths). */
CBR_API cbr_status cbr_provider_replay(int scene_height, int scene_width,
                                       const char* manifest_path,
                                       cbr_provider** out);
/* Wraps inner, persisting each distinct queried box under out_dir. inner
 * must outlive the wrapper. Not safe for concurrent queries. */
CBR_API cbr_status cbr_provider_recording(cbr_provider* inner,
                                          const char* out_dir,
                                          cbr_provider** out);
CBR_API void cbr_provider_destroy(cbr_provider* provider);
CBR_API cbr_status cbr_provider_scene_extent(const cbr_provider* provider,
                                             int* height, int* width);
/* existence in [0,1]; center is 2-channel, boundary 1-channel, both at the
 * fixed 128x128 working resolution. Any output pointer may be NULL. */
CBR_API cbr_status cbr_provider_query(cbr_provider* provider, int u1, int v1,
                                      int u2, int v2, double* existence,
                                      cbr_field** center,
                                      cbr_field** boundary);
/* boxes is 4*count ints (u1, v1, u2, v2 per query); records every query in
 * order, duplicates included. */
CBR_API cbr_status cbr_record_session(cbr_provider* provider,
                                      const int* boxes, int64_t count,
                                      const char* out_dir);

/* ---- detections -------------------------------------------------------- */

typedef struct cbr_detections cbr_detections;

CBR_API cbr_status cbr_detections_create(cbr_detections** out);
CBR_API void cbr_detections_destroy(cbr_detections* dets);
CBR_API int64_t cbr_detections_count(const cbr_detections* dets);
CBR_API cbr_status cbr_detections_load(const char* path,
                                       cbr_detections** out);
CBR_API cbr_status cbr_detections_save(const cbr_detections* dets,
                                       const char* path);
/* Appends copies of src's records to dst. */
CBR_API cbr_status cbr_detections_merge(cbr_detections* dst,
                                        const cbr_detections* src);
/* parts is {existence, max_center_norm, max_boundary, area_factor};
 * confidence is their product. mask may be NULL for a box-only record. */
CBR_API cbr_status cbr_detections_add(cbr_detections* dets, int64_t scene_id,
                                      const int box[4], const double parts[4],
                                      const cbr_mask* mask);
CBR_API cbr_status cbr_detection_scene(const cbr_detections* dets,
                                       int64_t index, int64_t* out);
CBR_API cbr_status cbr_detection_box(const cbr_detections* dets,
                                     int64_t index, int out[4]);
CBR_API cbr_status cbr_detection_confidence(const cbr_detections* dets,
                                            int64_t index, double* out);
/* parts as in cbr_detections_add. */
CBR_API cbr_status cbr_detection_parts(const cbr_detections* dets,
                                       int64_t index, double out[4]);
CBR_API cbr_status cbr_detection_iterations(const cbr_detections* dets,
                                            int64_t index, int* out);
CBR_API cbr_status cbr_detection_mask(const cbr_detections* dets,
                                      int64_t index, cbr_mask** out);

/* Runs the full discovery loop against the provider: seeded multi-scale
 * proposals, existence gating, anti-center splitting, boundary refinement,
 * confidence scoring, NMS. Detections are stamped with scene_id. Returns
 * CBR_ERR_BUDGET_EXHAUSTED with *out still valid when the proposal cap was
 * hit. threads <= 1 runs serially; results are identical either way. */
CBR_API cbr_status cbr_discover(cbr_provider* provider,
                                const cbr_config* config, int64_t scene_id,
                                int threads, cbr_detections** out);

/* ---- pseudo labels ------------------------------------------------------ */

typedef struct cbr_labels cbr_labels;

CBR_API void cbr_labels_destroy(cbr_labels* labels);
CBR_API int64_t cbr_labels_count(const cbr_labels* labels);
CBR_API cbr_status cbr_labels_save(const cbr_labels* labels,
                                   const char* path);
CBR_API cbr_status cbr_labels_load(const char* path, cbr_labels** out);
CBR_API cbr_status cbr_label_scene(const cbr_labels* labels, int64_t index,
                                   int64_t* out);
CBR_API cbr_status cbr_label_box(const cbr_labels* labels, int64_t index,
                                 int out[4]);
CBR_API cbr_status cbr_label_weight(const cbr_labels* labels, int64_t index,
                                    double* out);

/* Keeps detections clearing all three thresholds; weights are
 * (mask area / normalizer)^0.25 with the normalizer taken per scene over
 * kept masks, or over all of that scene's detections when
 * over_all_discovered != 0. Pass negative thresholds for the defaults
 * (0.5, 0.8, 0.75). */
CBR_API cbr_status cbr_select_labels(const cbr_detections* dets,
                                     double min_existence,
                                     double min_center_norm,
                                     double min_boundary,
                                     int over_all_discovered,
                                     cbr_labels** out);

/* ---- evaluation --------------------------------------------------------- */

/* Class-agnostic AP/AR over boxes and masks; detections are grouped by
 * scene id, which must exist in scenes. Emits a flat JSON object with keys
 * ap_box, ap50_box, ap75_box, ar100_box and the mask equivalents. */
CBR_API cbr_status cbr_evaluate(const cbr_detections* dets,
                                const cbr_scene_set* scenes, int max_dets,
                                char** metrics_json_out);

/* ---- batch runners ------------------------------------------------------ */

/* Computes the three representations for a mask PNG; writes CBF payloads,
 * PNG renderings and report.json under out_dir; returns the report. */
CBR_API cbr_status cbr_run_fields(const char* mask_png_path,
                                  const char* out_dir,
                                  char** report_json_out);

typedef enum cbr_provider_mode {
  CBR_PROVIDER_ORACLE = 0,
  CBR_PROVIDER_REPLAY = 1, /* read fields from recorded_dir */
  CBR_PROVIDER_RECORD = 2  /* oracle + persist every query to recorded_dir */
} cbr_provider_mode;

/* Discovery over every scene; writes detections.json and run_manifest.json
 * under out_dir (plus per-query PNG traces when trace_png != 0). Replay and
 * record modes use recorded_dir/scene<id>/ per scene. Returns
 * CBR_ERR_BUDGET_EXHAUSTED with valid outputs when any scene hit the
 * proposal cap. */
CBR_API cbr_status cbr_run_discover(const cbr_scene_set* scenes,
                                    const cbr_config* config, int threads,
                                    int trace_png, cbr_provider_mode mode,
                                    const char* recorded_dir,
                                    const char* out_dir,
                                    cbr_detections** out);

/* One overlay PNG per scene under out_dir. */
CBR_API cbr_status cbr_render(const cbr_scene_set* scenes,
                              const cbr_detections* dets,
                              const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CBREASON_H */
