// Command-line front end over the cbreason C API: field computation, scene
// synthesis, object discovery, evaluation, record/replay and visualization.
// Exit codes: 0 success, 1 runtime failure, 2 usage/input errors.

#include <cbreason/cbreason.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

template <typename T, void (*Destroy)(T*)>
class Handle {
 public:
  Handle() = default;
  ~Handle() { Destroy(ptr_); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** out() { return &ptr_; }
  operator T*() const { return ptr_; }

 private:
  T* ptr_ = nullptr;
};

using MaskHandle = Handle<cbr_mask, cbr_mask_destroy>;
using SceneSetHandle = Handle<cbr_scene_set, cbr_scene_set_destroy>;
using ConfigHandle = Handle<cbr_config, cbr_config_destroy>;
using DetectionsHandle = Handle<cbr_detections, cbr_detections_destroy>;

class String {
 public:
  ~String() { cbr_string_free(ptr_); }
  char** out() { return &ptr_; }
  const char* get() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

[[noreturn]] void die(int code, const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  std::exit(code);
}

// exit_code 2 marks input/setup failures, 1 execution failures.
void must(cbr_status status, int exit_code) {
  if (status != CBR_OK) die(exit_code, cbr_last_error());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) die(2, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) die(1, "cannot write " + path);
  out << text;
  if (!out.good()) die(1, "write failed for " + path);
}

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 1;
  bool trace_png = false;
};

struct SceneSource {
  std::string scenes_path;
  std::string synth_config_path;
  int count = 1;
  bool adjacency = false;
};

void load_reasoning_config(const CommonOptions& options, ConfigHandle& config) {
  if (options.config_path.empty()) {
    must(cbr_config_create(config.out()), 2);
  } else {
    must(cbr_config_load(options.config_path.c_str(), config.out()), 2);
  }
  if (options.seed_set) must(cbr_config_set_seed(config, options.seed), 2);
}

void acquire_scenes(const SceneSource& source, const CommonOptions& options,
                    SceneSetHandle& scenes) {
  if (!source.scenes_path.empty()) {
    must(cbr_scene_set_load(source.scenes_path.c_str(), scenes.out()), 2);
    return;
  }
  std::string config_json;
  if (!source.synth_config_path.empty()) {
    config_json = slurp(source.synth_config_path);
  }
  const std::uint64_t* seed = options.seed_set ? &options.seed : nullptr;
  must(cbr_scene_set_synth(config_json.empty() ? nullptr : config_json.c_str(),
                           source.count, source.adjacency ? 1 : 0, seed,
                           scenes.out()),
       2);
}

void add_scene_source(CLI::App* cmd, SceneSource& source,
                      bool synth_allowed = true) {
  auto* scenes = cmd->add_option("--scenes", source.scenes_path,
                                 "scene set JSON with instance masks")
                     ->check(CLI::ExistingFile);
  if (!synth_allowed) {
    scenes->required();
    return;
  }
  auto* synth = cmd->add_option("--synth", source.synth_config_path,
                                "synth config JSON (generates scenes)")
                    ->check(CLI::ExistingFile);
  auto* count = cmd->add_option("--count", source.count,
                                "number of scenes to generate")
                    ->check(CLI::PositiveNumber);
  auto* adjacency = cmd->add_flag("--adjacency", source.adjacency,
                                  "generate near-contact object pairs");
  scenes->excludes(synth);
  synth->excludes(scenes);
  count->needs(synth);
  adjacency->needs(synth);
}

int run_discover_command(const SceneSource& source,
                         const CommonOptions& options,
                         cbr_provider_mode mode,
                         const std::string& recorded_dir) {
  SceneSetHandle scenes;
  acquire_scenes(source, options, scenes);
  ConfigHandle config;
  load_reasoning_config(options, config);

  DetectionsHandle detections;
  cbr_status status = cbr_run_discover(
      scenes, config, options.threads, options.trace_png ? 1 : 0, mode,
      recorded_dir.empty() ? nullptr : recorded_dir.c_str(),
      options.out.c_str(), detections.out());
  if (status != CBR_OK && status != CBR_ERR_BUDGET_EXHAUSTED) {
    die(1, cbr_last_error());
  }
  std::printf("scenes %lld detections %lld -> %s\n",
              static_cast<long long>(cbr_scene_set_count(scenes)),
              static_cast<long long>(cbr_detections_count(detections)),
              options.out.c_str());
  if (status == CBR_ERR_BUDGET_EXHAUSTED) {
    std::fprintf(stderr, "warning: %s\n", cbr_last_error());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"center-boundary object representations and discovery"};
  app.require_subcommand(1);

  CommonOptions options;

  // fields
  auto* fields_cmd = app.add_subcommand(
      "fields", "compute the three representations for one mask PNG");
  std::string mask_path;
  fields_cmd->add_option("--mask", mask_path, "binary mask PNG")
      ->required()
      ->check(CLI::ExistingFile);
  fields_cmd->add_option("--out", options.out, "output directory")->required();

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate synthetic scene sets");
  SceneSource synth_source;
  synth_cmd->add_option("--config", synth_source.synth_config_path,
                        "synth config JSON")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--count", synth_source.count, "number of scenes")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--adjacency", synth_source.adjacency,
                      "generate near-contact object pairs");
  synth_cmd->add_option("--seed", options.seed, "seed override");
  synth_cmd->add_option("--out", options.out, "output scene JSON")->required();

  // discover / record / replay-discover
  auto* discover_cmd = app.add_subcommand(
      "discover", "run multi-object discovery with the oracle provider");
  auto* record_cmd = app.add_subcommand(
      "record", "discover while persisting every field query");
  auto* replay_cmd = app.add_subcommand(
      "replay-discover", "discover from a recorded session");
  SceneSource discover_source, record_source, replay_source;
  std::string record_dir, replay_dir;
  for (auto [cmd, source] : {std::pair{discover_cmd, &discover_source},
                             std::pair{record_cmd, &record_source}}) {
    add_scene_source(cmd, *source);
    cmd->add_option("--config", options.config_path, "reasoning config JSON")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", options.seed, "seed override");
    cmd->add_option("--out", options.out, "output directory")->required();
    cmd->add_option("--threads", options.threads, "worker threads (>=1)")
        ->envname("CBREASON_THREADS")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--trace-png", options.trace_png,
                  "write per-query field PNGs");
  }
  record_cmd->add_option("--recorded", record_dir,
                         "directory for the recorded session")
      ->required();
  add_scene_source(replay_cmd, replay_source, /*synth_allowed=*/false);
  replay_cmd
      ->add_option("--config", options.config_path, "reasoning config JSON")
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--seed", options.seed, "seed override");
  replay_cmd->add_option("--out", options.out, "output directory")->required();
  replay_cmd->add_option("--threads", options.threads, "worker threads (>=1)")
      ->envname("CBREASON_THREADS")
      ->check(CLI::PositiveNumber);
  replay_cmd->add_flag("--trace-png", options.trace_png,
                       "write per-query field PNGs");
  replay_cmd
      ->add_option("--recorded", replay_dir, "recorded session directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "score detections against scene instance masks");
  std::string detections_path;
  SceneSource eval_source;
  int max_dets = 100;
  eval_cmd->add_option("--detections", detections_path, "detections JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_scene_source(eval_cmd, eval_source, /*synth_allowed=*/false);
  eval_cmd->add_option("--out", options.out, "metrics JSON output path");
  eval_cmd->add_option("--max-dets", max_dets,
                       "detections scored per scene")
      ->check(CLI::PositiveNumber);

  // render
  auto* render_cmd =
      app.add_subcommand("render", "overlay detections on scene masks");
  std::string render_detections;
  SceneSource render_source;
  render_cmd->add_option("--detections", render_detections, "detections JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_scene_source(render_cmd, render_source, /*synth_allowed=*/false);
  render_cmd->add_option("--out", options.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* cmd : {synth_cmd, discover_cmd, record_cmd, replay_cmd}) {
    if (cmd->parsed() && cmd->count("--seed") > 0) options.seed_set = true;
  }

  if (*fields_cmd) {
    String report;
    must(cbr_run_fields(mask_path.c_str(), options.out.c_str(), report.out()),
         1);
    std::printf("%s", report.get());
    return 0;
  }

  if (*synth_cmd) {
    SceneSetHandle scenes;
    acquire_scenes(synth_source, options, scenes);
    must(cbr_scene_set_save(scenes, options.out.c_str()), 1);
    std::printf("wrote %lld scenes -> %s\n",
                static_cast<long long>(cbr_scene_set_count(scenes)),
                options.out.c_str());
    return 0;
  }

  if (*discover_cmd) {
    return run_discover_command(discover_source, options, CBR_PROVIDER_ORACLE,
                                "");
  }
  if (*record_cmd) {
    return run_discover_command(record_source, options, CBR_PROVIDER_RECORD,
                                record_dir);
  }
  if (*replay_cmd) {
    return run_discover_command(replay_source, options, CBR_PROVIDER_REPLAY,
                                replay_dir);
  }

  if (*eval_cmd) {
    SceneSetHandle scenes;
    acquire_scenes(eval_source, options, scenes);
    DetectionsHandle detections;
    must(cbr_detections_load(detections_path.c_str(), detections.out()), 2);
    String metrics;
    must(cbr_evaluate(detections, scenes, max_dets, metrics.out()), 1);
    std::printf("%s", metrics.get());
    if (!options.out.empty()) spill(options.out, metrics.get());
    return 0;
  }

  if (*render_cmd) {
    SceneSetHandle scenes;
    acquire_scenes(render_source, options, scenes);
    DetectionsHandle detections;
    must(cbr_detections_load(render_detections.c_str(), detections.out()), 2);
    must(cbr_render(scenes, detections, options.out.c_str()), 1);
    std::printf("rendered %lld scenes -> %s\n",
                static_cast<long long>(cbr_scene_set_count(scenes)),
                options.out.c_str());
    return 0;
  }

  return 2;
}
