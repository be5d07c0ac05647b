#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "core/cbf.hpp"
#include "core/png_io.hpp"
#include "core/rle.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "core/types.hpp"

using namespace cbr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("cbr_fmt_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

BinaryMask random_mask(Rng& rng, int h, int w, double p) {
  BinaryMask m(h, w);
  for (auto& x : m.data) x = rng.u01() < p ? 1 : 0;
  return m;
}

std::string slurp_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spill_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a cbr::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("cbf round-trips fields bit-exactly") {
  TempDir tmp("cbf");
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    RawField f(1 + int(rng.index(20)), 1 + int(rng.index(20)),
               1 + int(rng.index(3)));
    for (float& x : f.data) x = float(rng.uniform(-5, 5));
    std::string path = tmp.file("f.cbf");
    write_cbf(path, f);
    RawField g = read_cbf(path);
    CHECK(g.height == f.height);
    CHECK(g.width == f.width);
    CHECK(g.channels == f.channels);
    CHECK(g.data == f.data);
  }
}

TEST_CASE("cbf rejects corrupt containers") {
  TempDir tmp("cbf_bad");
  RawField f(3, 4, 2);
  for (size_t i = 0; i < f.data.size(); ++i) f.data[i] = float(i);
  std::string path = tmp.file("f.cbf");
  write_cbf(path, f);
  std::string bytes = slurp_bytes(path);

  SUBCASE("bad magic") {
    std::string b = bytes;
    b[0] = 'X';
    spill_bytes(path, b);
    CHECK(code_of([&] { read_cbf(path); }) == ErrorCode::CorruptFile);
  }
  SUBCASE("truncated payload") {
    spill_bytes(path, bytes.substr(0, bytes.size() - 5));
    CHECK(code_of([&] { read_cbf(path); }) == ErrorCode::CorruptFile);
  }
  SUBCASE("trailing garbage") {
    spill_bytes(path, bytes + "zz");
    CHECK(code_of([&] { read_cbf(path); }) == ErrorCode::CorruptFile);
  }
  SUBCASE("missing file") {
    CHECK(code_of([&] { read_cbf(tmp.file("nope.cbf")); }) == ErrorCode::Io);
  }
}

TEST_CASE("rle encodes column-major with a leading background count") {
  // 2x3 mask, fg at (0,0) and (1,2). Column-major pixel order:
  // (0,0) (1,0) (0,1) (1,1) (0,2) (1,2) -> fg,bg,bg,bg,bg,fg.
  BinaryMask m(2, 3);
  m.at(0, 0) = 1;
  m.at(1, 2) = 1;
  std::vector<std::int64_t> counts = rle_encode(m);
  CHECK(counts == std::vector<std::int64_t>{0, 1, 4, 1});
  BinaryMask back = rle_decode(2, 3, counts);
  CHECK(back.data == m.data);
}

TEST_CASE("rle round-trips random masks") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    BinaryMask m = random_mask(rng, 1 + int(rng.index(16)),
                               1 + int(rng.index(16)), rng.u01());
    BinaryMask back = rle_decode(m.height, m.width, rle_encode(m));
    CHECK(back.data == m.data);
  }
}

TEST_CASE("rle decode validates counts") {
  CHECK(code_of([] { rle_decode(2, 2, {0, 3}); }) == ErrorCode::CorruptFile);
  CHECK(code_of([] { rle_decode(2, 2, {0, 5}); }) == ErrorCode::CorruptFile);
  CHECK(code_of([] { rle_decode(2, 2, {-1, 5}); }) == ErrorCode::CorruptFile);
  CHECK(code_of([] { rle_decode(0, 2, {0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("scene sets round-trip through json") {
  TempDir tmp("scenes");
  Rng rng(33);
  SceneSet scenes;
  for (int s = 0; s < 3; ++s) {
    Scene scene;
    scene.id = 100 + s;
    scene.height = 6 + s;
    scene.width = 5;
    int n = int(rng.index(3));
    for (int i = 0; i < n; ++i)
      scene.instances.push_back(
          random_mask(rng, scene.height, scene.width, 0.3));
    scenes.push_back(std::move(scene));
  }

  std::string text = scenes_to_json(scenes);
  SceneSet back = scenes_from_json(text);
  REQUIRE(back.size() == scenes.size());
  for (size_t s = 0; s < scenes.size(); ++s) {
    CHECK(back[s].id == scenes[s].id);
    CHECK(back[s].height == scenes[s].height);
    CHECK(back[s].width == scenes[s].width);
    REQUIRE(back[s].instances.size() == scenes[s].instances.size());
    for (size_t i = 0; i < scenes[s].instances.size(); ++i)
      CHECK(back[s].instances[i].data == scenes[s].instances[i].data);
  }

  std::string path = tmp.file("scenes.json");
  save_scenes(path, scenes);
  CHECK(scenes_to_json(load_scenes(path)) == text);
  CHECK(code_of([&] { load_scenes(tmp.file("missing.json")); }) ==
        ErrorCode::Io);
  CHECK(code_of([] { scenes_from_json("{"); }) == ErrorCode::Parse);
  CHECK(code_of([] { scenes_from_json("{\"scenes\": 3}"); }) ==
        ErrorCode::Parse);
}

TEST_CASE("detections round-trip including box-only records") {
  TempDir tmp("dets");
  Rng rng(44);
  std::vector<DetectionRecord> records;

  DetectionRecord full;
  full.scene_id = 7;
  full.object.box = {2, 3, 10, 12};
  full.object.mask = random_mask(rng, 16, 16, 0.4);
  full.object.parts = {0.9, 0.8, 0.7, 0.6};
  full.object.conf = confidence(full.object.parts);
  full.object.iterations = 5;
  records.push_back(full);

  DetectionRecord box_only;
  box_only.scene_id = 8;
  box_only.object.box = {0, 0, 4, 4};
  box_only.object.parts = {1, 1, 1, 1};
  box_only.object.conf = 1;
  records.push_back(box_only);  // empty mask stays empty

  std::string text = detections_to_json(records);
  std::vector<DetectionRecord> back = detections_from_json(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].scene_id == 7);
  CHECK(back[0].object.box == full.object.box);
  CHECK(back[0].object.mask.data == full.object.mask.data);
  CHECK(back[0].object.conf == doctest::Approx(full.object.conf));
  CHECK(back[0].object.parts.existence == doctest::Approx(0.9));
  CHECK(back[0].object.parts.area_factor == doctest::Approx(0.6));
  CHECK(back[0].object.iterations == 5);
  CHECK(back[1].object.mask.height == 0);
  CHECK(back[1].object.mask.width == 0);

  std::string path = tmp.file("d.json");
  save_detections(path, records);
  CHECK(detections_to_json(load_detections(path)) == text);
}

TEST_CASE("labels round-trip with weights") {
  TempDir tmp("labels");
  LabelRecord rec;
  rec.scene_id = 3;
  rec.label.object.box = {1, 1, 6, 6};
  rec.label.object.mask = BinaryMask(8, 8);
  rec.label.object.mask.at(2, 2) = 1;
  rec.label.object.parts = {1, 1, 1, 1};
  rec.label.object.conf = 1;
  rec.label.weight = 0.75;

  std::string text = labels_to_json({rec});
  std::vector<LabelRecord> back = labels_from_json(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].scene_id == 3);
  CHECK(back[0].label.weight == doctest::Approx(0.75));
  CHECK(back[0].label.object.mask.data == rec.label.object.mask.data);

  std::string path = tmp.file("l.json");
  save_labels(path, {rec});
  CHECK(labels_to_json(load_labels(path)) == text);
}

TEST_CASE("reasoning config round-trips and rejects junk") {
  ReasoningConfig cfg;
  cfg.scales = {16, 48};
  cfg.aspect_ratios = {1.0, 3.0};
  cfg.tau_e = 0.4;
  cfg.tau_c = 0.3;
  cfg.tau_adjust = 0.25;
  cfg.shrink_margin = 9;
  cfg.max_iterations = 17;
  cfg.nms_iou = 0.6;
  cfg.seed = 99;

  ReasoningConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.scales == cfg.scales);
  CHECK(back.aspect_ratios == cfg.aspect_ratios);
  CHECK(back.tau_e == doctest::Approx(cfg.tau_e));
  CHECK(back.tau_c == doctest::Approx(cfg.tau_c));
  CHECK(back.tau_adjust == doctest::Approx(cfg.tau_adjust));
  CHECK(back.shrink_margin == doctest::Approx(cfg.shrink_margin));
  CHECK(back.max_iterations == cfg.max_iterations);
  CHECK(back.nms_iou == doctest::Approx(cfg.nms_iou));
  CHECK(back.seed == cfg.seed);

  // Partial configs inherit defaults; unknown keys and bad values are Parse
  // errors rather than silent drift.
  ReasoningConfig partial = config_from_json("{\"tau_e\": 0.7}");
  CHECK(partial.tau_e == doctest::Approx(0.7));
  CHECK(partial.max_iterations == ReasoningConfig().max_iterations);
  CHECK(code_of([] { config_from_json("{\"tau_x\": 1}"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { config_from_json("{\"scales\": []}"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { config_from_json("{\"max_iterations\": 0}"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { config_from_json("{\"aspect_ratios\": [0.0]}"); }) ==
        ErrorCode::Parse);
}

TEST_CASE("synth config round-trips") {
  SynthConfig cfg;
  cfg.height = 100;
  cfg.width = 90;
  cfg.min_objects = 2;
  cfg.max_objects = 5;
  cfg.shapes = {ShapeKind::Disk};
  cfg.min_size = 10;
  cfg.max_size = 20;
  cfg.min_gap = 3.5;
  cfg.gap_min = 1;
  cfg.gap_max = 2;
  cfg.seed = 5;

  SynthConfig back = synth_config_from_json(synth_config_to_json(cfg));
  CHECK(back.height == cfg.height);
  CHECK(back.width == cfg.width);
  CHECK(back.min_objects == cfg.min_objects);
  CHECK(back.max_objects == cfg.max_objects);
  REQUIRE(back.shapes.size() == 1);
  CHECK(back.shapes[0] == ShapeKind::Disk);
  CHECK(back.min_size == cfg.min_size);
  CHECK(back.max_size == cfg.max_size);
  CHECK(back.min_gap == doctest::Approx(cfg.min_gap));
  CHECK(back.gap_min == cfg.gap_min);
  CHECK(back.gap_max == cfg.gap_max);
  CHECK(back.seed == cfg.seed);
  CHECK(code_of([] { synth_config_from_json("{\"shape\": \"disk\"}"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { synth_config_from_json("{\"shapes\": [\"blob\"]}"); }) ==
        ErrorCode::Parse);
}

TEST_CASE("metrics serialize with stable keys") {
  Metrics m{{"ap_box", 0.5}, {"ap50_box", 1.0}};
  std::string a = metrics_to_json(m);
  std::string b = metrics_to_json(m);
  CHECK(a == b);
  CHECK(a.find("\"ap50_box\"") != std::string::npos);
  CHECK(a.back() == '\n');
}

TEST_CASE("mask png round-trips binarization") {
  TempDir tmp("png");
  Rng rng(55);
  BinaryMask m = random_mask(rng, 9, 14, 0.5);
  std::string path = tmp.file("m.png");
  save_mask_png(path, m);
  BinaryMask back = load_mask_png(path);
  CHECK(back.height == m.height);
  CHECK(back.width == m.width);
  CHECK(back.data == m.data);
  CHECK(code_of([&] { load_mask_png(tmp.file("no.png")); }) == ErrorCode::Io);

  spill_bytes(tmp.file("junk.png"), "this is not a png");
  CHECK(code_of([&] { load_mask_png(tmp.file("junk.png")); }) ==
        ErrorCode::CorruptFile);
}

TEST_CASE("field renderings write readable pngs") {
  TempDir tmp("fieldpng");
  ScalarField s(4, 6);
  for (size_t i = 0; i < s.data.size(); ++i) s.data[i] = float(i) / 12.f - 1.f;
  save_scalar_png(tmp.file("s.png"), s);
  BinaryMask sm = load_mask_png(tmp.file("s.png"));
  CHECK(sm.height == 4);
  CHECK(sm.width == 6);

  VectorField v(3, 3);
  v.set(1, 1, 1.f, 0.f);
  save_vector_png(tmp.file("v.png"), v);
  BinaryMask vm = load_mask_png(tmp.file("v.png"));
  CHECK(vm.height == 3);
  CHECK(vm.width == 3);
}
