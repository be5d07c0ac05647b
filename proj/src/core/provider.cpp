#include "provider.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbf.hpp"
#include "field_ops.hpp"

namespace cbr {

namespace {

void check_box(const PixelBox& box, int h, int w) {
  require(box.valid() && box.u1 >= 0 && box.v1 >= 0 && box.u2 < h && box.v2 < w,
          ErrorCode::InvalidArgument, "query box outside the scene");
}

// Nearest-neighbor crop of a scene mask into crop resolution, corner-aligned.
BinaryMask crop_mask(const BinaryMask& scene_mask, const PixelBox& box) {
  BinaryMask out(kCropSize, kCropSize);
  const int bh = box.height(), bw = box.width();
  std::vector<int> row(kCropSize), col(kCropSize);
  for (int i = 0; i < kCropSize; ++i) {
    row[i] = box.u1 + int(std::llround(sample_coord(i, kCropSize, bh)));
    col[i] = box.v1 + int(std::llround(sample_coord(i, kCropSize, bw)));
  }
  for (int i = 0; i < kCropSize; ++i)
    for (int j = 0; j < kCropSize; ++j)
      out.at(i, j) = scene_mask.at(row[i], col[j]);
  return out;
}

std::array<int, 4> key_of(const PixelBox& b) { return {b.u1, b.v1, b.u2, b.v2}; }

void write_entry(const std::string& dir, std::ofstream& manifest, int index,
                 const PixelBox& box, const FieldBundle& bundle) {
  char name[64];
  std::snprintf(name, sizeof name, "q%06d_e.cbf", index);
  std::string efile = name;
  std::snprintf(name, sizeof name, "q%06d_c.cbf", index);
  std::string cfile = name;
  std::snprintf(name, sizeof name, "q%06d_b.cbf", index);
  std::string bfile = name;

  RawField existence(1, 1, 1);
  existence.data[0] = float(bundle.existence);
  write_cbf(dir + "/" + efile, existence);
  write_cbf(dir + "/" + cfile, to_raw(bundle.center));
  write_cbf(dir + "/" + bfile, to_raw(bundle.boundary));

  manifest << box.u1 << '\t' << box.v1 << '\t' << box.u2 << '\t' << box.v2
           << '\t' << efile << '\t' << cfile << '\t' << bfile << '\n';
  manifest.flush();
  require(manifest.good(), ErrorCode::Io, "manifest write failed");
}

}  // namespace

std::string manifest_path_for(const std::string& out_dir) {
  return out_dir + "/manifest.tsv";
}

OracleProvider::OracleProvider(const Scene& scene, int min_pixels)
    : scene_(scene), min_pixels_(std::max(1, min_pixels)) {
  require(scene_.height > 0 && scene_.width > 0, ErrorCode::InvalidArgument,
          "oracle scene has no canvas");
}

FieldBundle OracleProvider::query(const PixelBox& box) {
  check_box(box, scene_.height, scene_.width);

  FieldBundle bundle;
  bundle.center = VectorField(kCropSize, kCropSize);
  bundle.boundary = ScalarField(kCropSize, kCropSize);

  std::vector<BinaryMask> clipped;
  for (const BinaryMask& inst : scene_.instances) {
    BinaryMask m = crop_mask(inst, box);
    if (m.count() >= min_pixels_) clipped.push_back(std::move(m));
  }
  if (clipped.empty()) return bundle;  // existence 0, all-zero fields
  bundle.existence = 1.0;

  // Pixel ownership: lowest surviving instance id wins.
  std::vector<int> owner(size_t(kCropSize) * kCropSize, -1);
  for (int k = int(clipped.size()) - 1; k >= 0; --k)
    for (size_t p = 0; p < owner.size(); ++p)
      if (clipped[size_t(k)].data[p]) owner[p] = k;

  BinaryMask unionmask(kCropSize, kCropSize);
  for (size_t p = 0; p < owner.size(); ++p)
    unionmask.data[p] = owner[p] >= 0 ? 1 : 0;

  // Per-object center and foreground boundary values at owned pixels.
  for (int k = 0; k < int(clipped.size()); ++k) {
    const BinaryMask& m = clipped[size_t(k)];
    PixelBox bb = tightest_bbox(m);
    double cu = 0.5 * (bb.u1 + bb.u2), cv = 0.5 * (bb.v1 + bb.v2);
    ScalarField fb = boundary_field(m);
    for (int u = 0; u < kCropSize; ++u)
      for (int v = 0; v < kCropSize; ++v) {
        if (owner[size_t(u) * kCropSize + v] != k) continue;
        bundle.boundary.at(u, v) = fb.at(u, v);
        double du = u - cu, dv = v - cv;
        double norm = std::sqrt(du * du + dv * dv);
        if (norm >= 1e-9)
          bundle.center.set(u, v, float(du / norm), float(dv / norm));
      }
  }

  // Background boundary values against the union of clipped masks.
  if (unionmask.count() < (long long)kCropSize * kCropSize) {
    BinaryMask inverted(kCropSize, kCropSize);
    for (size_t p = 0; p < unionmask.data.size(); ++p)
      inverted.data[p] = unionmask.data[p] ? 0 : 1;
    ScalarField d = distance_to_zero(inverted);
    float dmax = 0.f;
    for (size_t p = 0; p < d.data.size(); ++p)
      if (!unionmask.data[p]) dmax = std::max(dmax, d.data[p]);
    for (size_t p = 0; p < d.data.size(); ++p)
      if (!unionmask.data[p]) bundle.boundary.data[p] = -d.data[p] / dmax;
  }
  return bundle;
}

ReplayProvider::ReplayProvider(int scene_height, int scene_width,
                               const std::string& manifest_path)
    : height_(scene_height), width_(scene_width) {
  require(height_ > 0 && width_ > 0, ErrorCode::InvalidArgument,
          "replay scene dimensions must be positive");
  std::filesystem::path mp(manifest_path);
  dir_ = mp.has_parent_path() ? mp.parent_path().string() : ".";

  std::ifstream in(manifest_path);
  require(in.good(), ErrorCode::Io, "cannot open manifest: " + manifest_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    PixelBox box;
    Entry entry;
    std::string f0, f1, f2;
    if (!(ss >> box.u1 >> box.v1 >> box.u2 >> box.v2 >> f0 >> f1 >> f2))
      throw Error(ErrorCode::CorruptFile,
                  "malformed manifest line " + std::to_string(lineno));
    entry.existence = f0;
    entry.center = f1;
    entry.boundary = f2;
    entries_[key_of(box)] = entry;
  }
}

FieldBundle ReplayProvider::query(const PixelBox& box) {
  check_box(box, height_, width_);
  auto it = entries_.find(key_of(box));
  require(it != entries_.end(), ErrorCode::MissingEntry,
          "no recorded bundle for box " + std::to_string(box.u1) + "," +
              std::to_string(box.v1) + "," + std::to_string(box.u2) + "," +
              std::to_string(box.v2));

  RawField e = read_cbf(dir_ + "/" + it->second.existence);
  require(e.height == 1 && e.width == 1 && e.channels == 1,
          ErrorCode::CorruptFile, "existence payload is not 1x1x1");
  RawField c = read_cbf(dir_ + "/" + it->second.center);
  require(c.height == kCropSize && c.width == kCropSize && c.channels == 2,
          ErrorCode::CorruptFile, "center payload has wrong shape");
  RawField b = read_cbf(dir_ + "/" + it->second.boundary);
  require(b.height == kCropSize && b.width == kCropSize && b.channels == 1,
          ErrorCode::CorruptFile, "boundary payload has wrong shape");

  FieldBundle bundle;
  bundle.existence = e.data[0];
  bundle.center = to_vector(c);
  bundle.boundary = to_scalar(b);
  return bundle;
}

RecordingProvider::RecordingProvider(FieldProvider& inner,
                                     const std::string& out_dir)
    : inner_(inner), dir_(out_dir) {
  std::filesystem::create_directories(dir_);
  // Create (or truncate) the manifest up front so zero-query sessions still
  // leave a replayable artifact.
  std::ofstream manifest(manifest_path_for(dir_), std::ios::trunc);
  require(manifest.good(), ErrorCode::Io,
          "cannot create manifest in " + dir_);
}

FieldBundle RecordingProvider::query(const PixelBox& box) {
  FieldBundle bundle = inner_.query(box);
  auto key = key_of(box);
  if (!seen_.count(key)) {
    seen_[key] = true;
    std::ofstream manifest(manifest_path_for(dir_), std::ios::app);
    require(manifest.good(), ErrorCode::Io, "cannot append to manifest");
    write_entry(dir_, manifest, next_index_++, box, bundle);
  }
  return bundle;
}

void record_session(FieldProvider& provider, const std::vector<PixelBox>& queries,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream manifest(manifest_path_for(out_dir), std::ios::trunc);
  require(manifest.good(), ErrorCode::Io, "cannot create manifest in " + out_dir);
  int index = 0;
  for (const PixelBox& box : queries) {
    FieldBundle bundle = provider.query(box);
    write_entry(out_dir, manifest, index++, box, bundle);
  }
}

}  // namespace cbr
