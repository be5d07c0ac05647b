#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core/field_ops.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

using namespace cbr;

namespace {

// Independent all-pairs reference for the distance transform: for every
// pixel, the minimum squared distance to any zero pixel. Quadratic and slow,
// but obviously correct.
std::vector<std::int64_t> brute_force_sq(const BinaryMask& mask) {
  std::vector<std::int64_t> out(size_t(mask.height) * mask.width, -1);
  for (int u = 0; u < mask.height; ++u)
    for (int v = 0; v < mask.width; ++v) {
      std::int64_t best = -1;
      for (int zu = 0; zu < mask.height; ++zu)
        for (int zv = 0; zv < mask.width; ++zv) {
          if (mask.at(zu, zv)) continue;
          std::int64_t du = u - zu, dv = v - zv;
          std::int64_t d = du * du + dv * dv;
          if (best < 0 || d < best) best = d;
        }
      out[size_t(u) * mask.width + v] = best;
    }
  return out;
}

BinaryMask random_mask(Rng& rng, int h, int w, double fg_prob) {
  BinaryMask m(h, w);
  for (auto& p : m.data) p = rng.u01() < fg_prob ? 1 : 0;
  return m;
}

BinaryMask disk_mask(int canvas, double cu, double cv, double r) {
  BinaryMask m(canvas, canvas);
  for (int u = 0; u < canvas; ++u)
    for (int v = 0; v < canvas; ++v)
      if ((u - cu) * (u - cu) + (v - cv) * (v - cv) <= r * r) m.at(u, v) = 1;
  return m;
}

BinaryMask rect_mask(int h, int w, const PixelBox& b) {
  BinaryMask m(h, w);
  for (int u = b.u1; u <= b.u2; ++u)
    for (int v = b.v1; v <= b.v2; ++v) m.at(u, v) = 1;
  return m;
}

}  // namespace

TEST_CASE("distance transform matches the all-pairs reference") {
  Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    int h = 2 + int(rng.index(23));
    int w = 2 + int(rng.index(23));
    double p = 0.1 + 0.8 * rng.u01();
    BinaryMask m = random_mask(rng, h, w, p);
    if (m.count() == (long long)m.data.size()) m.at(0, 0) = 0;  // keep a zero

    std::vector<std::int64_t> got = distance_to_zero_squared(m);
    std::vector<std::int64_t> want = brute_force_sq(m);
    REQUIRE(got == want);

    ScalarField d = distance_to_zero(m);
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(d.data[i] == float(std::sqrt(double(want[i]))));
  }
}

TEST_CASE("distance transform rejects a mask without zeros") {
  BinaryMask m(4, 4);
  for (auto& p : m.data) p = 1;
  CHECK_THROWS_AS(distance_to_zero_squared(m), Error);
  try {
    distance_to_zero_squared(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllOnes);
  }
}

TEST_CASE("signed distance is positive inside and negative outside") {
  Rng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryMask m = random_mask(rng, 3 + int(rng.index(14)),
                               3 + int(rng.index(14)), 0.4);
    if (m.empty_fg() || m.count() == (long long)m.data.size()) continue;

    ScalarField s = signed_distance(m);
    std::vector<std::int64_t> to_bg = brute_force_sq(m);
    BinaryMask inv(m.height, m.width);
    for (size_t i = 0; i < m.data.size(); ++i) inv.data[i] = m.data[i] ? 0 : 1;
    std::vector<std::int64_t> to_fg = brute_force_sq(inv);

    for (int u = 0; u < m.height; ++u)
      for (int v = 0; v < m.width; ++v) {
        size_t i = size_t(u) * m.width + v;
        float want = m.at(u, v) ? float(std::sqrt(double(to_bg[i])))
                                : -float(std::sqrt(double(to_fg[i])));
        CHECK(s.at(u, v) == want);
        if (m.at(u, v)) CHECK(s.at(u, v) >= 1.0);
      }
  }
}

TEST_CASE("signed distance rejects single-phase masks") {
  BinaryMask all_fg(3, 3);
  for (auto& p : all_fg.data) p = 1;
  CHECK_THROWS_AS(signed_distance(all_fg), Error);
  BinaryMask all_bg(3, 3);
  CHECK_THROWS_AS(signed_distance(all_bg), Error);
}

TEST_CASE("boundary field peaks at exactly +1 inside and -1 outside") {
  Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    BinaryMask m = random_mask(rng, 4 + int(rng.index(17)),
                               4 + int(rng.index(17)), 0.35);
    if (m.empty_fg() || m.count() == (long long)m.data.size()) continue;

    ScalarField b = boundary_field(m);
    float fg_max = -2.f, bg_min = 2.f;
    for (int u = 0; u < m.height; ++u)
      for (int v = 0; v < m.width; ++v) {
        if (m.at(u, v)) {
          CHECK(b.at(u, v) > 0.f);
          fg_max = std::max(fg_max, b.at(u, v));
        } else {
          CHECK(b.at(u, v) < 0.f);
          bg_min = std::min(bg_min, b.at(u, v));
        }
      }
    CHECK(fg_max == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(bg_min == doctest::Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("boundary field of an all-foreground mask uses the virtual ring") {
  BinaryMask m(6, 9);
  for (auto& p : m.data) p = 1;
  ScalarField b = boundary_field(m);
  float mx = -2.f, mn = 2.f;
  for (float x : b.data) {
    CHECK(x > 0.f);  // nothing is outside
    mx = std::max(mx, x);
    mn = std::min(mn, x);
  }
  CHECK(mx == doctest::Approx(1.0).epsilon(1e-6));
  // Pixels adjacent to the virtual ring sit 1 px from a zero; the innermost
  // pixel of a 6-row mask sits 3 px deep.
  CHECK(mn == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("boundary field rejects an empty mask") {
  CHECK_THROWS_AS(boundary_field(BinaryMask(4, 4)), Error);
}

TEST_CASE("center field points away from the bbox midpoint at unit length") {
  SUBCASE("odd extents zero the exact center pixel") {
    BinaryMask m = rect_mask(9, 9, {2, 2, 6, 6});
    VectorField f = center_field(m);
    for (int u = 0; u < 9; ++u)
      for (int v = 0; v < 9; ++v) {
        double du = f.du(u, v), dv = f.dv(u, v);
        if (!m.at(u, v)) {
          CHECK(du == 0.f);
          CHECK(dv == 0.f);
        } else if (u == 4 && v == 4) {
          CHECK(du == 0.f);  // at the midpoint the direction is undefined
          CHECK(dv == 0.f);
        } else {
          double eu = u - 4.0, ev = v - 4.0;
          double n = std::sqrt(eu * eu + ev * ev);
          CHECK(du == doctest::Approx(eu / n).epsilon(1e-6));
          CHECK(dv == doctest::Approx(ev / n).epsilon(1e-6));
          CHECK(std::sqrt(du * du + dv * dv) == doctest::Approx(1.0).epsilon(1e-6));
        }
      }
  }
  SUBCASE("even extents have a half-integral midpoint and no zero pixel") {
    BinaryMask m = rect_mask(8, 8, {1, 3, 4, 6});
    VectorField f = center_field(m);
    double cu = (1 + 4) / 2.0, cv = (3 + 6) / 2.0;
    for (int u = 1; u <= 4; ++u)
      for (int v = 3; v <= 6; ++v) {
        double eu = u - cu, ev = v - cv;
        double n = std::sqrt(eu * eu + ev * ev);
        CHECK(f.du(u, v) == doctest::Approx(eu / n).epsilon(1e-6));
        CHECK(f.dv(u, v) == doctest::Approx(ev / n).epsilon(1e-6));
      }
  }
  SUBCASE("empty mask gives an all-zero field") {
    VectorField f = center_field(BinaryMask(5, 7));
    for (float x : f.data) CHECK(x == 0.f);
  }
}

TEST_CASE("inverse boundary gradient recovers the peak inside distance") {
  for (double r : {10.0, 16.0}) {
    int canvas = int(2 * r) + 21;
    BinaryMask m = disk_mask(canvas, canvas / 2.0, canvas / 2.0, r);
    ScalarField d = distance_to_zero(m);
    double peak = 0;
    for (int u = 0; u < canvas; ++u)
      for (int v = 0; v < canvas; ++v)
        if (m.at(u, v)) peak = std::max(peak, double(d.at(u, v)));

    ScalarField b = boundary_field(m);
    std::vector<double> errs;
    for (int u = 1; u < canvas - 1; ++u)
      for (int v = 1; v < canvas - 1; ++v) {
        float x = b.at(u, v);
        if (x < 0.2f || x > 0.8f) continue;
        double rec = recover_max_distance(b, u, v);
        errs.push_back(std::abs(rec - peak) / peak);
      }
    REQUIRE(errs.size() > 20);
    std::sort(errs.begin(), errs.end());
    CHECK(errs[errs.size() / 2] < 0.15);
  }
}

TEST_CASE("recovery rejects border, non-positive and flat pixels") {
  ScalarField ridge(9, 9);
  for (int u = 0; u < 9; ++u)
    for (int v = 0; v < 9; ++v)
      ridge.at(u, v) = float(1.0 - std::abs(u - 4) / 4.0);

  CHECK_THROWS_AS(recover_max_distance(ridge, 0, 4), Error);   // border
  CHECK_THROWS_AS(recover_max_distance(ridge, 4, 0), Error);   // border
  ScalarField flat_neg(5, 5);
  CHECK_THROWS_AS(recover_max_distance(flat_neg, 2, 2), Error);  // value <= 0
  try {
    recover_max_distance(ridge, 4, 4);  // symmetric peak, zero gradient
    FAIL("expected ZeroGradient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroGradient);
  }
  // Off the ridge the slope is 1/4 per pixel, so the estimate is exactly 4.
  CHECK(recover_max_distance(ridge, 2, 4) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("tightest bbox matches a direct scan") {
  Rng rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    BinaryMask m = random_mask(rng, 2 + int(rng.index(20)),
                               2 + int(rng.index(20)), 0.2);
    if (m.empty_fg()) {
      CHECK_THROWS_AS(tightest_bbox(m), Error);
      continue;
    }
    PixelBox got = tightest_bbox(m);
    int u1 = m.height, v1 = m.width, u2 = -1, v2 = -1;
    for (int u = 0; u < m.height; ++u)
      for (int v = 0; v < m.width; ++v)
        if (m.at(u, v)) {
          u1 = std::min(u1, u);
          v1 = std::min(v1, v);
          u2 = std::max(u2, u);
          v2 = std::max(v2, v);
        }
    CHECK(got == PixelBox{u1, v1, u2, v2});
  }
}

TEST_CASE("negative twin crop picks the largest clear strip") {
  SUBCASE("below wins when it is the largest") {
    PixelBox strip = negative_twin_crop(100, 80, {10, 10, 20, 20});
    CHECK(strip == PixelBox{21, 0, 99, 79});
  }
  SUBCASE("ties break above before below") {
    // Object vertically centered and nearly full-width: above and below
    // strips are congruent and dominate the side slivers.
    PixelBox strip = negative_twin_crop(30, 100, {10, 2, 19, 97});
    CHECK(strip == PixelBox{0, 0, 9, 99});
  }
  SUBCASE("left and right strips can win") {
    PixelBox strip = negative_twin_crop(20, 200, {0, 20, 19, 40});
    CHECK(strip == PixelBox{0, 41, 19, 199});
  }
  SUBCASE("a full-frame object leaves no strip") {
    CHECK_THROWS_AS(negative_twin_crop(10, 10, {0, 0, 9, 9}), Error);
  }
  SUBCASE("the strip never intersects the object box") {
    Rng rng(505);
    for (int trial = 0; trial < 40; ++trial) {
      int h = 10 + int(rng.index(60)), w = 10 + int(rng.index(60));
      int u1 = int(rng.index(std::uint64_t(h - 1)));
      int v1 = int(rng.index(std::uint64_t(w - 1)));
      int u2 = u1 + int(rng.index(std::uint64_t(h - u1)));
      int v2 = v1 + int(rng.index(std::uint64_t(w - v1)));
      PixelBox obj{u1, v1, u2, v2};
      if (u1 == 0 && v1 == 0 && u2 == h - 1 && v2 == w - 1) continue;
      PixelBox strip = negative_twin_crop(h, w, obj);
      bool overlap = strip.u1 <= obj.u2 && obj.u1 <= strip.u2 &&
                     strip.v1 <= obj.v2 && obj.v1 <= strip.v2;
      CHECK_FALSE(overlap);
      bool full_width = strip.v1 == 0 && strip.v2 == w - 1;
      bool full_height = strip.u1 == 0 && strip.u2 == h - 1;
      CHECK((full_width || full_height));
    }
  }
}

TEST_CASE("bilinear resize is corner-aligned and exact on linear ramps") {
  SUBCASE("identity at the same size") {
    Rng rng(606);
    ScalarField f(6, 5);
    for (float& x : f.data) x = float(rng.u01());
    ScalarField g = resize_bilinear(f, 6, 5);
    CHECK(g.data == f.data);
  }
  SUBCASE("linear ramp resamples exactly") {
    ScalarField f(4, 4);
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) f.at(u, v) = float(v);
    ScalarField g = resize_bilinear(f, 4, 7);
    for (int u = 0; u < 4; ++u)
      for (int j = 0; j < 7; ++j)
        CHECK(g.at(u, j) == doctest::Approx(j * 0.5).epsilon(1e-6));
  }
  SUBCASE("corners map to corners") {
    ScalarField f(3, 3);
    f.at(0, 0) = 1.f;
    f.at(0, 2) = 2.f;
    f.at(2, 0) = 3.f;
    f.at(2, 2) = 4.f;
    ScalarField g = resize_bilinear(f, 9, 11);
    CHECK(g.at(0, 0) == doctest::Approx(1.0));
    CHECK(g.at(0, 10) == doctest::Approx(2.0));
    CHECK(g.at(8, 0) == doctest::Approx(3.0));
    CHECK(g.at(8, 10) == doctest::Approx(4.0));
  }
  SUBCASE("vector fields resample both channels") {
    VectorField f(2, 2);
    f.set(0, 0, 0.f, 10.f);
    f.set(0, 1, 2.f, 10.f);
    f.set(1, 0, 4.f, 30.f);
    f.set(1, 1, 6.f, 30.f);
    VectorField g = resize_bilinear(f, 3, 3);
    CHECK(g.du(1, 1) == doctest::Approx(3.0));
    CHECK(g.dv(1, 1) == doctest::Approx(20.0));
  }
}

TEST_CASE("sample coordinates share endpoints between samplers") {
  CHECK(sample_coord(0, 10, 4) == doctest::Approx(0.0));
  CHECK(sample_coord(9, 10, 4) == doctest::Approx(3.0));
  CHECK(sample_coord(0, 1, 7) == doctest::Approx(0.0));  // degenerate dst
  CHECK(sample_coord(3, 8, 1) == doctest::Approx(0.0));  // degenerate src
  CHECK(sample_coord(2, 5, 9) == doctest::Approx(4.0));
}
