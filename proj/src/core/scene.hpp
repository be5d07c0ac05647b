#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace cbr {

// Ground-truth scene: binary instance masks over a shared canvas. Instance
// ids are positions in the vector (lowest id wins pixel ownership when masks
// overlap).
struct Scene {
  std::int64_t id = 0;
  int height = 0;
  int width = 0;
  std::vector<BinaryMask> instances;
};

using SceneSet = std::vector<Scene>;

}  // namespace cbr
