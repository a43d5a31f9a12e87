#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "sggmech/geometry.hpp"
#include "sggmech/rng.hpp"

namespace testsupport {

inline sggmech::BoundingBox random_box(sggmech::Rng& rng, double extent = 10.0) {
  const double w = rng.uniform(0.0, extent / 2.0);
  const double h = rng.uniform(0.0, extent / 2.0);
  const double x = rng.uniform(0.0, extent - w);
  const double y = rng.uniform(0.0, extent - h);
  return sggmech::make_box(x, y, x + w, y + h);
}

// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sggmech_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
