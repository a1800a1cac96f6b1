#pragma once

#include <optional>
#include <vector>

#include "voxpaf/common.hpp"

namespace voxpaf {

struct Joint {
  Point3 position;          // world coordinates, meters
  double confidence = 1.0;  // in [0, 1]
};

// One person's pose: per layout joint an optional labeled 3D point.
struct Skeleton {
  std::vector<std::optional<Joint>> joints;

  int present_count() const {
    int n = 0;
    for (const auto& j : joints)
      if (j.has_value()) ++n;
    return n;
  }
};

}  // namespace voxpaf
