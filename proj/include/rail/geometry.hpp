#pragma once

#include <Eigen/Core>
#include <string>

#include "rail/error.hpp"

namespace rail {

using Vec3 = Eigen::Vector3d;

struct RoomGeometry {
  Vec3 dims_m{5.0, 5.0, 4.0};
  double speed_of_sound_mps = 340.0;

  void validate() const {
    if (!(dims_m.array() > 0.0).all() || !dims_m.allFinite()) {
      throw Error(Errc::invalid_config, "room_dims: every dimension must be > 0");
    }
    if (!(speed_of_sound_mps >= 300.0 && speed_of_sound_mps <= 400.0)) {
      throw Error(Errc::invalid_config, "speed_of_sound_mps: must lie in [300, 400]");
    }
  }

  /// Closed box [0, L] on every axis.
  bool contains(const Vec3& p) const {
    return p.allFinite() && (p.array() >= 0.0).all() && (p.array() <= dims_m.array()).all();
  }

  bool strictly_contains(const Vec3& p) const {
    return p.allFinite() && (p.array() > 0.0).all() && (p.array() < dims_m.array()).all();
  }

  /// Inside the room shrunk by `margin` on every face.
  bool contains_with_margin(const Vec3& p, double margin) const {
    return p.allFinite() && (p.array() >= margin).all() && (p.array() <= dims_m.array() - margin).all();
  }
};

inline std::string to_string(const Vec3& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")";
}

}  // namespace rail
