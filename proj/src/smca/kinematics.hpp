#pragma once

#include <array>

#include "config.hpp"
#include "geometry.hpp"

namespace smca {

using ArmPoints = std::array<Vec2, kJointsPerArm>;

// Planar serial chain. Link k points along `facing` rotated by the cumulative
// joint angle a_0 + ... + a_k; returns the distal endpoint of each link.
inline ArmPoints forward_kinematics(Vec2 base, Vec2 facing, const JointArray& link_lengths,
                                    const JointArray& joint_angles) {
  ArmPoints out{};
  Vec2 p = base;
  double cumulative = 0.0;
  for (int k = 0; k < kJointsPerArm; ++k) {
    cumulative += joint_angles[k];
    p = p + link_lengths[k] * rotate(facing, cumulative);
    out[k] = p;
  }
  return out;
}

}  // namespace smca
