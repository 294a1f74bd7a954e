#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "kinematics.hpp"

namespace smca {

// Commanded joint velocities (rad/s) for one agent.
using MotorCommand = JointArray;
using CommandPair = std::array<MotorCommand, kAgentCount>;

struct ArmState {
  JointArray angles{};
  JointArray velocities{};  // last applied command after the speed clamp

  friend bool operator==(const ArmState&, const ArmState&) = default;
};

struct ObjectState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

enum class ContactTarget { object, arm_point };

struct ContactEvent {
  std::int64_t step = 0;
  int sensory_point = 0;  // arm point involved (0..5)
  ContactTarget target = ContactTarget::object;
  int target_point = kObjectPoint;  // 6 for the object, else the other arm's point
  double impulse = 0.0;
};

struct Observation {
  std::array<Vec2, kPointCount> position{};
  std::array<double, kPointCount> haptic{};
  bool object_visible = true;
};

struct WorldState {
  WorldConfig config;
  std::array<ArmState, kAgentCount> arms{};
  ObjectState object{};
  std::array<double, kPointCount> haptic{};
  std::int64_t step = 0;

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.arms == b.arms && a.object == b.object && a.haptic == b.haptic && a.step == b.step;
  }
};

struct StepResult {
  WorldState world;
  std::vector<ContactEvent> contacts;
};

// The seed is accepted for interface symmetry with the babbler; the built
// world never depends on it.
WorldState build_world(const WorldConfig& config, std::uint64_t seed = 0);

ArmPoints arm_points(const WorldState& world, int agent);

StepResult step(WorldState world, const CommandPair& commands);

Observation observe(const WorldState& world);

inline constexpr int point_id(int agent, int joint) { return agent * kJointsPerArm + joint; }

}  // namespace smca
