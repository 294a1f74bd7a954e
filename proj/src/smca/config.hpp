#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace smca {

inline constexpr int kConfigVersion = 1;
inline constexpr int kAgentCount = 2;
inline constexpr int kJointsPerArm = 3;
inline constexpr int kPointCount = 7;
inline constexpr int kObjectPoint = 6;
inline constexpr int kMotorCount = kAgentCount * kJointsPerArm;

using JointArray = std::array<double, kJointsPerArm>;

// Physical layout of the two-arm scene. Index 0 is the bottom agent, index 1
// the top agent.
struct WorldConfig {
  std::array<Vec2, kAgentCount> arm_base{{{0.0, -1.0}, {0.0, 3.0}}};
  std::array<Vec2, kAgentCount> arm_facing{{{0.0, 1.0}, {0.0, -1.0}}};
  JointArray link_lengths{1.0, 1.0, 1.0};
  std::array<Interval, kJointsPerArm> joint_limits{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  std::array<JointArray, kAgentCount> initial_angles{};
  double max_joint_speed = 1.0;  // rad/s
  double rail_y = 1.0;
  Interval rail_x_extent{-2.0, 2.0};
  double object_radius = 0.15;
  double object_mass = 1.0;
  double object_friction = 0.5;  // fraction of velocity lost per step
  double probe_radius = 0.05;
  std::array<Interval, 2> box_regions{{{-2.0, -1.0}, {1.0, 2.0}}};  // green, red
  double dt = 1.0 / 60.0;
  double haptic_gain = 2.0;
  Interval world_x{-4.0, 4.0};
  Interval world_y{-2.0, 4.0};
};

struct BabblePolicy {
  std::int64_t resample_period = 30;  // steps
  double amplitude = 1.0;             // fraction of max_joint_speed
  std::array<double, kAgentCount> activity_bias{0.5, 0.9};
  std::array<std::uint64_t, kAgentCount> rng_stream_id{0, 1};
};

struct TraceSettings {
  double v_norm_max = 5.0;      // units/s mapped to normalized speed 1
  double speed_epsilon = 1e-4;  // units/s below which movement angle is undefined
};

struct SimConfig {
  int config_version = kConfigVersion;
  WorldConfig world;
  BabblePolicy babble;
  TraceSettings trace;
};

// Throws ValidationError listing every violated rule.
void validate(const WorldConfig& config);
void validate(const BabblePolicy& policy);
void validate(const TraceSettings& settings);
void validate(const SimConfig& config);

// Rule names (without detail) violated by the config; empty when valid.
std::vector<std::string> violations(const SimConfig& config);

// Parses the YAML config format. Missing keys keep their defaults; unknown
// keys and a wrong config_version are validation errors.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string to_yaml(const SimConfig& config);

// Canonical key=value dump of every field, and its FNV-1a fingerprint.
std::string canonical_text(const SimConfig& config);
std::string config_hash(const SimConfig& config);

}  // namespace smca
