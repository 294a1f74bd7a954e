#include "world.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace smca {
namespace {

struct SegmentHit {
  Vec2 closest_now;
  Vec2 closest_before;
  double distance = 0.0;
  int segment = 0;
  double u = 0.0;
};

// Segment k runs from joint k-1 (the base for k = 0) to joint k.
Vec2 segment_start(Vec2 base, const ArmPoints& pts, int k) { return k == 0 ? base : pts[k - 1]; }

// Sensory point credited with a contact on segment k at parameter u. The
// base is not a sensory point, so segment 0 always reports joint 0.
int credited_joint(int k, double u) { return (k == 0 || u >= 0.5) ? k : k - 1; }

std::optional<SegmentHit> nearest_segment(Vec2 base, const ArmPoints& before, const ArmPoints& now,
                                          Vec2 target, double reach) {
  std::optional<SegmentHit> best;
  for (int k = 0; k < kJointsPerArm; ++k) {
    const Vec2 a = segment_start(base, now, k);
    const Vec2 b = now[k];
    const double u = closest_parameter(a, b, target);
    const Vec2 c = lerp(a, b, u);
    const double d = norm(target - c);
    if (d < reach && (!best || d < best->distance)) {
      const Vec2 c_before = lerp(segment_start(base, before, k), before[k], u);
      best = SegmentHit{c, c_before, d, k, u};
    }
  }
  return best;
}

double haptic_of(double gain, double impulse) { return std::min(1.0, gain * impulse); }

}  // namespace

WorldState build_world(const WorldConfig& config, std::uint64_t /*seed*/) {
  validate(config);
  WorldState w;
  w.config = config;
  for (int a = 0; a < kAgentCount; ++a) w.arms[a].angles = config.initial_angles[a];
  w.object.x = config.rail_x_extent.center();
  w.object.y = config.rail_y;
  return w;
}

ArmPoints arm_points(const WorldState& world, int agent) {
  const auto& c = world.config;
  return forward_kinematics(c.arm_base[agent], c.arm_facing[agent], c.link_lengths,
                            world.arms[agent].angles);
}

StepResult step(WorldState world, const CommandPair& commands) {
  const auto& cfg = world.config;
  const double dt = cfg.dt;
  const std::int64_t t = world.step;

  std::array<ArmPoints, kAgentCount> before{arm_points(world, 0), arm_points(world, 1)};

  for (int a = 0; a < kAgentCount; ++a) {
    for (int j = 0; j < kJointsPerArm; ++j) {
      const double m = std::clamp(commands[a][j], -cfg.max_joint_speed, cfg.max_joint_speed);
      world.arms[a].velocities[j] = m;
      world.arms[a].angles[j] = cfg.joint_limits[j].clamp(world.arms[a].angles[j] + m * dt);
    }
  }
  std::array<ArmPoints, kAgentCount> now{arm_points(world, 0), arm_points(world, 1)};

  std::vector<ContactEvent> contacts;
  std::array<double, kPointCount> haptic{};

  // Arm -> object pushes along the rail. Arms are processed in index order
  // against the object velocity left by the previous one.
  const Vec2 centre{world.object.x, world.object.y};
  for (int a = 0; a < kAgentCount; ++a) {
    auto hit = nearest_segment(cfg.arm_base[a], before[a], now[a], centre,
                               cfg.object_radius + cfg.probe_radius);
    if (!hit) continue;
    const double point_vx = (hit->closest_now.x - hit->closest_before.x) / dt;
    double side = centre.x - hit->closest_now.x;
    if (side == 0.0) side = point_vx;
    const double toward = side > 0.0 ? 1.0 : (side < 0.0 ? -1.0 : 0.0);
    const double closing = toward * (point_vx - world.object.vx);
    double impulse = 0.0;
    if (closing > 0.0) {
      impulse = cfg.object_mass * closing;
      world.object.vx += toward * impulse / cfg.object_mass;
    }
    const int sp = point_id(a, credited_joint(hit->segment, hit->u));
    contacts.push_back({t, sp, ContactTarget::object, kObjectPoint, impulse});
    const double h = haptic_of(cfg.haptic_gain, impulse);
    haptic[sp] = std::max(haptic[sp], h);
    haptic[kObjectPoint] = std::max(haptic[kObjectPoint], h);
  }

  // Arm <-> arm touches: kinematic, reported with a unit-mass closing impulse.
  const double touch = 2.0 * cfg.probe_radius;
  if (touch > 0.0) {
    for (int a = 0; a < kAgentCount; ++a) {
      const int b = 1 - a;
      for (int j = 0; j < kJointsPerArm; ++j) {
        auto hit = nearest_segment(cfg.arm_base[b], before[b], now[b], now[a][j], touch);
        if (!hit) continue;
        const Vec2 v_point = (1.0 / dt) * (now[a][j] - before[a][j]);
        const Vec2 v_other = (1.0 / dt) * (hit->closest_now - hit->closest_before);
        const Vec2 sep = now[a][j] - hit->closest_now;
        const double len = norm(sep);
        double impulse = 0.0;
        if (len > 0.0) impulse = std::max(0.0, -dot(v_point - v_other, (1.0 / len) * sep));
        const int sp = point_id(a, j);
        const int other = point_id(b, credited_joint(hit->segment, hit->u));
        contacts.push_back({t, sp, ContactTarget::arm_point, other, impulse});
        const double h = haptic_of(cfg.haptic_gain, impulse);
        haptic[sp] = std::max(haptic[sp], h);
        haptic[other] = std::max(haptic[other], h);
      }
    }
  }

  auto& obj = world.object;
  obj.x += obj.vx * dt;
  obj.vx *= (1.0 - cfg.object_friction);
  if (obj.x <= cfg.rail_x_extent.lo || obj.x >= cfg.rail_x_extent.hi) {
    obj.x = cfg.rail_x_extent.clamp(obj.x);
    obj.vx = 0.0;
  }
  obj.y = cfg.rail_y;

  world.haptic = haptic;
  world.step = t + 1;
  return {std::move(world), std::move(contacts)};
}

Observation observe(const WorldState& world) {
  Observation o;
  for (int a = 0; a < kAgentCount; ++a) {
    const auto pts = arm_points(world, a);
    for (int j = 0; j < kJointsPerArm; ++j) o.position[point_id(a, j)] = pts[j];
  }
  o.position[kObjectPoint] = {world.object.x, world.object.y};
  o.haptic = world.haptic;
  const auto& boxes = world.config.box_regions;
  o.object_visible = !(boxes[0].contains(world.object.x) || boxes[1].contains(world.object.x));
  return o;
}

}  // namespace smca
