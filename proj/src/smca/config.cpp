#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "hash.hpp"
#include "kinematics.hpp"
#include "numfmt.hpp"

namespace smca {
namespace {

std::string num(double v) { return format_exact(v); }

std::string interval_text(Interval i) { return "[" + num(i.lo) + ", " + num(i.hi) + "]"; }

void check_world(const WorldConfig& c, std::vector<std::string>& out) {
  for (int k = 0; k < kJointsPerArm; ++k) {
    if (!(c.link_lengths[k] > 0.0)) {
      out.push_back("nonpositive link length (link " + std::to_string(k) + ")");
    }
    if (!(c.joint_limits[k].lo <= c.joint_limits[k].hi)) {
      out.push_back("empty joint limit (joint " + std::to_string(k) + ")");
    }
  }
  if (!(c.object_radius > 0.0)) out.push_back("nonpositive object radius");
  if (!(c.object_mass > 0.0)) out.push_back("nonpositive object mass");
  if (!(c.dt > 0.0)) out.push_back("nonpositive dt");
  if (!(c.max_joint_speed > 0.0)) out.push_back("nonpositive max joint speed");
  if (!(c.haptic_gain > 0.0)) out.push_back("nonpositive haptic gain");
  if (!(c.probe_radius >= 0.0)) out.push_back("negative probe radius");
  if (!(c.object_friction >= 0.0 && c.object_friction < 1.0)) {
    out.push_back("object friction outside [0,1)");
  }

  if (!(c.world_x == Interval{-4.0, 4.0} && c.world_y == Interval{-2.0, 4.0})) {
    out.push_back("world bounds must be x in [-4,4] and y in [-2,4]");
  }
  const Interval wx{-4.0, 4.0};
  const Interval wy{-2.0, 4.0};

  if (!(c.rail_x_extent.lo < c.rail_x_extent.hi) || !wx.contains(c.rail_x_extent.lo) ||
      !wx.contains(c.rail_x_extent.hi)) {
    out.push_back("rail extent outside world bounds " + interval_text(c.rail_x_extent));
  }
  if (!wy.contains(c.rail_y)) out.push_back("rail outside world bounds");

  const Interval green = c.box_regions[0];
  const Interval red = c.box_regions[1];
  for (int b = 0; b < 2; ++b) {
    const Interval box = c.box_regions[b];
    if (!(box.lo < box.hi) || !c.rail_x_extent.contains(box.lo) ||
        !c.rail_x_extent.contains(box.hi)) {
      out.push_back(std::string("box outside rail extent (") + (b == 0 ? "green" : "red") + ")");
    }
  }
  if (!(green.hi < red.lo || red.hi < green.lo)) {
    out.push_back("boxes overlap");
  } else if (red.hi < green.lo) {
    out.push_back("green box not left of red box");
  }

  const double reach = c.link_lengths[0] + c.link_lengths[1] + c.link_lengths[2];
  for (int a = 0; a < kAgentCount; ++a) {
    const Vec2 f = c.arm_facing[a];
    if (std::abs(norm(f) - 1.0) > 1e-9) {
      out.push_back("non-unit facing direction (arm " + std::to_string(a) + ")");
    }
    if (!wx.contains(c.arm_base[a].x) || !wy.contains(c.arm_base[a].y)) {
      out.push_back("arm base outside world bounds (arm " + std::to_string(a) + ")");
    }
    const double distance = std::abs(c.arm_base[a].y - c.rail_y);
    if (!(distance < reach)) {
      out.push_back("unreachable rail (arm " + std::to_string(a) + ": distance " + num(distance) +
                    " >= reach " + num(reach) + ")");
    }
    for (int k = 0; k < kJointsPerArm; ++k) {
      if (!c.joint_limits[k].contains(c.initial_angles[a][k])) {
        out.push_back("initial angle outside joint limit (arm " + std::to_string(a) + ", joint " +
                      std::to_string(k) + ")");
      }
    }
  }

  // Sweep a grid over the joint-limit box, extremes included.
  bool sane_limits = true;
  for (const auto& lim : c.joint_limits) sane_limits = sane_limits && lim.lo <= lim.hi;
  if (sane_limits && out.empty()) {
    constexpr int kGrid = 13;
    auto sample = [&](int k, int i) {
      const auto& lim = c.joint_limits[k];
      return lim.lo + (lim.hi - lim.lo) * static_cast<double>(i) / (kGrid - 1);
    };
    bool inside = true;
    for (int a = 0; a < kAgentCount && inside; ++a) {
      for (int i = 0; i < kGrid && inside; ++i) {
        for (int j = 0; j < kGrid && inside; ++j) {
          for (int l = 0; l < kGrid && inside; ++l) {
            const JointArray q{sample(0, i), sample(1, j), sample(2, l)};
            for (Vec2 p : forward_kinematics(c.arm_base[a], c.arm_facing[a], c.link_lengths, q)) {
              if (!wx.contains(p.x) || !wy.contains(p.y)) {
                inside = false;
                out.push_back("workspace exceeds world bounds (arm " + std::to_string(a) + ")");
                break;
              }
            }
          }
        }
      }
    }
  }
}

void check_babble(const BabblePolicy& p, std::vector<std::string>& out) {
  if (p.resample_period < 1) out.push_back("resample period below 1");
  if (!(p.amplitude > 0.0 && p.amplitude <= 1.0)) out.push_back("amplitude outside (0,1]");
  for (int a = 0; a < kAgentCount; ++a) {
    if (!(p.activity_bias[a] >= 0.0 && p.activity_bias[a] <= 1.0)) {
      out.push_back("activity bias outside [0,1] (agent " + std::to_string(a) + ")");
    }
  }
}

void check_trace(const TraceSettings& t, std::vector<std::string>& out) {
  if (!(t.v_norm_max > 0.0)) out.push_back("nonpositive v_norm_max");
  if (!(t.speed_epsilon >= 0.0)) out.push_back("negative speed epsilon");
}

void throw_if(std::vector<std::string> rules) {
  if (!rules.empty()) throw ValidationError(std::move(rules));
}

// ---- YAML reading ---------------------------------------------------------

[[noreturn]] void bad_value(const std::string& key, const std::string& expected) {
  throw ValidationError({"bad value for " + key + ": expected " + expected});
}

double read_number(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad_value(key, "a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    bad_value(key, "a number");
  }
}

template <std::size_t N>
std::array<double, N> read_numbers(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != N) bad_value(key, "a sequence of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = read_number(n[i], key);
  return out;
}

Interval read_interval(const YAML::Node& n, const std::string& key) {
  auto v = read_numbers<2>(n, key);
  return {v[0], v[1]};
}

Vec2 read_point(const YAML::Node& n, const std::string& key) {
  auto v = read_numbers<2>(n, key);
  return {v[0], v[1]};
}

template <typename Fn>
void for_each_key(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed,
                  Fn&& fn) {
  if (!map.IsMap()) bad_value(section, "a mapping");
  std::vector<std::string> unknown;
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      unknown.push_back("unknown key " + (section.empty() ? key : section + "." + key));
      continue;
    }
    fn(key, kv.second);
  }
  throw_if(std::move(unknown));
}

void read_world(const YAML::Node& node, WorldConfig& w) {
  static const std::set<std::string> keys{
      "arm_base",      "arm_facing",     "link_lengths",    "joint_limits", "initial_angles",
      "max_joint_speed", "rail_y",       "rail_x_extent",   "object_radius", "object_mass",
      "object_friction", "probe_radius", "box_regions",     "dt",           "haptic_gain",
      "world_bounds"};
  for_each_key(node, "world", keys, [&](const std::string& key, const YAML::Node& v) {
    const std::string name = "world." + key;
    if (key == "arm_base" || key == "arm_facing") {
      if (!v.IsSequence() || v.size() != 2) bad_value(name, "two points");
      auto& dst = key == "arm_base" ? w.arm_base : w.arm_facing;
      for (int a = 0; a < 2; ++a) dst[a] = read_point(v[a], name);
    } else if (key == "link_lengths") {
      w.link_lengths = read_numbers<3>(v, name);
    } else if (key == "joint_limits") {
      if (!v.IsSequence() || v.size() != 3) bad_value(name, "three intervals");
      for (int k = 0; k < 3; ++k) w.joint_limits[k] = read_interval(v[k], name);
    } else if (key == "initial_angles") {
      if (!v.IsSequence() || v.size() != 2) bad_value(name, "two angle triples");
      for (int a = 0; a < 2; ++a) w.initial_angles[a] = read_numbers<3>(v[a], name);
    } else if (key == "max_joint_speed") {
      w.max_joint_speed = read_number(v, name);
    } else if (key == "rail_y") {
      w.rail_y = read_number(v, name);
    } else if (key == "rail_x_extent") {
      w.rail_x_extent = read_interval(v, name);
    } else if (key == "object_radius") {
      w.object_radius = read_number(v, name);
    } else if (key == "object_mass") {
      w.object_mass = read_number(v, name);
    } else if (key == "object_friction") {
      w.object_friction = read_number(v, name);
    } else if (key == "probe_radius") {
      w.probe_radius = read_number(v, name);
    } else if (key == "box_regions") {
      for_each_key(v, name, {"green", "red"}, [&](const std::string& box, const YAML::Node& iv) {
        w.box_regions[box == "green" ? 0 : 1] = read_interval(iv, name + "." + box);
      });
    } else if (key == "dt") {
      w.dt = read_number(v, name);
    } else if (key == "haptic_gain") {
      w.haptic_gain = read_number(v, name);
    } else if (key == "world_bounds") {
      for_each_key(v, name, {"x", "y"}, [&](const std::string& axis, const YAML::Node& iv) {
        (axis == "x" ? w.world_x : w.world_y) = read_interval(iv, name + "." + axis);
      });
    }
  });
}

void read_babble(const YAML::Node& node, BabblePolicy& b) {
  for_each_key(node, "babble", {"resample_period", "amplitude", "activity_bias", "rng_stream_id"},
               [&](const std::string& key, const YAML::Node& v) {
                 const std::string name = "babble." + key;
                 if (key == "resample_period") {
                   const double p = read_number(v, name);
                   if (p != std::floor(p)) bad_value(name, "an integer");
                   b.resample_period = static_cast<std::int64_t>(p);
                 } else if (key == "amplitude") {
                   b.amplitude = read_number(v, name);
                 } else if (key == "activity_bias") {
                   b.activity_bias = read_numbers<2>(v, name);
                 } else if (key == "rng_stream_id") {
                   auto ids = read_numbers<2>(v, name);
                   for (int a = 0; a < 2; ++a) {
                     if (ids[a] < 0 || ids[a] != std::floor(ids[a])) bad_value(name, "nonnegative integers");
                     b.rng_stream_id[a] = static_cast<std::uint64_t>(ids[a]);
                   }
                 }
               });
}

void read_trace(const YAML::Node& node, TraceSettings& t) {
  for_each_key(node, "trace", {"v_norm_max", "speed_epsilon"},
               [&](const std::string& key, const YAML::Node& v) {
                 if (key == "v_norm_max") t.v_norm_max = read_number(v, "trace." + key);
                 if (key == "speed_epsilon") t.speed_epsilon = read_number(v, "trace." + key);
               });
}

}  // namespace

std::vector<std::string> violations(const SimConfig& config) {
  std::vector<std::string> out;
  if (config.config_version != kConfigVersion) {
    out.push_back("unsupported config_version " + std::to_string(config.config_version));
  }
  check_world(config.world, out);
  check_babble(config.babble, out);
  check_trace(config.trace, out);
  return out;
}

void validate(const WorldConfig& config) {
  std::vector<std::string> out;
  check_world(config, out);
  throw_if(std::move(out));
}

void validate(const BabblePolicy& policy) {
  std::vector<std::string> out;
  check_babble(policy, out);
  throw_if(std::move(out));
}

void validate(const TraceSettings& settings) {
  std::vector<std::string> out;
  check_trace(settings, out);
  throw_if(std::move(out));
}

void validate(const SimConfig& config) { throw_if(violations(config)); }

SimConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError({std::string("malformed config: ") + e.what()});
  }
  SimConfig cfg;
  if (!root.IsMap()) throw ValidationError({"malformed config: top level must be a mapping"});
  if (!root["config_version"]) throw ValidationError({"missing config_version"});
  for_each_key(root, "", {"config_version", "world", "babble", "trace"},
               [&](const std::string& key, const YAML::Node& v) {
                 if (key == "config_version") {
                   const double ver = read_number(v, key);
                   cfg.config_version = static_cast<int>(ver);
                   if (ver != kConfigVersion) {
                     throw ValidationError({"unsupported config_version " + format_exact(ver)});
                   }
                 } else if (key == "world") {
                   read_world(v, cfg.world);
                 } else if (key == "babble") {
                   read_babble(v, cfg.babble);
                 } else if (key == "trace") {
                   read_trace(v, cfg.trace);
                 }
               });
  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot read config file " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const SimConfig& c) {
  const auto& w = c.world;
  auto pt = [](Vec2 p) { return "[" + num(p.x) + ", " + num(p.y) + "]"; };
  auto tri = [](const JointArray& a) { return "[" + num(a[0]) + ", " + num(a[1]) + ", " + num(a[2]) + "]"; };
  std::ostringstream o;
  o << "config_version: " << c.config_version << "\n";
  o << "world:\n";
  o << "  arm_base: [" << pt(w.arm_base[0]) << ", " << pt(w.arm_base[1]) << "]\n";
  o << "  arm_facing: [" << pt(w.arm_facing[0]) << ", " << pt(w.arm_facing[1]) << "]\n";
  o << "  link_lengths: " << tri(w.link_lengths) << "\n";
  o << "  joint_limits: [" << interval_text(w.joint_limits[0]) << ", " << interval_text(w.joint_limits[1])
    << ", " << interval_text(w.joint_limits[2]) << "]\n";
  o << "  initial_angles: [" << tri(w.initial_angles[0]) << ", " << tri(w.initial_angles[1]) << "]\n";
  o << "  max_joint_speed: " << num(w.max_joint_speed) << "\n";
  o << "  rail_y: " << num(w.rail_y) << "\n";
  o << "  rail_x_extent: " << interval_text(w.rail_x_extent) << "\n";
  o << "  object_radius: " << num(w.object_radius) << "\n";
  o << "  object_mass: " << num(w.object_mass) << "\n";
  o << "  object_friction: " << num(w.object_friction) << "\n";
  o << "  probe_radius: " << num(w.probe_radius) << "\n";
  o << "  box_regions:\n";
  o << "    green: " << interval_text(w.box_regions[0]) << "\n";
  o << "    red: " << interval_text(w.box_regions[1]) << "\n";
  o << "  dt: " << num(w.dt) << "\n";
  o << "  haptic_gain: " << num(w.haptic_gain) << "\n";
  o << "  world_bounds:\n";
  o << "    x: " << interval_text(w.world_x) << "\n";
  o << "    y: " << interval_text(w.world_y) << "\n";
  o << "babble:\n";
  o << "  resample_period: " << c.babble.resample_period << "\n";
  o << "  amplitude: " << num(c.babble.amplitude) << "\n";
  o << "  activity_bias: [" << num(c.babble.activity_bias[0]) << ", " << num(c.babble.activity_bias[1]) << "]\n";
  o << "  rng_stream_id: [" << c.babble.rng_stream_id[0] << ", " << c.babble.rng_stream_id[1] << "]\n";
  o << "trace:\n";
  o << "  v_norm_max: " << num(c.trace.v_norm_max) << "\n";
  o << "  speed_epsilon: " << num(c.trace.speed_epsilon) << "\n";
  return o.str();
}

std::string canonical_text(const SimConfig& c) {
  // YAML rendering is already canonical: fixed key order, exact numbers.
  return to_yaml(c);
}

std::string config_hash(const SimConfig& config) { return fnv1a64_hex(canonical_text(config)); }

}  // namespace smca
