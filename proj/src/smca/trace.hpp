#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "world.hpp"

namespace smca {

inline constexpr int kTraceDigits = 9;
inline constexpr int kTraceFormatVersion = 1;
// t, m0..m5, a0..a5, (x,y,h) per point, vis6
inline constexpr int kTraceColumns = 1 + kMotorCount + kMotorCount + 3 * kPointCount + 1;

struct TraceHeader {
  std::uint64_t seed = 0;
  std::string config_hash;
  double dt = 1.0 / 60.0;
  double v_norm_max = 5.0;
  double speed_epsilon = 1e-4;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

// One step of the log. Values are stored at the file's precision so that a
// written log reads back identical.
struct TraceRow {
  std::int64_t t = 0;
  std::array<double, kMotorCount> motors{};
  std::array<double, kMotorCount> angles{};
  std::array<Vec2, kPointCount - 1> arm_points{};
  std::optional<Vec2> object_point;  // empty while occluded
  std::array<double, kPointCount> haptic{};

  bool object_visible() const { return object_point.has_value(); }
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

class TraceLog {
 public:
  TraceLog() = default;
  explicit TraceLog(TraceHeader header) : header_(std::move(header)) {}

  const TraceHeader& header() const { return header_; }
  const std::vector<TraceRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const TraceRow& operator[](std::size_t i) const { return rows_[i]; }

  // Throws DataError(gap) unless t == last t + 1 (or 0 on an empty log).
  void append(std::int64_t t, const CommandPair& commands, const std::array<JointArray, kAgentCount>& angles,
              const Observation& observation);
  void append(TraceRow row);

  void reserve(std::size_t n) { rows_.reserve(n); }

  friend bool operator==(const TraceLog&, const TraceLog&) = default;

 private:
  TraceHeader header_;
  std::vector<TraceRow> rows_;
};

std::vector<std::string> trace_column_names();

std::string serialize_log(const TraceLog& log);
TraceLog parse_log(const std::string& text);
void write_log(const TraceLog& log, const std::string& path);
TraceLog read_log(const std::string& path);

// A time series with an explicit presence mask.
struct Channel {
  std::vector<double> values;
  std::vector<std::uint8_t> present;

  std::size_t size() const { return values.size(); }
  bool has(std::size_t t) const { return present[t] != 0; }
};

struct DerivedChannels {
  double dt = 0.0;
  double v_norm_max = 0.0;
  std::array<Channel, kPointCount> raw_vx, raw_vy;  // units/s
  std::array<Channel, kPointCount> vx, vy;          // normalized, ||v|| <= 1
  std::array<Channel, kPointCount> speed;           // normalized
  std::array<Channel, kPointCount> angle;           // (-pi, pi]
};

// Backward finite differences of recorded positions. Needs >= 2 rows.
DerivedChannels derive_channels(const TraceLog& log);

Channel position_channel(const TraceLog& log, int point, bool y_axis);
Channel motor_channel(const TraceLog& log, int motor);
Channel haptic_channel(const TraceLog& log, int point);

}  // namespace smca
