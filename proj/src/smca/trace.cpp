#include "trace.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>

#include "error.hpp"
#include "hash.hpp"
#include "numfmt.hpp"

namespace smca {
namespace {

constexpr std::string_view kFormatName = "smca-trace";

double q(double v) { return quantize(v, kTraceDigits); }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void header_error(const std::string& what) {
  throw DataError(DataErrorKind::header, "malformed trace header: " + what);
}

std::string row_name(std::size_t row, std::size_t line) {
  return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

}  // namespace

std::vector<std::string> trace_column_names() {
  std::vector<std::string> names{"t"};
  for (int i = 0; i < kMotorCount; ++i) names.push_back("m" + std::to_string(i));
  for (int i = 0; i < kMotorCount; ++i) names.push_back("a" + std::to_string(i));
  for (int i = 0; i < kPointCount; ++i) {
    names.push_back("x" + std::to_string(i));
    names.push_back("y" + std::to_string(i));
    names.push_back("h" + std::to_string(i));
  }
  names.push_back("vis6");
  return names;
}

void TraceLog::append(std::int64_t t, const CommandPair& commands,
                      const std::array<JointArray, kAgentCount>& angles, const Observation& observation) {
  TraceRow row;
  row.t = t;
  for (int a = 0; a < kAgentCount; ++a) {
    for (int j = 0; j < kJointsPerArm; ++j) {
      row.motors[point_id(a, j)] = commands[a][j];
      row.angles[point_id(a, j)] = angles[a][j];
    }
  }
  for (int i = 0; i < kPointCount - 1; ++i) row.arm_points[i] = observation.position[i];
  if (observation.object_visible) row.object_point = observation.position[kObjectPoint];
  row.haptic = observation.haptic;
  append(std::move(row));
}

void TraceLog::append(TraceRow row) {
  const std::int64_t expected = rows_.empty() ? 0 : rows_.back().t + 1;
  if (row.t != expected) {
    throw DataError(DataErrorKind::gap, "trace rows must be contiguous: expected t=" +
                                            std::to_string(expected) + ", got t=" + std::to_string(row.t));
  }
  for (auto& v : row.motors) v = q(v);
  for (auto& v : row.angles) v = q(v);
  for (auto& p : row.arm_points) p = {q(p.x), q(p.y)};
  if (row.object_point) row.object_point = Vec2{q(row.object_point->x), q(row.object_point->y)};
  for (auto& v : row.haptic) v = q(v);
  rows_.push_back(std::move(row));
}

std::string serialize_log(const TraceLog& log) {
  std::string body;
  body.reserve(log.size() * 260 + 256);
  const auto names = trace_column_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) body += ',';
    body += names[i];
  }
  body += '\n';
  for (const auto& r : log.rows()) {
    body += std::to_string(r.t);
    for (double m : r.motors) {
      body += ',';
      append_significant(body, m, kTraceDigits);
    }
    for (double a : r.angles) {
      body += ',';
      append_significant(body, a, kTraceDigits);
    }
    for (int i = 0; i < kPointCount; ++i) {
      const bool arm = i < kPointCount - 1;
      body += ',';
      if (arm) append_significant(body, r.arm_points[i].x, kTraceDigits);
      else if (r.object_point) append_significant(body, r.object_point->x, kTraceDigits);
      body += ',';
      if (arm) append_significant(body, r.arm_points[i].y, kTraceDigits);
      else if (r.object_point) append_significant(body, r.object_point->y, kTraceDigits);
      body += ',';
      append_significant(body, r.haptic[i], kTraceDigits);
    }
    body += r.object_visible() ? ",1\n" : ",0\n";
  }

  const auto& h = log.header();
  std::string out;
  out.reserve(body.size() + 512);
  out += "# format=" + std::string(kFormatName) + "\n";
  out += "# format_version=" + std::to_string(kTraceFormatVersion) + "\n";
  out += "# seed=" + std::to_string(h.seed) + "\n";
  out += "# config_hash=" + h.config_hash + "\n";
  out += "# dt=" + format_exact(h.dt) + "\n";
  out += "# v_norm_max=" + format_exact(h.v_norm_max) + "\n";
  out += "# speed_epsilon=" + format_exact(h.speed_epsilon) + "\n";
  out += "# channels=" + std::to_string(kTraceColumns) + "\n";
  out += "# rows=" + std::to_string(log.size()) + "\n";
  out += "# checksum=fnv1a64:" + fnv1a64_hex(body) + "\n";
  out += body;
  return out;
}

TraceLog parse_log(const std::string& text) {
  std::string_view rest(text);
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    const auto pos = rest.find('\n');
    line = rest.substr(0, pos);
    rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
    ++line_no;
    return true;
  };

  std::vector<std::pair<std::string, std::string>> fields;
  std::string_view line;
  std::string_view body;
  while (true) {
    const std::string_view before = rest;
    if (!next_line(line)) header_error("no column row");
    if (line.empty() || line.front() != '#') {
      body = before;
      break;
    }
    line.remove_prefix(1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      header_error("line " + std::to_string(line_no) + " is not key=value");
    }
    fields.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }

  auto get = [&](const std::string& key) -> const std::string& {
    for (const auto& [k, v] : fields) {
      if (k == key) return v;
    }
    header_error("missing key " + key);
  };
  auto get_double = [&](const std::string& key) {
    auto v = parse_double(get(key));
    if (!v) header_error("bad value for " + key);
    return *v;
  };
  auto get_int = [&](const std::string& key) {
    auto v = parse_int(get(key));
    if (!v || *v < 0) header_error("bad value for " + key);
    return *v;
  };

  if (get("format") != kFormatName) header_error("unknown format " + get("format"));
  if (get_int("format_version") != kTraceFormatVersion) header_error("unsupported format_version");
  if (get_int("channels") != kTraceColumns) {
    throw DataError(DataErrorKind::column_count,
                    "header declares " + get("channels") + " channels, expected " + std::to_string(kTraceColumns));
  }
  TraceHeader header;
  {
    const auto& s = get("seed");
    std::uint64_t seed = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) header_error("bad value for seed");
    header.seed = seed;
  }
  header.config_hash = get("config_hash");
  header.dt = get_double("dt");
  header.v_norm_max = get_double("v_norm_max");
  header.speed_epsilon = get_double("speed_epsilon");
  if (!(header.dt > 0.0)) header_error("dt must be positive");
  if (!(header.v_norm_max > 0.0)) header_error("v_norm_max must be positive");
  const auto declared_rows = get_int("rows");
  const auto& checksum = get("checksum");

  {
    const auto names = trace_column_names();
    const auto cols = split(line, ',');
    bool match = cols.size() == names.size();
    for (std::size_t i = 0; match && i < cols.size(); ++i) match = cols[i] == names[i];
    if (!match) {
      if (cols.size() != names.size()) {
        throw DataError(DataErrorKind::column_count, "column row has " + std::to_string(cols.size()) +
                                                         " columns, expected " + std::to_string(names.size()));
      }
      header_error("unexpected column names");
    }
  }

  TraceLog log(header);
  log.reserve(static_cast<std::size_t>(declared_rows));
  std::size_t row_index = 0;
  while (next_line(line)) {
    if (line.empty() && rest.empty()) break;
    const auto f = split(line, ',');
    const std::string where = row_name(row_index, line_no);
    if (f.size() != static_cast<std::size_t>(kTraceColumns)) {
      throw DataError(DataErrorKind::column_count, where + ": expected " + std::to_string(kTraceColumns) +
                                                       " fields, got " + std::to_string(f.size()));
    }
    auto num = [&](std::size_t i) {
      auto v = parse_double(f[i]);
      if (!v) throw DataError(DataErrorKind::parse, where + ": bad number in column " + std::to_string(i));
      return *v;
    };
    TraceRow r;
    auto t = parse_int(f[0]);
    if (!t) throw DataError(DataErrorKind::parse, where + ": bad step index");
    r.t = *t;
    std::size_t c = 1;
    for (auto& m : r.motors) m = num(c++);
    for (auto& a : r.angles) a = num(c++);
    for (int i = 0; i < kPointCount - 1; ++i) {
      r.arm_points[i] = {num(c), num(c + 1)};
      r.haptic[i] = num(c + 2);
      c += 3;
    }
    const auto vis = f[c + 3];
    if (vis != "0" && vis != "1") throw DataError(DataErrorKind::parse, where + ": vis6 must be 0 or 1");
    if (vis == "1") {
      r.object_point = Vec2{num(c), num(c + 1)};
    } else if (!f[c].empty() || !f[c + 1].empty()) {
      throw DataError(DataErrorKind::parse, where + ": occluded object must have empty x6,y6");
    }
    r.haptic[kObjectPoint] = num(c + 2);
    try {
      log.append(std::move(r));
    } catch (const DataError& e) {
      throw DataError(DataErrorKind::gap, where + ": " + e.what());
    }
    ++row_index;
  }

  if (static_cast<std::int64_t>(log.size()) != declared_rows) {
    throw DataError(DataErrorKind::parse, "header declares " + std::to_string(declared_rows) + " rows, found " +
                                              std::to_string(log.size()));
  }
  const std::string expected = "fnv1a64:" + fnv1a64_hex(body);
  if (checksum != expected) {
    throw DataError(DataErrorKind::checksum, "checksum mismatch: header " + checksum + ", content " + expected);
  }
  return log;
}

void write_log(const TraceLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::io, "cannot write " + path);
  const auto text = serialize_log(log);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError(DataErrorKind::io, "write failed for " + path);
}

TraceLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::io, "cannot read trace " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_log(ss.str());
}

Channel position_channel(const TraceLog& log, int point, bool y_axis) {
  Channel ch;
  ch.values.resize(log.size());
  ch.present.resize(log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& r = log[t];
    if (point < kObjectPoint) {
      ch.values[t] = y_axis ? r.arm_points[point].y : r.arm_points[point].x;
      ch.present[t] = 1;
    } else if (r.object_point) {
      ch.values[t] = y_axis ? r.object_point->y : r.object_point->x;
      ch.present[t] = 1;
    }
  }
  return ch;
}

Channel motor_channel(const TraceLog& log, int motor) {
  Channel ch;
  ch.values.resize(log.size());
  ch.present.assign(log.size(), 1);
  for (std::size_t t = 0; t < log.size(); ++t) ch.values[t] = log[t].motors[motor];
  return ch;
}

Channel haptic_channel(const TraceLog& log, int point) {
  Channel ch;
  ch.values.resize(log.size());
  ch.present.assign(log.size(), 1);
  for (std::size_t t = 0; t < log.size(); ++t) ch.values[t] = log[t].haptic[point];
  return ch;
}

DerivedChannels derive_channels(const TraceLog& log) {
  if (log.size() < 2) throw DataError(DataErrorKind::too_short, "log too short: need at least 2 rows");
  const auto& h = log.header();
  const std::size_t n = log.size();
  DerivedChannels d;
  d.dt = h.dt;
  d.v_norm_max = h.v_norm_max;

  auto blank = [n]() {
    Channel c;
    c.values.assign(n, 0.0);
    c.present.assign(n, 0);
    return c;
  };

  for (int i = 0; i < kPointCount; ++i) {
    const Channel px = position_channel(log, i, false);
    const Channel py = position_channel(log, i, true);
    for (auto* ch : {&d.raw_vx[i], &d.raw_vy[i], &d.vx[i], &d.vy[i], &d.speed[i], &d.angle[i]}) *ch = blank();
    for (std::size_t t = 1; t < n; ++t) {
      if (!px.has(t) || !px.has(t - 1)) continue;
      const double rvx = (px.values[t] - px.values[t - 1]) / h.dt;
      const double rvy = (py.values[t] - py.values[t - 1]) / h.dt;
      const double raw_speed = std::hypot(rvx, rvy);
      double scale = 1.0 / h.v_norm_max;
      const double nspeed = raw_speed * scale;
      if (nspeed > 1.0) scale /= nspeed;

      d.raw_vx[i].values[t] = rvx;
      d.raw_vy[i].values[t] = rvy;
      d.vx[i].values[t] = rvx * scale;
      d.vy[i].values[t] = rvy * scale;
      d.speed[i].values[t] = std::min(1.0, nspeed);
      for (auto* ch : {&d.raw_vx[i], &d.raw_vy[i], &d.vx[i], &d.vy[i], &d.speed[i]}) ch->present[t] = 1;

      if (raw_speed >= h.speed_epsilon && raw_speed > 0.0) {
        double b = std::atan2(rvy, rvx);
        if (b <= -std::numbers::pi) b = std::numbers::pi;
        d.angle[i].values[t] = b;
        d.angle[i].present[t] = 1;
      }
    }
  }
  return d;
}

}  // namespace smca
