#include "pipeline.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "babble.hpp"
#include "error.hpp"
#include "hash.hpp"

namespace smca {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) throw DataError(DataErrorKind::io, "write failed for " + path);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(DataErrorKind::io, "cannot create directory " + dir.string() + ": " + ec.message());
}

// Merges one stage's outputs into <dir>/manifest.json. Only the manifest is
// rewritten; artifacts of other stages are left alone.
void record_stage(const fs::path& dir, const std::string& stage, const std::vector<fs::path>& outputs,
                  const TraceHeader& source, std::int64_t steps) {
  const fs::path path = dir / kManifestFileName;
  ordered_json m;
  if (fs::exists(path)) {
    try {
      m = ordered_json::parse(read_text(path.string()));
    } catch (const nlohmann::json::exception&) {
      m = ordered_json::object();
    }
  }
  m["tool"] = "smca";
  m["tool_version"] = tool_version();
  m["config_hash"] = source.config_hash;
  m["seed"] = source.seed;
  m["steps"] = steps;
  m["stages"][stage] = {{"completed", true}, {"finished_at", utc_now()}};
  for (const auto& p : outputs) {
    m["outputs"][p.filename().string()] = {{"stage", stage}, {"fnv1a64", file_hash(p.string())}};
  }
  write_text(path.string(), m.dump(2) + "\n");
}

ordered_json points_json(const std::vector<int>& pts) { return ordered_json(pts); }

}  // namespace

std::string tool_version() { return SMCA_VERSION; }

std::string file_hash(const std::string& path) { return fnv1a64_hex(read_text(path)); }

SimConfig resolve_config(const std::string& config_ref) {
  if (config_ref == "default") {
    SimConfig cfg;
    validate(cfg);
    return cfg;
  }
  return load_config(config_ref);
}

TraceLog simulate(const SimConfig& config, std::uint64_t seed, std::int64_t steps,
                  std::vector<ContactEvent>* contacts) {
  if (steps < 1) throw UsageError("steps must be at least 1");
  validate(config);
  WorldState world = build_world(config.world, seed);
  Babbler babbler(config.babble, config.world.max_joint_speed, seed);

  TraceHeader header;
  header.seed = seed;
  header.config_hash = config_hash(config);
  header.dt = config.world.dt;
  header.v_norm_max = config.trace.v_norm_max;
  header.speed_epsilon = config.trace.speed_epsilon;
  TraceLog log(header);
  log.reserve(static_cast<std::size_t>(steps));

  for (std::int64_t t = 0; t < steps; ++t) {
    auto result = step(std::move(world), babbler.commands(t));
    world = std::move(result.world);
    if (contacts) contacts->insert(contacts->end(), result.contacts.begin(), result.contacts.end());
    const CommandPair applied{world.arms[0].velocities, world.arms[1].velocities};
    log.append(t, applied, {world.arms[0].angles, world.arms[1].angles}, observe(world));
  }
  return log;
}

std::vector<std::string> cmd_simulate(const SimulateRequest& req) {
  if (req.steps < 1) throw UsageError("--steps must be at least 1");
  if (req.out_dir.empty()) throw UsageError("--out is required");
  const SimConfig config = resolve_config(req.config);

  const fs::path out(req.out_dir);
  if (fs::exists(out) && !fs::is_directory(out)) throw UsageError("output path " + out.string() + " is not a directory");
  if (fs::exists(out) && !fs::is_empty(out) && !req.force) {
    throw UsageError("output directory " + out.string() + " is not empty (use --force to overwrite)");
  }
  ensure_dir(out);

  const TraceLog log = simulate(config, req.seed, req.steps);
  const fs::path trace = out / kTraceFileName;
  write_log(log, trace.string());
  const fs::path cfg_copy = out / "config.yaml";
  write_text(cfg_copy.string(), to_yaml(config));
  if (req.force) fs::remove(out / kManifestFileName);
  record_stage(out, "simulate", {trace, cfg_copy}, log.header(), req.steps);
  return {trace.string(), cfg_copy.string()};
}

std::vector<std::string> cmd_analyze(const std::string& log_path, const std::string& out_dir) {
  if (out_dir.empty()) throw UsageError("--out is required");
  const TraceLog log = read_log(log_path);
  const DerivedChannels derived = derive_channels(log);
  const PanelSet panels = build_panels(derived, log);

  const fs::path out(out_dir);
  ensure_dir(out);
  std::vector<fs::path> written;
  std::vector<std::string> names;
  for (auto tag : {PanelTag::A, PanelTag::B, PanelTag::C, PanelTag::D}) {
    write_panel(panels.get(tag), out.string());
    written.push_back(out / panel_file_name(tag));
    written.push_back(out / panel_count_file_name(tag));
  }
  record_stage(out, "analyze", written, log.header(), static_cast<std::int64_t>(log.size()));
  for (const auto& p : written) names.push_back(p.string());
  return names;
}

std::string report_text(const AgencyAnalysis& a, const TraceHeader& source) {
  ordered_json r;
  r["report"] = "agency_report";
  r["format_version"] = 1;
  r["source"] = {{"seed", source.seed}, {"config_hash", source.config_hash}};
  r["perspective"] = a.params.perspective;
  r["thresholds"] = {
      {"cluster_threshold", a.params.cluster.threshold},
      {"control_threshold", a.params.control_threshold},
      {"lag_window", a.params.autonomy.lag_window},
      {"motion_epsilon", a.params.autonomy.motion_epsilon},
      {"autonomy_threshold", a.params.autonomy.autonomy_threshold},
      {"min_controlled_points", a.params.autonomy.min_controlled_points},
  };

  ordered_json clusters = ordered_json::array();
  for (std::size_t c = 0; c < a.clustering.clusters.size(); ++c) {
    const auto& cl = a.clustering.clusters[c];
    const auto& lab = a.labels[c];
    clusters.push_back({{"id", c},
                        {"points", points_json(cl.points)},
                        {"label", agency_name(lab.label)},
                        {"cohesion", cl.cohesion},
                        {"controlled_points", lab.controlled_points},
                        {"controllability_fraction", lab.controllability_fraction},
                        {"autonomous_fraction", lab.autonomous_fraction},
                        {"motile", lab.motile}});
  }
  r["clusters"] = clusters;
  r["linkage"] = a.clustering.linkage;

  ordered_json edges = ordered_json::array();
  for (const auto& e : a.graph.edges) {
    edges.push_back({{"motor", e.motor},
                     {"point", e.point},
                     {"weight", e.weight},
                     {"corr", e.signed_corr},
                     {"axis", std::string(1, e.axis)}});
  }
  r["controllability_edges"] = edges;

  ordered_json pd = ordered_json::array();
  for (const auto& p : a.proximodistal) {
    if (!p) {
      pd.push_back(nullptr);
      continue;
    }
    ordered_json ys = ordered_json::array();
    for (const auto& y : p->y_pairs) ys.push_back(y ? ordered_json(*y) : ordered_json(nullptr));
    pd.push_back({{"points", points_json(p->points)},
                  {"x_pairs", p->x_pairs},
                  {"y_pairs", ys},
                  {"gradient", p->gradient},
                  {"y_gradient", p->y_gradient ? ordered_json(*p->y_gradient) : ordered_json(nullptr)}});
  }
  r["proximodistal"] = pd;

  ordered_json mirror = ordered_json::array();
  for (const auto& m : a.mirroring) {
    mirror.push_back({{"panel", std::string(1, panel_letter(m.panel))},
                      {"cluster_a", points_json(m.cluster_a)},
                      {"cluster_b", points_json(m.cluster_b)},
                      {"distance", m.distance},
                      {"cells", m.cells},
                      {"alignment", m.alignment}});
  }
  r["mirroring"] = mirror;
  return r.dump(2) + "\n";
}

std::string cmd_segment(const SegmentRequest& req) {
  agent_motors(req.params.perspective);
  if (req.panels_dir.empty()) throw UsageError("panels directory is required");
  if (req.log_path.empty()) throw UsageError("--log is required");
  const auto panel_a = read_panel(PanelTag::A, req.panels_dir);
  const auto panel_b = read_panel(PanelTag::B, req.panels_dir);
  const auto panel_c = read_panel(PanelTag::C, req.panels_dir);
  const TraceLog log = read_log(req.log_path);
  const DerivedChannels derived = derive_channels(log);
  const auto analysis = analyze_agency(panel_a, panel_b, panel_c, log, derived, req.params);

  const fs::path out = req.out_path.empty() ? fs::path(req.panels_dir) / kReportFileName : fs::path(req.out_path);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  write_text(out.string(), report_text(analysis, log.header()));
  record_stage(out.has_parent_path() ? out.parent_path() : fs::path("."), "segment", {out}, log.header(),
               static_cast<std::int64_t>(log.size()));
  return out.string();
}

std::vector<std::string> verify_manifest(const std::string& dir) {
  std::vector<std::string> problems;
  const fs::path path = fs::path(dir) / kManifestFileName;
  ordered_json m;
  try {
    m = ordered_json::parse(read_text(path.string()));
  } catch (const DataError& e) {
    return {e.what()};
  } catch (const nlohmann::json::exception& e) {
    return {std::string("malformed manifest: ") + e.what()};
  }
  if (!m.contains("outputs") || !m["outputs"].is_object()) return {"manifest lists no outputs"};
  for (const auto& [name, entry] : m["outputs"].items()) {
    const fs::path file = fs::path(dir) / name;
    if (!fs::exists(file)) {
      problems.push_back("missing output " + name);
      continue;
    }
    if (entry.value("fnv1a64", "") != file_hash(file.string())) problems.push_back("hash mismatch for " + name);
  }
  return problems;
}

}  // namespace smca
