#include "smca/smca.h"

#include <cstring>
#include <string>

#include "agency.hpp"
#include "config.hpp"
#include "corr.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "trace.hpp"
#include "world.hpp"

struct smca_config {
  smca::SimConfig value;
};

struct smca_world {
  smca::WorldState value;
};

struct smca_trace {
  smca::TraceLog value;
};

struct smca_panels {
  smca::PanelSet value;
};

struct smca_report {
  smca::AgencyAnalysis analysis;
  std::string json;
};

namespace {

thread_local std::string g_last_error;
thread_local smca_data_error g_last_data_error = SMCA_DATA_NONE;

smca_data_error to_c(smca::DataErrorKind kind) {
  using K = smca::DataErrorKind;
  switch (kind) {
    case K::io: return SMCA_DATA_IO;
    case K::header: return SMCA_DATA_HEADER;
    case K::column_count: return SMCA_DATA_COLUMN_COUNT;
    case K::parse: return SMCA_DATA_PARSE;
    case K::checksum: return SMCA_DATA_CHECKSUM;
    case K::too_short: return SMCA_DATA_TOO_SHORT;
    case K::gap: return SMCA_DATA_GAP;
    case K::missing_cells: return SMCA_DATA_MISSING_CELLS;
    case K::unknown_panel: return SMCA_DATA_UNKNOWN_PANEL;
  }
  return SMCA_DATA_NONE;
}

smca_status fail(smca_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating core exceptions into status codes.
template <typename Fn>
smca_status guarded(Fn&& fn) {
  g_last_error.clear();
  g_last_data_error = SMCA_DATA_NONE;
  try {
    fn();
    return SMCA_OK;
  } catch (const smca::DataError& e) {
    g_last_data_error = to_c(e.kind());
    return fail(SMCA_ERR_DATA, e.what());
  } catch (const smca::Error& e) {
    return fail(static_cast<smca_status>(e.category()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SMCA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SMCA_ERR_INTERNAL, e.what());
  }
}

#define SMCA_REQUIRE(ptr)                                               \
  do {                                                                  \
    if (!(ptr)) return fail(SMCA_ERR_USAGE, #ptr " must not be NULL");  \
  } while (0)

smca::CommandPair commands_from(const double* m) {
  smca::CommandPair cmd{};
  for (int a = 0; a < smca::kAgentCount; ++a) {
    for (int j = 0; j < smca::kJointsPerArm; ++j) cmd[a][j] = m[smca::point_id(a, j)];
  }
  return cmd;
}

smca::AgencyParams params_from(const smca_agency_params* p) {
  smca::AgencyParams out;
  if (!p) return out;
  out.perspective = p->perspective;
  out.cluster.threshold = p->cluster_threshold;
  out.control_threshold = p->control_threshold;
  out.autonomy.lag_window = p->lag_window;
  out.autonomy.motion_epsilon = p->motion_epsilon;
  out.autonomy.autonomy_threshold = p->autonomy_threshold;
  return out;
}

const smca::CorrelationMatrix& panel_of(const smca_panels* panels, char tag) {
  return panels->value.get(smca::panel_from_letter(tag));
}

}  // namespace

extern "C" {

const char* smca_version(void) { return SMCA_VERSION; }
const char* smca_last_error(void) { return g_last_error.c_str(); }
smca_data_error smca_last_data_error(void) { return g_last_data_error; }

smca_status smca_config_default(smca_config** out) {
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_config{smca::resolve_config("default")}; });
}

smca_status smca_config_load(const char* path, smca_config** out) {
  SMCA_REQUIRE(path);
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_config{smca::resolve_config(path)}; });
}

smca_status smca_config_parse(const char* yaml_text, smca_config** out) {
  SMCA_REQUIRE(yaml_text);
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_config{smca::parse_config(yaml_text)}; });
}

smca_status smca_config_hash(const smca_config* config, char* buf, size_t len) {
  SMCA_REQUIRE(config);
  SMCA_REQUIRE(buf);
  return guarded([&] {
    const auto h = smca::config_hash(config->value);
    if (len < h.size() + 1) throw smca::UsageError("hash buffer too small");
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

void smca_config_free(smca_config* config) { delete config; }

smca_status smca_world_create(const smca_config* config, uint64_t seed, smca_world** out) {
  SMCA_REQUIRE(config);
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_world{smca::build_world(config->value.world, seed)}; });
}

smca_status smca_world_step(smca_world* world, const double* commands, smca_contact* contacts, size_t capacity,
                            size_t* count) {
  SMCA_REQUIRE(world);
  SMCA_REQUIRE(commands);
  return guarded([&] {
    auto result = smca::step(std::move(world->value), commands_from(commands));
    world->value = std::move(result.world);
    if (count) *count = result.contacts.size();
    if (contacts) {
      for (size_t i = 0; i < result.contacts.size() && i < capacity; ++i) {
        const auto& e = result.contacts[i];
        contacts[i] = {e.step, e.sensory_point, e.target_point, e.impulse};
      }
    }
  });
}

smca_status smca_world_observe(const smca_world* world, smca_observation* out) {
  SMCA_REQUIRE(world);
  SMCA_REQUIRE(out);
  return guarded([&] {
    const auto o = smca::observe(world->value);
    for (int i = 0; i < smca::kPointCount; ++i) {
      out->x[i] = o.position[i].x;
      out->y[i] = o.position[i].y;
      out->h[i] = o.haptic[i];
    }
    out->object_visible = o.object_visible ? 1 : 0;
  });
}

smca_status smca_world_set_object(smca_world* world, double x, double vx) {
  SMCA_REQUIRE(world);
  const auto extent = world->value.config.rail_x_extent;
  if (!extent.contains(x)) return fail(SMCA_ERR_USAGE, "object position outside the rail extent");
  world->value.object.x = x;
  world->value.object.vx = vx;
  return SMCA_OK;
}

smca_status smca_world_get_object(const smca_world* world, double* x, double* vx) {
  SMCA_REQUIRE(world);
  if (x) *x = world->value.object.x;
  if (vx) *vx = world->value.object.vx;
  return SMCA_OK;
}

smca_status smca_world_set_angles(smca_world* world, const double* angles) {
  SMCA_REQUIRE(world);
  SMCA_REQUIRE(angles);
  const auto& limits = world->value.config.joint_limits;
  for (int a = 0; a < smca::kAgentCount; ++a) {
    for (int j = 0; j < smca::kJointsPerArm; ++j) {
      if (!limits[j].contains(angles[smca::point_id(a, j)])) {
        return fail(SMCA_ERR_USAGE, "joint angle outside its limit");
      }
    }
  }
  for (int a = 0; a < smca::kAgentCount; ++a) {
    for (int j = 0; j < smca::kJointsPerArm; ++j) world->value.arms[a].angles[j] = angles[smca::point_id(a, j)];
  }
  return SMCA_OK;
}

void smca_world_free(smca_world* world) { delete world; }

smca_status smca_simulate(const smca_config* config, uint64_t seed, int64_t steps, smca_trace** out) {
  SMCA_REQUIRE(config);
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_trace{smca::simulate(config->value, seed, steps)}; });
}

smca_status smca_trace_read(const char* path, smca_trace** out) {
  SMCA_REQUIRE(path);
  SMCA_REQUIRE(out);
  return guarded([&] { *out = new smca_trace{smca::read_log(path)}; });
}

smca_status smca_trace_write(const smca_trace* trace, const char* path) {
  SMCA_REQUIRE(trace);
  SMCA_REQUIRE(path);
  return guarded([&] { smca::write_log(trace->value, path); });
}

size_t smca_trace_rows(const smca_trace* trace) { return trace ? trace->value.size() : 0; }

void smca_trace_free(smca_trace* trace) { delete trace; }

smca_status smca_analyze(const smca_trace* trace, smca_panels** out) {
  SMCA_REQUIRE(trace);
  SMCA_REQUIRE(out);
  return guarded([&] {
    const auto derived = smca::derive_channels(trace->value);
    *out = new smca_panels{smca::build_panels(derived, trace->value)};
  });
}

smca_status smca_panels_read(const char* dir, smca_panels** out) {
  SMCA_REQUIRE(dir);
  SMCA_REQUIRE(out);
  return guarded([&] {
    using smca::PanelTag;
    *out = new smca_panels{{smca::read_panel(PanelTag::A, dir), smca::read_panel(PanelTag::B, dir),
                            smca::read_panel(PanelTag::C, dir), smca::read_panel(PanelTag::D, dir)}};
  });
}

smca_status smca_panels_write(const smca_panels* panels, const char* dir) {
  SMCA_REQUIRE(panels);
  SMCA_REQUIRE(dir);
  return guarded([&] {
    for (auto tag : {smca::PanelTag::A, smca::PanelTag::B, smca::PanelTag::C, smca::PanelTag::D}) {
      smca::write_panel(panels->value.get(tag), dir);
    }
  });
}

smca_status smca_panel_shape(const smca_panels* panels, char tag, size_t* rows, size_t* cols) {
  SMCA_REQUIRE(panels);
  return guarded([&] {
    const auto& m = panel_of(panels, tag);
    if (rows) *rows = m.n_rows();
    if (cols) *cols = m.n_cols();
  });
}

smca_status smca_panel_cell(const smca_panels* panels, char tag, size_t row, size_t col, double* value, int* defined,
                            size_t* n_effective) {
  SMCA_REQUIRE(panels);
  return guarded([&] {
    const auto& m = panel_of(panels, tag);
    if (row >= m.n_rows() || col >= m.n_cols()) throw smca::UsageError("panel cell index out of range");
    const auto& v = m.value(row, col);
    if (value) *value = v.value_or(0.0);
    if (defined) *defined = v ? 1 : 0;
    if (n_effective) *n_effective = m.n_effective(row, col);
  });
}

void smca_panels_free(smca_panels* panels) { delete panels; }

void smca_agency_params_default(smca_agency_params* params) {
  if (!params) return;
  const smca::AgencyParams d;
  params->perspective = d.perspective;
  params->cluster_threshold = d.cluster.threshold;
  params->control_threshold = d.control_threshold;
  params->lag_window = d.autonomy.lag_window;
  params->motion_epsilon = d.autonomy.motion_epsilon;
  params->autonomy_threshold = d.autonomy.autonomy_threshold;
}

smca_status smca_segment(const smca_panels* panels, const smca_trace* trace, const smca_agency_params* params,
                         smca_report** out) {
  SMCA_REQUIRE(panels);
  SMCA_REQUIRE(trace);
  SMCA_REQUIRE(out);
  return guarded([&] {
    const auto derived = smca::derive_channels(trace->value);
    auto analysis = smca::analyze_agency(panels->value.a, panels->value.b, panels->value.c, trace->value, derived,
                                         params_from(params));
    auto json = smca::report_text(analysis, trace->value.header());
    *out = new smca_report{std::move(analysis), std::move(json)};
  });
}

size_t smca_report_cluster_count(const smca_report* report) {
  return report ? report->analysis.clustering.clusters.size() : 0;
}

smca_status smca_report_cluster(const smca_report* report, size_t index, int* points, size_t* npoints,
                                smca_label* label) {
  SMCA_REQUIRE(report);
  const auto& clusters = report->analysis.clustering.clusters;
  if (index >= clusters.size()) return fail(SMCA_ERR_USAGE, "cluster index out of range");
  const auto& pts = clusters[index].points;
  if (points) {
    for (size_t i = 0; i < pts.size(); ++i) points[i] = pts[i];
  }
  if (npoints) *npoints = pts.size();
  if (label) {
    switch (report->analysis.labels[index].label) {
      case smca::Agency::self: *label = SMCA_LABEL_SELF; break;
      case smca::Agency::other_active: *label = SMCA_LABEL_OTHER_ACTIVE; break;
      case smca::Agency::passive: *label = SMCA_LABEL_PASSIVE; break;
    }
  }
  return SMCA_OK;
}

const char* smca_report_json(const smca_report* report) { return report ? report->json.c_str() : ""; }

void smca_report_free(smca_report* report) { delete report; }

smca_status smca_cmd_simulate(const smca_simulate_request* request) {
  SMCA_REQUIRE(request);
  return guarded([&] {
    smca::SimulateRequest req;
    req.config = request->config ? request->config : "default";
    req.seed = request->seed;
    req.steps = request->steps;
    req.out_dir = request->out_dir ? request->out_dir : "";
    req.force = request->force != 0;
    smca::cmd_simulate(req);
  });
}

smca_status smca_cmd_analyze(const char* log_path, const char* out_dir) {
  SMCA_REQUIRE(log_path);
  SMCA_REQUIRE(out_dir);
  return guarded([&] { smca::cmd_analyze(log_path, out_dir); });
}

smca_status smca_cmd_segment(const char* panels_dir, const char* log_path, const smca_agency_params* params,
                             const char* out_path) {
  SMCA_REQUIRE(panels_dir);
  SMCA_REQUIRE(log_path);
  return guarded([&] {
    smca::SegmentRequest req;
    req.panels_dir = panels_dir;
    req.log_path = log_path;
    req.out_path = out_path ? out_path : "";
    req.params = params_from(params);
    smca::cmd_segment(req);
  });
}

smca_status smca_manifest_verify(const char* dir) {
  SMCA_REQUIRE(dir);
  return guarded([&] {
    const auto problems = smca::verify_manifest(dir);
    if (problems.empty()) return;
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw smca::DataError(smca::DataErrorKind::io, msg);
  });
}

}  // extern "C"
