#include "agency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "error.hpp"

namespace smca {
namespace {

std::optional<int> label_point(const std::string& label, const std::string& prefix) {
  if (label.size() <= prefix.size() || label.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  int id = 0;
  for (std::size_t i = prefix.size(); i < label.size(); ++i) {
    if (label[i] < '0' || label[i] > '9') return std::nullopt;
    id = id * 10 + (label[i] - '0');
  }
  return id;
}

std::vector<std::string> channel_prefixes(PanelTag tag) {
  switch (tag) {
    case PanelTag::A: return {"x", "y"};
    case PanelTag::B: return {"vx", "vy"};
    case PanelTag::D: return {"b"};
    case PanelTag::C: break;
  }
  throw UsageError("panel " + std::string(1, panel_letter(tag)) + " has no per-point square layout");
}

std::string point_label(const std::string& prefix, int id) { return prefix + std::to_string(id); }

double abs_or(const std::optional<double>& v, double fallback) { return v ? std::abs(*v) : fallback; }

}  // namespace

std::string agency_name(Agency a) {
  switch (a) {
    case Agency::self: return "self";
    case Agency::other_active: return "other-active";
    case Agency::passive: return "passive";
  }
  return "passive";
}

int EntityClustering::cluster_of(int point) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& p = clusters[c].points;
    if (std::find(p.begin(), p.end(), point) != p.end()) return static_cast<int>(c);
  }
  return -1;
}

std::vector<std::vector<int>> EntityClustering::partition() const {
  std::vector<std::vector<int>> out;
  for (const auto& c : clusters) out.push_back(c.points);
  return out;
}

EntityClustering cluster_entities(const CorrelationMatrix& panel_a, const ClusterParams& params) {
  std::vector<int> ids;
  for (const auto& label : panel_a.row_labels()) {
    auto id = label_point(label, "x");
    if (id && panel_a.row_index(point_label("y", *id)) && panel_a.col_index(label) &&
        panel_a.col_index(point_label("y", *id))) {
      ids.push_back(*id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw DataError(DataErrorKind::missing_cells, "panel A has no point with both x and y channels");

  bool any_defined = false;
  for (std::size_t r = 0; r < panel_a.n_rows() && !any_defined; ++r) {
    for (std::size_t c = 0; c < panel_a.n_cols() && !any_defined; ++c) any_defined = panel_a.value(r, c).has_value();
  }
  if (!any_defined) throw DataError(DataErrorKind::missing_cells, "panel A is entirely missing");

  const std::size_t n = ids.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto cx = panel_a.at(point_label("x", ids[i]), point_label("x", ids[j]));
      const auto cy = panel_a.at(point_label("y", ids[i]), point_label("y", ids[j]));
      const double sim = (cx || cy) ? std::max(abs_or(cx, 0.0), abs_or(cy, 0.0)) : 0.0;
      dist[i * n + j] = dist[j * n + i] = 1.0 - sim;
    }
  }

  // Clusters of indices into `ids`; ids ascending so index order is id order.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups.push_back({i});

  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    for (auto i : a) {
      for (auto j : b) sum += dist[i * n + j];
    }
    return sum / static_cast<double>(a.size() * b.size());
  };

  while (groups.size() > 1) {
    std::size_t best_a = 0, best_b = 0;
    double best = 0.0;
    bool found = false;
    // groups stay sorted by lowest member, so the first strict minimum in
    // (a, b) scan order is the lowest-id tie-break.
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double d = linkage(groups[a], groups[b]);
        if (!found || d < best) {
          best = d;
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
    if (!(best < params.threshold)) break;
    auto merged = groups[best_a];
    merged.insert(merged.end(), groups[best_b].begin(), groups[best_b].end());
    std::sort(merged.begin(), merged.end());
    groups[best_a] = std::move(merged);
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(best_b));
    std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  }

  EntityClustering out;
  out.threshold = params.threshold;
  for (const auto& g : groups) {
    Cluster c;
    for (auto i : g) c.points.push_back(ids[i]);
    if (g.size() > 1) {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          sum += 1.0 - dist[g[a] * n + g[b]];
          ++pairs;
        }
      }
      c.cohesion = sum / static_cast<double>(pairs);
    }
    out.clusters.push_back(std::move(c));
  }
  return out;
}

bool ControllabilityGraph::has_edge(int motor, int point) const { return edge(motor, point) != nullptr; }

const ControlEdge* ControllabilityGraph::edge(int motor, int point) const {
  for (const auto& e : edges) {
    if (e.motor == motor && e.point == point) return &e;
  }
  return nullptr;
}

ControllabilityGraph controllability_graph(const CorrelationMatrix& panel_c, double threshold) {
  ControllabilityGraph g;
  g.threshold = threshold;
  std::vector<std::pair<int, int>> motors;  // (motor id, row)
  for (std::size_t r = 0; r < panel_c.n_rows(); ++r) {
    if (auto m = label_point(panel_c.row_labels()[r], "m")) motors.emplace_back(*m, static_cast<int>(r));
  }
  std::vector<int> points;
  for (const auto& label : panel_c.col_labels()) {
    if (auto p = label_point(label, "vx")) points.push_back(*p);
  }
  std::sort(motors.begin(), motors.end());
  std::sort(points.begin(), points.end());

  for (const auto& [motor, row] : motors) {
    const auto& row_label = panel_c.row_labels()[static_cast<std::size_t>(row)];
    for (int p : points) {
      const auto cx = panel_c.at(row_label, point_label("vx", p));
      const auto cy = panel_c.at(row_label, point_label("vy", p));
      if (!cx && !cy) continue;
      const bool use_x = abs_or(cx, -1.0) >= abs_or(cy, -1.0);
      const double dominant = use_x ? *cx : *cy;
      const double weight = std::abs(dominant);
      if (weight >= threshold) g.edges.push_back({motor, p, weight, dominant, use_x ? 'x' : 'y'});
    }
  }
  return g;
}

ProximoDistal proximodistal_check(const CorrelationMatrix& panel_a, std::span<const int> pts) {
  if (pts.size() < 3) throw UsageError("proximo-distal check needs at least 3 points");
  ProximoDistal out;
  out.points.assign(pts.begin(), pts.end());
  bool y_complete = true;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto cx = panel_a.at(point_label("x", pts[k]), point_label("x", pts[k + 1]));
    if (!cx) {
      throw DataError(DataErrorKind::missing_cells, "missing cell corr(x" + std::to_string(pts[k]) + ", x" +
                                                        std::to_string(pts[k + 1]) + ")");
    }
    out.x_pairs.push_back(*cx);
    const auto cy = panel_a.at(point_label("y", pts[k]), point_label("y", pts[k + 1]));
    out.y_pairs.push_back(cy);
    y_complete = y_complete && cy.has_value();
  }
  out.gradient = true;
  for (std::size_t k = 1; k < out.x_pairs.size(); ++k) out.gradient = out.gradient && out.x_pairs[k] >= out.x_pairs[k - 1];
  if (y_complete) {
    bool g = true;
    for (std::size_t k = 1; k < out.y_pairs.size(); ++k) g = g && *out.y_pairs[k] >= *out.y_pairs[k - 1];
    out.y_gradient = g;
  }
  return out;
}

MirrorScore mirroring_score(const CorrelationMatrix& panel, std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw UsageError("mirroring needs clusters of equal size");
  if (a.empty()) throw UsageError("mirroring needs non-empty clusters");
  const auto prefixes = channel_prefixes(panel.tag());

  auto channels = [&](std::span<const int> pts) {
    std::vector<std::string> out;
    for (const auto& pre : prefixes) {
      for (int p : pts) {
        auto label = point_label(pre, p);
        if (!panel.row_index(label) || !panel.col_index(label)) {
          throw DataError(DataErrorKind::missing_cells, "panel lacks channel " + label);
        }
        out.push_back(std::move(label));
      }
    }
    return out;
  };
  const auto ca = channels(a);
  const auto cb = channels(b);

  double sum = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < ca.size(); ++j) {
      const double va = panel.at(ca[i], ca[j]).value_or(0.0);
      const double vb = panel.at(cb[i], cb[j]).value_or(0.0);
      sum += (va - vb) * (va - vb);
    }
  }
  MirrorScore s;
  s.cluster_a.assign(a.begin(), a.end());
  s.cluster_b.assign(b.begin(), b.end());
  s.panel = panel.tag();
  s.cells = ca.size() * ca.size();
  s.distance = std::sqrt(sum / static_cast<double>(s.cells));
  return s;
}

std::vector<int> agent_motors(int agent) {
  if (agent < 0 || agent >= kAgentCount) throw UsageError("perspective agent must be 0 or 1");
  std::vector<int> out;
  for (int j = 0; j < kJointsPerArm; ++j) out.push_back(point_id(agent, j));
  return out;
}

std::vector<AgencyLabel> classify_autonomy(const TraceLog& log, const DerivedChannels& derived,
                                           const EntityClustering& clustering, const ControllabilityGraph& graph,
                                           int perspective_agent, const AutonomyParams& params) {
  const auto motors = agent_motors(perspective_agent);
  if (params.lag_window < 0) throw UsageError("lag window must be nonnegative");
  if (static_cast<std::size_t>(params.lag_window) >= log.size()) {
    throw UsageError("lag window of " + std::to_string(params.lag_window) + " steps is longer than the log");
  }
  const std::size_t n = log.size();

  std::vector<AgencyLabel> labels;
  for (const auto& cluster : clustering.clusters) {
    AgencyLabel lab;
    lab.points = cluster.points;

    // Steps since the last contact on any cluster point.
    std::int64_t last_contact = -1'000'000'000;
    std::size_t defined = 0;
    std::size_t autonomous = 0;
    for (std::size_t t = 0; t < n; ++t) {
      for (int p : cluster.points) {
        if (log[t].haptic[static_cast<std::size_t>(p)] > 0.0) last_contact = static_cast<std::int64_t>(t);
      }
      double sum = 0.0;
      int count = 0;
      for (int p : cluster.points) {
        const auto& sp = derived.speed[static_cast<std::size_t>(p)];
        if (sp.has(t)) {
          sum += sp.values[t];
          ++count;
        }
      }
      if (count == 0) continue;
      ++defined;
      const bool moving = sum / count > params.motion_epsilon;
      const bool touched = static_cast<std::int64_t>(t) - last_contact <= params.lag_window;
      if (moving && !touched) ++autonomous;
    }
    lab.autonomous_fraction = defined ? static_cast<double>(autonomous) / static_cast<double>(defined) : 0.0;
    lab.motile = lab.autonomous_fraction > params.autonomy_threshold;

    for (int p : cluster.points) {
      const bool controlled = std::any_of(motors.begin(), motors.end(), [&](int m) { return graph.has_edge(m, p); });
      if (controlled) ++lab.controlled_points;
    }
    lab.controllability_fraction =
        static_cast<double>(lab.controlled_points) / static_cast<double>(cluster.points.size());
    lab.label = lab.motile ? Agency::other_active : Agency::passive;
    labels.push_back(std::move(lab));
  }

  // Self: the motile cluster with the most controlled points (ties: summed
  // edge weight, then lowest id).
  int self = -1;
  double self_weight = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto& lab = labels[c];
    if (!lab.motile || lab.controlled_points < params.min_controlled_points) continue;
    double weight = 0.0;
    for (int p : lab.points) {
      for (int m : motors) {
        if (const auto* e = graph.edge(m, p)) weight += e->weight;
      }
    }
    const bool better = self < 0 || lab.controlled_points > labels[static_cast<std::size_t>(self)].controlled_points ||
                        (lab.controlled_points == labels[static_cast<std::size_t>(self)].controlled_points &&
                         weight > self_weight);
    if (better) {
      self = static_cast<int>(c);
      self_weight = weight;
    }
  }
  if (self >= 0) labels[static_cast<std::size_t>(self)].label = Agency::self;
  return labels;
}

AgencyAnalysis analyze_agency(const CorrelationMatrix& panel_a, const CorrelationMatrix& panel_b,
                              const CorrelationMatrix& panel_c, const TraceLog& log, const DerivedChannels& derived,
                              const AgencyParams& params) {
  agent_motors(params.perspective);
  AgencyAnalysis out;
  out.params = params;
  out.clustering = cluster_entities(panel_a, params.cluster);
  out.graph = controllability_graph(panel_c, params.control_threshold);
  out.labels = classify_autonomy(log, derived, out.clustering, out.graph, params.perspective, params.autonomy);

  const std::vector<int> bottom{0, 1, 2};
  const std::vector<int> top{3, 4, 5};
  const std::vector<int> mismatched{4, 5, 6};
  for (const auto* arm : {&bottom, &top}) {
    try {
      out.proximodistal.emplace_back(proximodistal_check(panel_a, *arm));
    } catch (const DataError&) {
      out.proximodistal.emplace_back(std::nullopt);
    }
  }
  out.mirroring.push_back(mirroring_score(panel_a, bottom, top));
  out.mirroring.push_back(mirroring_score(panel_b, bottom, top));
  out.mirroring.push_back(mirroring_score(panel_a, bottom, mismatched));
  out.mirroring.push_back(mirroring_score(panel_a, top, mismatched));
  return out;
}

}  // namespace smca
