#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "smca/agency.hpp"
#include "smca/error.hpp"
#include "smca/pipeline.hpp"
#include "support.hpp"

using namespace smca;
using smca::testing::Gen;

namespace {

using Sim7 = std::array<std::array<double, 7>, 7>;

// Panel A with corr(x_i,x_j) = sx[i][j], corr(y_i,y_j) = sy[i][j], x-y cells 0.
CorrelationMatrix panel_from(const Sim7& sx, const Sim7& sy) {
  CorrelationMatrix m(PanelTag::A, panel_row_labels(PanelTag::A), panel_col_labels(PanelTag::A));
  for (int i = 0; i < 14; ++i) {
    for (int j = 0; j < 14; ++j) {
      double v = 0.0;
      if (i < 7 && j < 7) v = sx[i][j];
      if (i >= 7 && j >= 7) v = sy[i - 7][j - 7];
      m.set(i, j, v, 1000);
    }
  }
  return m;
}

Sim7 block_sim(const std::vector<std::vector<int>>& blocks, double within, double across) {
  Sim7 s{};
  std::array<int, 7> owner{};
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int p : blocks[b]) owner[p] = static_cast<int>(b);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) s[i][j] = i == j ? 1.0 : (owner[i] == owner[j] ? within : across);
  return s;
}

Sim7 random_sim(Gen& g) {
  Sim7 s{};
  for (int i = 0; i < 7; ++i) {
    s[i][i] = 1.0;
    for (int j = i + 1; j < 7; ++j) s[i][j] = s[j][i] = g.uniform(-1, 1);
  }
  return s;
}

std::vector<std::vector<int>> sorted_partition(std::vector<std::vector<int>> p) {
  for (auto& c : p) std::sort(c.begin(), c.end());
  std::sort(p.begin(), p.end());
  return p;
}

// One default-length babbling run shared by the end-to-end cases.
struct DefaultRun {
  TraceLog log;
  DerivedChannels derived;
  PanelSet panels;
};

const DefaultRun& default_run() {
  static const DefaultRun run = [] {
    DefaultRun r;
    r.log = simulate(SimConfig{}, 0, 216000);
    r.derived = derive_channels(r.log);
    r.panels = build_panels(r.derived, r.log);
    return r;
  }();
  return run;
}

const AgencyLabel& label_of(const std::vector<AgencyLabel>& labels, const std::vector<int>& pts) {
  for (const auto& l : labels)
    if (l.points == pts) return l;
  FAIL("cluster not found");
  return labels.front();
}

}  // namespace

TEST_CASE("block-diagonal panel recovers the blocks") {
  const auto s = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.9, 0.05);
  const auto c = cluster_entities(panel_from(s, s));
  CHECK(c.partition() == std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}, {6}});
  CHECK(c.clusters[0].cohesion == doctest::Approx(0.9));
  CHECK(c.clusters[2].cohesion == 1.0);
  CHECK(c.cluster_of(4) == 1);
  CHECK(c.cluster_of(9) == -1);
  CHECK(c.linkage == "average");
}

TEST_CASE("the larger of |corr x| and |corr y| drives the distance") {
  const auto sx = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, -0.9, 0.05);
  const auto sy = block_sim({{0, 1, 2, 3, 4, 5, 6}}, 0.1, 0.1);
  CHECK(cluster_entities(panel_from(sx, sy)).partition() == std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}, {6}});
}

TEST_CASE("identity panel gives singletons") {
  const auto s = block_sim({{0}, {1}, {2}, {3}, {4}, {5}, {6}}, 0.0, 0.0);
  CHECK(cluster_entities(panel_from(s, s)).clusters.size() == 7);
}

TEST_CASE("missing cells count as maximal distance") {
  auto m = panel_from(block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.9, 0.05),
                      block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.9, 0.05));
  for (int i = 0; i < 14; ++i) {
    m.set(6, static_cast<std::size_t>(i), std::nullopt, 0);
    m.set(static_cast<std::size_t>(i), 6, std::nullopt, 0);
    m.set(13, static_cast<std::size_t>(i), std::nullopt, 0);
    m.set(static_cast<std::size_t>(i), 13, std::nullopt, 0);
  }
  CHECK(cluster_entities(m).partition() == std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}, {6}});
}

TEST_CASE("all-missing panel is an error") {
  CorrelationMatrix m(PanelTag::A, panel_row_labels(PanelTag::A), panel_col_labels(PanelTag::A));
  try {
    cluster_entities(m);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataErrorKind::missing_cells);
  }
}

TEST_CASE("clustering is invariant under relabeling") {
  Gen g(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sx = random_sim(g), sy = random_sim(g);
    std::array<int, 7> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 6; i > 0; --i) std::swap(perm[i], perm[g.integer(0, i)]);
    Sim7 px{}, py{};
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        px[perm[i]][perm[j]] = sx[i][j];
        py[perm[i]][perm[j]] = sy[i][j];
      }
    const auto base = cluster_entities(panel_from(sx, sy)).partition();
    auto mapped = base;
    for (auto& c : mapped)
      for (auto& p : c) p = perm[p];
    const auto relabeled = cluster_entities(panel_from(px, py)).partition();
    // Exact ties could resolve differently; skip them.
    bool tie = false;
    for (int i = 0; i < 7 && !tie; ++i)
      for (int j = i + 1; j < 7 && !tie; ++j)
        for (int k = 0; k < 7 && !tie; ++k)
          for (int l = k + 1; l < 7 && !tie; ++l)
            tie = (i != k || j != l) && std::max(std::abs(sx[i][j]), std::abs(sy[i][j])) ==
                                            std::max(std::abs(sx[k][l]), std::abs(sy[k][l]));
    if (!tie) REQUIRE(sorted_partition(relabeled) == sorted_partition(mapped));
  }
}

TEST_CASE("cluster count is nonincreasing in the threshold") {
  Gen g(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = panel_from(random_sim(g), random_sim(g));
    std::size_t prev = 8;
    for (double thr = 0.0; thr <= 1.01; thr += 0.05) {
      ClusterParams p;
      p.threshold = thr;
      const auto n = cluster_entities(m, p).clusters.size();
      REQUIRE(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("controllability edges are monotone in the threshold") {
  Gen g(23);
  CorrelationMatrix c(PanelTag::C, panel_row_labels(PanelTag::C), panel_col_labels(PanelTag::C));
  for (std::size_t r = 0; r < c.n_rows(); ++r)
    for (std::size_t k = 0; k < c.n_cols(); ++k) c.set(r, k, g.chance(0.1) ? std::nullopt : std::optional(g.uniform(-1, 1)), 500);
  std::size_t prev = SIZE_MAX;
  ControllabilityGraph last;
  for (double thr = 0.05; thr <= 1.0; thr += 0.05) {
    const auto graph = controllability_graph(c, thr);
    REQUIRE(graph.edges.size() <= prev);
    for (const auto& e : graph.edges) {
      REQUIRE(e.weight >= thr);
      REQUIRE(std::abs(e.signed_corr) == e.weight);
      if (prev != SIZE_MAX) REQUIRE(last.has_edge(e.motor, e.point));
    }
    prev = graph.edges.size();
    last = graph;
  }
}

TEST_CASE("edge weight takes the stronger velocity component") {
  CorrelationMatrix c(PanelTag::C, panel_row_labels(PanelTag::C), panel_col_labels(PanelTag::C));
  c.set(0, *c.col_index("vx2"), 0.1, 500);
  c.set(0, *c.col_index("vy2"), -0.6, 500);
  c.set(1, *c.col_index("vx4"), 0.19, 500);
  const auto g = controllability_graph(c, 0.2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].motor == 0);
  CHECK(g.edges[0].point == 2);
  CHECK(g.edges[0].weight == 0.6);
  CHECK(g.edges[0].signed_corr == -0.6);
  CHECK(g.edges[0].axis == 'y');
}

TEST_CASE("proximodistal boundary and order invariance") {
  auto s = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.7, 0.1);
  const std::vector<int> arm{0, 1, 2};
  const auto eq = proximodistal_check(panel_from(s, s), arm);
  CHECK(eq.gradient);
  CHECK(eq.x_pairs[0] == eq.x_pairs[1]);
  REQUIRE(eq.y_gradient.has_value());

  Gen g(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sx = random_sim(g), sy = random_sim(g);
    const auto base = proximodistal_check(panel_from(sx, sy), arm);
    Sim7 tx = sx, ty = sy;
    const double a = g.uniform(0.1, 3.0);
    for (auto* m : {&tx, &ty})
      for (auto& row : *m)
        for (auto& v : row) v = std::tanh(a * v) * 0.5 + 0.1;
    const auto t = proximodistal_check(panel_from(tx, ty), arm);
    REQUIRE(t.gradient == base.gradient);
    REQUIRE(t.y_gradient == base.y_gradient);
  }
  CHECK_THROWS_AS(proximodistal_check(panel_from(s, s), std::vector<int>{0, 1}), UsageError);
}

TEST_CASE("proximodistal decreasing pairs clear the flag") {
  auto s = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.7, 0.1);
  s[0][1] = s[1][0] = 0.9;
  const auto r = proximodistal_check(panel_from(s, s), std::vector<int>{0, 1, 2});
  CHECK_FALSE(r.gradient);
  CHECK(r.x_pairs == std::vector<double>{0.9, 0.7});
}

TEST_CASE("mirroring distance properties") {
  Gen g(25);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = panel_from(random_sim(g), random_sim(g));
    const std::vector<int> a{0, 1, 2}, b{3, 4, 5}, c{4, 5, 6};
    CHECK(mirroring_score(m, a, a).distance == 0.0);
    CHECK(mirroring_score(m, a, b).distance == mirroring_score(m, b, a).distance);
    CHECK(mirroring_score(m, b, c).distance == mirroring_score(m, c, b).distance);
    CHECK(mirroring_score(m, a, b).cells == 36);
  }
  const auto s = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.8, 0.1);
  const auto same = mirroring_score(panel_from(s, s), std::vector<int>{0, 1, 2}, std::vector<int>{3, 4, 5});
  CHECK(same.distance == 0.0);
  CHECK(same.alignment == "index order");
  CHECK_THROWS_AS(mirroring_score(panel_from(s, s), std::vector<int>{0, 1}, std::vector<int>{3, 4, 5}), UsageError);
  CHECK_THROWS_AS(mirroring_score(panel_from(s, s), std::vector<int>{0, 1, 7}, std::vector<int>{3, 4, 5}), DataError);
}

TEST_CASE("mirroring against a hand-computed RMS") {
  auto sx = block_sim({{0, 1, 2}, {3, 4, 5}, {6}}, 0.8, 0.0);
  auto sy = sx;
  sx[3][4] = sx[4][3] = 0.5;  // two cells differ by 0.3
  const auto r = mirroring_score(panel_from(sx, sy), std::vector<int>{0, 1, 2}, std::vector<int>{3, 4, 5});
  CHECK(r.distance == doctest::Approx(std::sqrt(2 * 0.09 / 36)).epsilon(1e-12));
}

TEST_CASE("object moving on its own is other-active") {
  SimConfig cfg;
  cfg.world.object_friction = 0.0;
  cfg.world.initial_angles[0] = {1.0, 0.0, 0.0};
  cfg.world.initial_angles[1] = {-1.0, 0.0, 0.0};
  auto w = build_world(cfg.world);
  w.object.vx = 0.5;
  TraceHeader h;
  h.v_norm_max = cfg.trace.v_norm_max;
  TraceLog log(h);
  for (std::int64_t t = 0; t < 1000; ++t) {
    auto r = step(w, CommandPair{});
    REQUIRE(r.contacts.empty());
    w = r.world;
    log.append(t, CommandPair{}, {w.arms[0].angles, w.arms[1].angles}, observe(w));
  }
  const auto derived = derive_channels(log);
  EntityClustering clusters;
  clusters.clusters = {{{0, 1, 2}, 1.0}, {{3, 4, 5}, 1.0}, {{6}, 1.0}};
  const auto labels = classify_autonomy(log, derived, clusters, ControllabilityGraph{}, 0);
  CHECK(label_of(labels, {6}).label == Agency::other_active);
  CHECK(label_of(labels, {0, 1, 2}).label == Agency::passive);
  CHECK(label_of(labels, {3, 4, 5}).label == Agency::passive);
  for (const auto& l : labels) CHECK(l.label != Agency::self);
}

TEST_CASE("lag window longer than the log is a usage error") {
  const auto log = simulate(SimConfig{}, 0, 5);
  const auto derived = derive_channels(log);
  EntityClustering clusters;
  clusters.clusters = {{{6}, 1.0}};
  AutonomyParams p;
  p.lag_window = 5;
  CHECK_THROWS_AS(classify_autonomy(log, derived, clusters, {}, 0, p), UsageError);
  p.lag_window = 4;
  CHECK_NOTHROW(classify_autonomy(log, derived, clusters, {}, 0, p));
  CHECK_THROWS_AS(classify_autonomy(log, derived, clusters, {}, 2, p), UsageError);
}

TEST_CASE("default run segments into self, other agent and object") {
  const auto& run = default_run();
  const auto& p = run.panels;
  AgencyParams params;
  const auto a = analyze_agency(p.a, p.b, p.c, run.log, run.derived, params);
  REQUIRE(a.clustering.partition() == std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}, {6}});
  CHECK(label_of(a.labels, {0, 1, 2}).label == Agency::self);
  CHECK(label_of(a.labels, {3, 4, 5}).label == Agency::other_active);
  CHECK(label_of(a.labels, {6}).label == Agency::passive);
  CHECK(a.graph.has_edge(0, 0));
  CHECK(a.graph.has_edge(0, 1));
  CHECK(a.graph.has_edge(0, 2));
  CHECK_FALSE(a.graph.has_edge(0, 3));
  REQUIRE(a.proximodistal.size() == 2);
  CHECK(a.proximodistal[0]->gradient);
  CHECK(a.proximodistal[1]->gradient);
}

TEST_CASE("swapping perspective swaps the arm labels only") {
  const auto& run = default_run();
  const auto& p = run.panels;
  AgencyParams bottom, top;
  top.perspective = 1;
  const auto lb = analyze_agency(p.a, p.b, p.c, run.log, run.derived, bottom).labels;
  const auto lt = analyze_agency(p.a, p.b, p.c, run.log, run.derived, top).labels;
  REQUIRE(lb.size() == lt.size());
  for (std::size_t i = 0; i < lb.size(); ++i) {
    const auto swapped = lb[i].label == Agency::self ? Agency::other_active
                         : lb[i].label == Agency::other_active ? Agency::self
                                                               : Agency::passive;
    const bool arm = lb[i].points == std::vector<int>{0, 1, 2} || lb[i].points == std::vector<int>{3, 4, 5};
    CHECK(lt[i].label == (arm ? swapped : lb[i].label));
    CHECK(lt[i].autonomous_fraction == lb[i].autonomous_fraction);
  }
  CHECK(label_of(lt, {3, 4, 5}).label == Agency::self);
}

TEST_CASE("labels are stable across the control threshold sweep") {
  const auto& run = default_run();
  const auto& p = run.panels;
  for (double thr = 0.1; thr <= 0.5 + 1e-9; thr += 0.1) {
    for (int perspective : {0, 1}) {
      AgencyParams params;
      params.perspective = perspective;
      params.control_threshold = thr;
      const auto a = analyze_agency(p.a, p.b, p.c, run.log, run.derived, params);
      const std::vector<int> own = perspective == 0 ? std::vector<int>{0, 1, 2} : std::vector<int>{3, 4, 5};
      const std::vector<int> other = perspective == 0 ? std::vector<int>{3, 4, 5} : std::vector<int>{0, 1, 2};
      INFO("threshold " << thr << " perspective " << perspective);
      CHECK(label_of(a.labels, own).label == Agency::self);
      CHECK(label_of(a.labels, other).label == Agency::other_active);
      CHECK(label_of(a.labels, {6}).label == Agency::passive);
    }
  }
}

TEST_CASE("agent motor ids") {
  CHECK(agent_motors(0) == std::vector<int>{0, 1, 2});
  CHECK(agent_motors(1) == std::vector<int>{3, 4, 5});
  CHECK_THROWS_AS(agent_motors(5), UsageError);
  CHECK(agency_name(Agency::other_active) == "other-active");
}
