// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smca/agency.hpp"
#include "smca/babble.hpp"
#include "smca/corr.hpp"
#include "smca/pipeline.hpp"
#include "smca/world.hpp"
#include "support.hpp"

using namespace smca;
using smca::testing::Gen;

namespace {

constexpr std::int64_t kHour = 216000;
constexpr int kSeeds = 10;

struct Verdict {
  int id;
  bool ok;
  std::string line;
};
std::vector<Verdict> verdicts;

void verdict(int id, bool ok, const std::string& name, const std::string& detail) {
  verdicts.push_back({id, ok, "criterion " + std::to_string(id) + ": " + name + " -- " + detail});
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double cell(const CorrelationMatrix& m, const std::string& r, const std::string& c) {
  const auto v = m.at(r, c);
  return v ? *v : std::nan("");
}

// Everything criteria 1-5 and 7 need from one seed's hour-long run.
struct SeedSummary {
  std::uint64_t seed = 0;
  double x01 = 0, x12 = 0, x34 = 0, x45 = 0;
  std::array<double, 3> m0_vx{}, m3_vx{};
  double obj_top = 0, obj_bottom = 0;
  std::vector<std::vector<int>> partition;
  std::vector<std::pair<std::vector<int>, Agency>> labels_bottom, labels_top;
  double mirror_arms = 0, mirror_bottom_mismatch = 0, mirror_top_mismatch = 0;
};

SeedSummary run_seed(std::uint64_t seed) {
  const auto log = simulate(SimConfig{}, seed, kHour);
  const auto derived = derive_channels(log);
  const auto panels = build_panels(derived, log);
  SeedSummary s;
  s.seed = seed;
  s.x01 = cell(panels.a, "x0", "x1");
  s.x12 = cell(panels.a, "x1", "x2");
  s.x34 = cell(panels.a, "x3", "x4");
  s.x45 = cell(panels.a, "x4", "x5");
  for (int i = 0; i < 3; ++i) {
    s.m0_vx[i] = cell(panels.c, "m0", "vx" + std::to_string(i));
    s.m3_vx[i] = cell(panels.c, "m3", "vx" + std::to_string(i + 3));
  }
  s.obj_top = s.obj_bottom = 0;
  for (int i = 0; i < 3; ++i) {
    s.obj_bottom = std::max(s.obj_bottom, std::abs(cell(panels.b, "vx6", "vx" + std::to_string(i))));
    s.obj_top = std::max(s.obj_top, std::abs(cell(panels.b, "vx6", "vx" + std::to_string(i + 3))));
  }
  for (int perspective : {0, 1}) {
    AgencyParams p;
    p.perspective = perspective;
    const auto a = analyze_agency(panels.a, panels.b, panels.c, log, derived, p);
    if (perspective == 0) {
      s.partition = a.clustering.partition();
      s.mirror_arms = a.mirroring[0].distance;
      s.mirror_bottom_mismatch = a.mirroring[2].distance;
      s.mirror_top_mismatch = a.mirroring[3].distance;
    }
    auto& out = perspective == 0 ? s.labels_bottom : s.labels_top;
    for (const auto& l : a.labels) out.emplace_back(l.points, l.label);
  }
  return s;
}

std::vector<SeedSummary> run_all_seeds() {
  const unsigned workers = std::clamp(std::thread::hardware_concurrency(), 1u, 4u);
  std::vector<SeedSummary> out(kSeeds);
  for (int base = 0; base < kSeeds; base += static_cast<int>(workers)) {
    std::vector<std::future<SeedSummary>> jobs;
    for (int s = base; s < std::min(kSeeds, base + static_cast<int>(workers)); ++s)
      jobs.push_back(std::async(std::launch::async, run_seed, static_cast<std::uint64_t>(s)));
    for (auto& j : jobs) {
      auto r = j.get();
      out[r.seed] = std::move(r);
    }
  }
  return out;
}

bool same_sign_above(const std::array<double, 3>& v, double thr) {
  const bool pos = std::all_of(v.begin(), v.end(), [&](double x) { return x > thr; });
  const bool neg = std::all_of(v.begin(), v.end(), [&](double x) { return x < -thr; });
  return pos || neg;
}

std::optional<Agency> label_for(const std::vector<std::pair<std::vector<int>, Agency>>& labels,
                                const std::vector<int>& pts) {
  for (const auto& [p, l] : labels)
    if (p == pts) return l;
  return std::nullopt;
}

void criteria_from_runs(const std::vector<SeedSummary>& runs) {
  const std::vector<int> bottom{0, 1, 2}, top{3, 4, 5}, object{6};
  const auto& d = runs[0];

  int pd = 0;
  std::string pd_fail;
  for (const auto& r : runs) {
    if (r.x01 < r.x12 && r.x34 < r.x45) {
      ++pd;
    } else {
      pd_fail += " seed" + std::to_string(r.seed);
    }
  }
  verdict(1, pd >= 9, "proximo-distal signature",
          std::to_string(pd) + "/10 seeds; seed 0: corr(x0,x1)=" + fmt(d.x01) + " < corr(x1,x2)=" + fmt(d.x12) +
              ", corr(x3,x4)=" + fmt(d.x34) + " < corr(x4,x5)=" + fmt(d.x45) +
              (pd_fail.empty() ? "" : "; failing:" + pd_fail));

  const bool c2 = same_sign_above(d.m0_vx, 0.2) && same_sign_above(d.m3_vx, 0.2);
  int c2_seeds = 0;
  for (const auto& r : runs) c2_seeds += same_sign_above(r.m0_vx, 0.2) && same_sign_above(r.m3_vx, 0.2);
  verdict(2, c2, "root-joint controllability",
          "corr(m0,vx0..2)=(" + fmt(d.m0_vx[0]) + "," + fmt(d.m0_vx[1]) + "," + fmt(d.m0_vx[2]) + "), corr(m3,vx3..5)=(" +
              fmt(d.m3_vx[0]) + "," + fmt(d.m3_vx[1]) + "," + fmt(d.m3_vx[2]) + "); holds on " +
              std::to_string(c2_seeds) + "/10 seeds");

  const std::vector<std::vector<int>> expected{bottom, top, object};
  int exact = 0;
  for (const auto& r : runs) exact += r.partition == expected;
  verdict(3, exact >= 8, "entity recovery", std::to_string(exact) + "/10 seeds give {s0,s1,s2},{s3,s4,s5},{s6}");

  int asym = 0;
  for (const auto& r : runs) asym += r.obj_top > r.obj_bottom;
  verdict(4, d.obj_top > d.obj_bottom, "interaction asymmetry",
          "seed 0: max|corr(vx6,vx3..5)|=" + fmt(d.obj_top) + " > max|corr(vx6,vx0..2)|=" + fmt(d.obj_bottom) +
              "; holds on " + std::to_string(asym) + "/10 seeds");

  const bool c5 = label_for(d.labels_bottom, bottom) == Agency::self &&
                  label_for(d.labels_bottom, top) == Agency::other_active &&
                  label_for(d.labels_bottom, object) == Agency::passive &&
                  label_for(d.labels_top, top) == Agency::self &&
                  label_for(d.labels_top, bottom) == Agency::other_active &&
                  label_for(d.labels_top, object) == Agency::passive;
  int c5_seeds = 0;
  for (const auto& r : runs) {
    c5_seeds += label_for(r.labels_bottom, bottom) == Agency::self &&
                label_for(r.labels_bottom, top) == Agency::other_active &&
                label_for(r.labels_bottom, object) == Agency::passive &&
                label_for(r.labels_top, top) == Agency::self && label_for(r.labels_top, bottom) == Agency::other_active;
  }
  verdict(5, c5, "agency labels",
          std::string("seed 0 bottom view: self/other-active/passive, top view swapped: ") + (c5 ? "yes" : "no") +
              "; holds on " + std::to_string(c5_seeds) + "/10 seeds");

  const bool c7 = d.mirror_arms < d.mirror_bottom_mismatch && d.mirror_arms < d.mirror_top_mismatch;
  verdict(7, c7, "mirroring",
          "RMS(A: s0-2 vs s3-5)=" + fmt(d.mirror_arms) + " < RMS(s0-2 vs s4-6)=" + fmt(d.mirror_bottom_mismatch) +
              " and RMS(s3-5 vs s4-6)=" + fmt(d.mirror_top_mismatch));
}

// Bottom arm straight up, s1 at (0,1); object on the rail just to its right.
void criterion_haptic() {
  WorldConfig cfg;
  cfg.initial_angles[1] = {-1.0, 0.0, 0.0};  // top arm folded away to -x
  auto w = build_world(cfg);
  w.object.x = 0.35;
  TraceHeader h;
  h.dt = cfg.dt;
  TraceLog log(h);
  CommandPair cmd{};
  cmd[0] = {-1.0, 0.0, 0.0};
  std::int64_t onset = -1;
  int point = -1;
  for (std::int64_t t = 0; t < 120; ++t) {
    auto r = step(w, cmd);
    w = r.world;
    log.append(t, cmd, {w.arms[0].angles, w.arms[1].angles}, observe(w));
    for (const auto& c : r.contacts) {
      if (onset < 0 && c.target == ContactTarget::object) {
        onset = t;
        point = c.sensory_point;
      }
    }
  }
  if (onset < 1 || onset + 2 >= static_cast<std::int64_t>(log.size())) {
    verdict(6, false, "haptic signature", "no contact in the scripted approach");
    return;
  }
  const auto d = derive_channels(log);
  const auto t0 = static_cast<std::size_t>(onset);
  bool quiet_before = true;
  for (std::size_t t = 0; t < t0; ++t) quiet_before = quiet_before && log[t].haptic[point] == 0.0;
  const double h0 = log[t0].haptic[point], h1 = log[t0 + 1].haptic[point];
  const bool rise = quiet_before && std::max(h0, h1) > 0.5;
  const auto& sp = d.raw_vx[kObjectPoint];
  const double before = sp.has(t0 - 1) ? std::abs(sp.values[t0 - 1]) : 0.0;
  bool faster = false;
  double best = before;
  for (std::size_t k = 0; k <= 2; ++k) {
    if (sp.has(t0 + k) && std::abs(sp.values[t0 + k]) > before) faster = true;
    if (sp.has(t0 + k)) best = std::max(best, std::abs(sp.values[t0 + k]));
  }
  verdict(6, rise && faster, "haptic signature",
          "contact at step " + std::to_string(onset) + " on s" + std::to_string(point) + ": h " +
              fmt(log[t0 - 1].haptic[point]) + " -> " + fmt(h0) + ", " + fmt(h1) + "; object speed " + fmt(before) +
              " -> " + fmt(best) + " units/s within 2 steps");
}

std::optional<double> naive(const Channel& a, const Channel& b) {
  long double n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.has(i) || !b.has(i)) continue;
    const long double x = a.values[i], y = b.values[i];
    n += 1;
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  if (n < 100) return std::nullopt;
  return static_cast<double>((n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb)));
}

void criterion_oracle() {
  Gen g(2024);
  auto series = [&](std::size_t n) {
    Channel c;
    c.values.resize(n);
    c.present.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.values[i] = g.normal();
      c.present[i] = g.chance(0.1) ? 0 : 1;
    }
    return c;
  };
  double worst_oracle = 0, worst_scale = 0, worst_neg = 0;
  bool defined = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = series(1000);
    auto b = series(1000);
    const double rho = g.uniform(-1, 1);
    for (std::size_t i = 0; i < b.size(); ++i) b.values[i] = rho * a.values[i] + std::sqrt(1 - rho * rho) * b.values[i];
    const auto r = pearson(a, b).r;
    const auto o = naive(a, b);
    if (!r || !o) {
      defined = false;
      continue;
    }
    worst_oracle = std::max(worst_oracle, std::abs(*r - *o));
    Channel s = a, n = a;
    const double alpha = g.uniform(0.1, 10), beta = g.uniform(-10, 10);
    for (auto& v : s.values) v = alpha * v + beta;
    for (auto& v : n.values) v = -v;
    worst_scale = std::max(worst_scale, std::abs(*pearson(s, b).r - *r));
    worst_neg = std::max(worst_neg, std::abs(*pearson(n, b).r + *r));
  }
  const bool ok = defined && worst_oracle <= 1e-12 && worst_scale <= 1e-12 && worst_neg <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf, "100 pairs: max |r - oracle| = %.2e, scale %.2e, negation %.2e (tol 1e-12)",
                worst_oracle, worst_scale, worst_neg);
  verdict(8, ok, "correlation engine oracle", buf);
}

int shell(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void criterion_determinism() {
  smca::testing::TempDir dir("accept");
  const char* cli = std::getenv("SMCA_CLI");
  std::vector<std::string> files{"trace.csv", "agency_report.json"};
  for (auto tag : {PanelTag::A, PanelTag::B, PanelTag::C, PanelTag::D}) {
    files.push_back(panel_file_name(tag));
    files.push_back(panel_count_file_name(tag));
  }
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const std::string out = dir / run;
    if (cli) {
      const std::string c = cli;
      ran = ran && shell(c + " simulate --config default --seed 0 --steps 216000 --out " + out) == 0;
      ran = ran && shell(c + " analyze --log " + out + "/trace.csv --out " + out) == 0;
      ran = ran && shell(c + " segment --panels " + out + " --log " + out + "/trace.csv --perspective 0") == 0;
    } else {
      SimulateRequest req;
      req.out_dir = out;
      cmd_simulate(req);
      cmd_analyze(out + "/trace.csv", out);
      cmd_segment({out, out + "/trace.csv", "", {}});
    }
  }
  int identical = 0;
  for (const auto& f : files) {
    const auto a = smca::testing::slurp(dir / ("a/" + f));
    identical += !a.empty() && a == smca::testing::slurp(dir / ("b/" + f));
  }
  const bool rows = ran && read_log(dir / "a/trace.csv").size() == static_cast<std::size_t>(kHour);
  verdict(9, ran && rows && identical == static_cast<int>(files.size()), "determinism",
          std::to_string(identical) + "/" + std::to_string(files.size()) +
              " artifacts byte-identical across two " + (cli ? "CLI" : "in-process") + " pipeline runs (216000 steps)");
}

void criterion_physics() {
  SimConfig sim;
  const auto& cfg = sim.world;
  Babbler babbler(sim.babble, cfg.max_joint_speed, 0);
  auto w = build_world(cfg, 0);
  double worst_link = 0;
  bool rail = true, haptic = true;
  for (std::int64_t t = 0; t < kHour; ++t) {
    w = step(w, babbler.commands(t)).world;
    rail = rail && w.object.y == cfg.rail_y;
    const auto obs = observe(w);
    rail = rail && obs.position[kObjectPoint].y == cfg.rail_y;
    for (double h : obs.haptic) haptic = haptic && h >= 0.0 && h <= 1.0;
    for (int a = 0; a < kAgentCount; ++a) {
      const auto pts = arm_points(w, a);
      Vec2 prev = cfg.arm_base[a];
      for (int k = 0; k < kJointsPerArm; ++k) {
        worst_link = std::max(worst_link, std::abs(norm(pts[k] - prev) - cfg.link_lengths[k]));
        prev = pts[k];
      }
    }
  }

  // Contact-free: both arms swing on the far side of the rail from the object.
  WorldConfig quiet = cfg;
  quiet.initial_angles[0] = {1.0, 0.0, 0.0};
  quiet.initial_angles[1] = {-1.0, 0.0, 0.0};
  auto q = build_world(quiet);
  q.object.x = 1.5;
  const double x0 = q.object.x;
  bool passive = true, contact_free = true;
  for (std::int64_t t = 0; t < 10000; ++t) {
    const double s = (t / 60) % 2 == 0 ? 1.0 : -1.0;
    CommandPair cmd{};
    cmd[0] = {0.0, s, s};
    cmd[1] = {0.0, -s, -s};
    const auto r = step(q, cmd);
    for (const auto& c : r.contacts) contact_free = contact_free && c.target != ContactTarget::object;
    q = r.world;
    passive = passive && q.object.x == x0 && q.object.vx == 0.0;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "rigidity max dev %.2e (tol 1e-9), rail exact %s, haptic in [0,1] %s, passivity over 10000 "
                "contact-free steps %s",
                worst_link, rail ? "yes" : "no", haptic ? "yes" : "no", passive && contact_free ? "yes" : "no");
  verdict(10, worst_link <= 1e-9 && rail && haptic && passive && contact_free, "physics invariants", buf);
}

}  // namespace

int main() {
  try {
    criteria_from_runs(run_all_seeds());
    criterion_haptic();
    criterion_oracle();
    criterion_determinism();
    criterion_physics();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& v : verdicts) {
    std::printf("[%s] %s\n", v.ok ? "PASS" : "FAIL", v.line.c_str());
    failures += !v.ok;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
