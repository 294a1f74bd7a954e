// Command-line front end: simulate -> analyze -> segment, linked against the
// C API only.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "smca/smca.h"

namespace {

int report(smca_status status) {
  if (status != SMCA_OK) std::cerr << "smca: " << smca_last_error() << "\n";
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-arm sensorimotor simulation and correlation analysis"};
  app.set_version_flag("--version", std::string(smca_version()));
  app.require_subcommand(1);

  std::string config = "default";
  std::uint64_t seed = 0;
  std::int64_t steps = 216000;
  std::string sim_out;
  bool force = false;
  auto* simulate = app.add_subcommand("simulate", "Run motor babbling and record a trace");
  simulate->add_option("--config", config, "Config file, or 'default'")->capture_default_str();
  simulate->add_option("--seed", seed, "Babbling seed")->capture_default_str();
  simulate->add_option("--steps", steps, "Steps to simulate (216000 = one hour at 60 Hz)")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_flag("--force", force, "Overwrite a non-empty output directory");

  std::string log_path;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Compute correlation panels A-D from a trace");
  analyze->add_option("--log", log_path, "Trace file")->required();
  analyze->add_option("--out", analyze_out, "Output directory for panel CSVs")->required();

  smca_agency_params params;
  smca_agency_params_default(&params);
  std::string panels_dir;
  std::string segment_log;
  std::string report_out;
  auto* segment = app.add_subcommand("segment", "Cluster entities and label self/other/passive");
  segment->add_option("--panels", panels_dir, "Directory holding panel CSVs")->required();
  segment->add_option("--log", segment_log, "Trace file")->required();
  segment->add_option("--perspective", params.perspective, "Analyzing agent (0 bottom, 1 top)")->capture_default_str();
  segment->add_option("--out", report_out, "Report path (default <panels>/agency_report.json)");
  segment->add_option("--cluster-threshold", params.cluster_threshold, "Average-linkage cut distance")
      ->capture_default_str();
  segment->add_option("--control-threshold", params.control_threshold, "Controllability edge threshold")
      ->capture_default_str();
  segment->add_option("--lag-window", params.lag_window, "Contact look-back window in steps")->capture_default_str();
  segment->add_option("--motion-epsilon", params.motion_epsilon, "Normalized speed counted as motion")
      ->capture_default_str();
  segment->add_option("--autonomy-threshold", params.autonomy_threshold, "Autonomous-motion fraction for motility")
      ->capture_default_str();

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Check a directory's manifest against its files");
  verify->add_option("dir", verify_dir, "Directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return SMCA_ERR_USAGE;
  }

  if (*simulate) {
    if (steps < 1) {
      std::cerr << "smca: --steps must be at least 1\n";
      return SMCA_ERR_USAGE;
    }
    const smca_simulate_request req{config.c_str(), seed, steps, sim_out.c_str(), force ? 1 : 0};
    return report(smca_cmd_simulate(&req));
  }
  if (*analyze) return report(smca_cmd_analyze(log_path.c_str(), analyze_out.c_str()));
  if (*segment) {
    if (params.perspective != 0 && params.perspective != 1) {
      std::cerr << "smca: --perspective must be 0 or 1\n";
      return SMCA_ERR_USAGE;
    }
    return report(smca_cmd_segment(panels_dir.c_str(), segment_log.c_str(), &params,
                                   report_out.empty() ? nullptr : report_out.c_str()));
  }
  if (*verify) return report(smca_manifest_verify(verify_dir.c_str()));
  return SMCA_ERR_USAGE;
}
