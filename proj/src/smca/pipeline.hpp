#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agency.hpp"
#include "config.hpp"
#include "corr.hpp"
#include "trace.hpp"
#include "world.hpp"

namespace smca {

inline constexpr const char* kTraceFileName = "trace.csv";
inline constexpr const char* kManifestFileName = "manifest.json";
inline constexpr const char* kReportFileName = "agency_report.json";

std::string tool_version();

// Babbling run of `steps` steps; row t holds the commands applied during
// step t and the observation after it.
TraceLog simulate(const SimConfig& config, std::uint64_t seed, std::int64_t steps,
                  std::vector<ContactEvent>* contacts = nullptr);

// "default" selects the built-in configuration.
SimConfig resolve_config(const std::string& config_ref);

struct SimulateRequest {
  std::string config = "default";
  std::uint64_t seed = 0;
  std::int64_t steps = 216000;
  std::string out_dir;
  bool force = false;
};

struct SegmentRequest {
  std::string panels_dir;
  std::string log_path;
  std::string out_path;  // defaults to <panels_dir>/agency_report.json
  AgencyParams params;
};

// Stage commands. Each writes its artifacts and records them in the
// manifest of the directory it writes to. Return the written paths.
std::vector<std::string> cmd_simulate(const SimulateRequest& request);
std::vector<std::string> cmd_analyze(const std::string& log_path, const std::string& out_dir);
std::string cmd_segment(const SegmentRequest& request);

std::string report_text(const AgencyAnalysis& analysis, const TraceHeader& source);

// Problems found checking a manifest against the files it lists; empty when
// every listed output exists with its recorded hash.
std::vector<std::string> verify_manifest(const std::string& dir);

std::string file_hash(const std::string& path);

}  // namespace smca
