#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corr.hpp"
#include "trace.hpp"

namespace smca {

struct ClusterParams {
  double threshold = 0.5;  // merge while average-linkage distance < threshold
};

struct Cluster {
  std::vector<int> points;  // ascending
  double cohesion = 1.0;    // mean intra-cluster similarity, 1 for singletons
};

struct EntityClustering {
  std::vector<Cluster> clusters;  // ordered by lowest member id
  double threshold = 0.5;
  std::string linkage = "average";

  // Index of the cluster holding `point`, or -1.
  int cluster_of(int point) const;
  std::vector<std::vector<int>> partition() const;
};

// Point distance 1 - max(|corr(x_i,x_j)|, |corr(y_i,y_j)|), missing cells
// counting as distance 1; average linkage with lowest-id tie breaking.
EntityClustering cluster_entities(const CorrelationMatrix& panel_a, const ClusterParams& params = {});

struct ControlEdge {
  int motor = 0;
  int point = 0;
  double weight = 0.0;       // max |corr| over the point's velocity components
  double signed_corr = 0.0;  // the dominant component, with sign
  char axis = 'x';
};

struct ControllabilityGraph {
  std::vector<ControlEdge> edges;  // ordered by (motor, point)
  double threshold = 0.2;

  bool has_edge(int motor, int point) const;
  const ControlEdge* edge(int motor, int point) const;
};

ControllabilityGraph controllability_graph(const CorrelationMatrix& panel_c, double threshold = 0.2);

struct ProximoDistal {
  std::vector<int> points;                    // root -> tip
  std::vector<double> x_pairs;                // corr(x_k, x_k+1)
  std::vector<std::optional<double>> y_pairs;  // corr(y_k, y_k+1)
  bool gradient = false;                      // x pairs non-decreasing toward the tip
  std::optional<bool> y_gradient;             // only when every y pair is defined
};

ProximoDistal proximodistal_check(const CorrelationMatrix& panel_a, std::span<const int> points_root_to_tip);

struct MirrorScore {
  std::vector<int> cluster_a, cluster_b;
  PanelTag panel = PanelTag::A;
  double distance = 0.0;  // RMS cell difference, missing cells read as 0
  std::size_t cells = 0;
  std::string alignment = "index order";
};

MirrorScore mirroring_score(const CorrelationMatrix& panel, std::span<const int> cluster_a,
                            std::span<const int> cluster_b);

enum class Agency { self, other_active, passive };
std::string agency_name(Agency a);

struct AutonomyParams {
  int lag_window = 5;               // steps before (and including) t searched for contact
  double motion_epsilon = 0.05;     // normalized speed counted as movement
  double autonomy_threshold = 0.01; // autonomous-motion fraction that makes a cluster motile
  int min_controlled_points = 2;
};

struct AgencyLabel {
  std::vector<int> points;
  Agency label = Agency::passive;
  int controlled_points = 0;
  double controllability_fraction = 0.0;
  double autonomous_fraction = 0.0;
  bool motile = false;
};

std::vector<int> agent_motors(int agent);

// Labels each cluster from one agent's perspective. At most one cluster is
// labeled self.
std::vector<AgencyLabel> classify_autonomy(const TraceLog& log, const DerivedChannels& derived,
                                           const EntityClustering& clustering, const ControllabilityGraph& graph,
                                           int perspective_agent, const AutonomyParams& params = {});

struct AgencyParams {
  int perspective = 0;
  ClusterParams cluster;
  double control_threshold = 0.2;
  AutonomyParams autonomy;
};

struct AgencyAnalysis {
  AgencyParams params;
  EntityClustering clustering;
  ControllabilityGraph graph;
  std::vector<AgencyLabel> labels;
  std::vector<std::optional<ProximoDistal>> proximodistal;  // bottom arm, top arm; empty when cells are missing
  std::vector<MirrorScore> mirroring;
};

AgencyAnalysis analyze_agency(const CorrelationMatrix& panel_a, const CorrelationMatrix& panel_b,
                              const CorrelationMatrix& panel_c, const TraceLog& log, const DerivedChannels& derived,
                              const AgencyParams& params);

}  // namespace smca
