#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coshare/netmodel.hpp"

namespace coshare {

inline constexpr int kDefaultMaxChains = 10;

// Smallest x >= 1 with 1 - (1 - worst_primary) * (1 - A~)^x >= class_req,
// where A~ = (worst_node * worst_instance)^g. Returns 0 when the primary alone
// already meets the requirement, nullopt when no x <= x_max does.
std::optional<int> chains_needed(double class_req, double worst_primary, double worst_node,
                                 double worst_instance, int g, int x_max = kDefaultMaxChains);

// h_c * ceil(sum of rates of class flows using `nf` / capacity).
int instances_needed(std::span<const FlowSpec> class_flows, TypeIndex nf, double capacity, int h);

struct ClassEstimate {
  int avail_class = 0;
  double requirement = 0.0;
  std::size_t flow_count = 0;
  double worst_primary = 1.0;
  double worst_node = 1.0;
  double worst_instance = 1.0;
  int max_chain_length = 0;
  std::optional<int> chains;  // h_c; nullopt = infeasible within x_max
};

struct BackupDemand {
  std::vector<ClassEstimate> classes;          // ascending class id
  std::map<std::pair<TypeIndex, int>, int> z;  // (NF type, class) -> z_v(c)
  std::vector<int> z_total;                    // per NF type, sum over classes

  int h(int avail_class) const;
  int count(TypeIndex type, int avail_class) const;
  int total() const;
};

struct EstimateInputs {
  // Requirement per class id; flows reference classes by index.
  std::vector<double> class_requirements;
  // Backup-capable nodes: non-end nodes with remaining backup cores > 0.
  std::vector<NodeId> backup_nodes;
  int x_max = kDefaultMaxChains;
};

// Rough per-class chain counts and per-NF instance counts for a model whose
// flows have bound primaries.
BackupDemand estimate_demand(const Model& model, const EstimateInputs& inputs);

}  // namespace coshare
