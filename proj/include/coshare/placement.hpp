#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "coshare/estimate.hpp"
#include "coshare/structure.hpp"

namespace coshare {

enum class ClassOrder { kDescending, kAscending };

ClassOrder parse_class_order(const std::string& s);
const char* to_string(ClassOrder order);

struct NodeBudget {
  int cores = 0;
  int mem_gb = 0;
};

struct PlacementOptions {
  ClassOrder class_order = ClassOrder::kDescending;
  // When false, every node goes to the first queue (no correlation avoidance).
  bool correlation_aware = true;
};

struct PlacedInstance {
  TypeIndex type = 0;
  int avail_class = 0;
  NodeId host = 0;
};

struct PlacementResult {
  std::vector<PlacedInstance> placed;          // in placement order
  std::map<std::pair<TypeIndex, int>, int> unplaced;  // (type, class) -> shortfall
  std::vector<NodeId> nodes_used;              // ascending
  std::vector<NodeBudget> remaining;           // per node, after placement
};

// Node queues for one class: Q' holds candidate nodes outside every B^_n of
// the class's primary hosts (and not hosting those primaries), Q'' the rest.
// Both are sorted by availability descending, then node id.
struct NodeQueues {
  std::vector<NodeId> uncorrelated;
  std::vector<NodeId> other;
};
NodeQueues class_node_queues(const Network& net, const DependencyProfile& profile,
                             const std::vector<NodeId>& primary_nodes, bool correlation_aware);

// Bin-packs the estimated backup instances onto nodes. Classes are visited by
// requirement (descending by default); within a class NF types are taken by
// z_v(c) descending and rotated after each placement so one node receives
// different types. When the active node cannot fit the current type, the
// node is retired and the next one in Q' (then Q'') becomes active.
PlacementResult place_backups(const Network& net, const std::vector<NfType>& types,
                              const BackupDemand& demand, const DependencyProfile& profile,
                              const std::map<int, std::vector<NodeId>>& primary_nodes_by_class,
                              std::vector<NodeBudget> budget, const PlacementOptions& options = {});

// Baseline that ignores structure: each estimated instance goes to a uniformly
// random non-end node with room left.
PlacementResult place_backups_random(const Network& net, const std::vector<NfType>& types,
                                     const BackupDemand& demand, std::vector<NodeBudget> budget,
                                     std::uint64_t seed);

}  // namespace coshare
