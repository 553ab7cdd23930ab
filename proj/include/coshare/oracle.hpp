#pragma once

#include <cstdint>
#include <vector>

#include "coshare/netmodel.hpp"
#include "coshare/placement.hpp"
#include "coshare/structure.hpp"

namespace coshare {

// Tiny instance for exhaustive search: at most 8 nodes, 6 flows, 3 NF types
// and chain length 2. Flows carry bound primaries; the model holds no backup
// instances. Backup instances get their type's nominal availability.
struct TinyScenario {
  Model model;
  std::vector<NodeBudget> budget;  // backup budget per node
  StructureOptions structure;
  bool correlation_aware = true;
  IndependenceRule independence = IndependenceRule::kHostingNodes;
  int max_backups = 8;
  int max_chains_per_flow = 3;
  double time_budget_s = 0.0;  // 0 = unlimited
};

struct OracleResult {
  bool feasible = false;  // some placement within max_backups serves every flow
  int count = 0;          // minimum number of backup instances
  std::vector<PlacedInstance> placement;
  // chains[f] = backup chains of flow f, as indices into `placement`
  std::vector<std::vector<std::vector<std::size_t>>> chains;
  std::uint64_t placements_examined = 0;
  bool complete = true;  // false if the time budget expired
};

// Number of candidate placements (multisets of (type, node) slots up to
// max_backups instances) the search may visit.
std::uint64_t search_space_size(const TinyScenario& scenario);

inline constexpr std::uint64_t kOracleSearchBound = 100'000'000;

// Minimum total number of backup instances such that every flow meets its
// requirement under the scenario's reservation mode (Model::mode). Throws
// ValidationError for out-of-range scenarios or when the search space
// exceeds `bound` (the message carries the computed size).
OracleResult exhaustive_min_backups(const TinyScenario& scenario,
                                    std::uint64_t bound = kOracleSearchBound);

// DI table by a deliberately naive route: per-pair BFS on an adjacency
// matrix, nothing shared with the structure module. |N| <= 12.
DiTable independent_di_recompute(const Network& net);

}  // namespace coshare
