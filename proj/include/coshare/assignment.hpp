#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coshare/estimate.hpp"
#include "coshare/netmodel.hpp"
#include "coshare/structure.hpp"

namespace coshare {

enum class RejectReason {
  kNone,
  kNoCandidates,            // some NF has no admissible, uncorrelated backup instance
  kInsufficientCandidates,  // an additional backup chain could not be formed
  kNoPath,                  // every composition violates the hop budget
};
const char* to_string(RejectReason reason);

enum class OrderPolicy { kInput, kChainLengthDesc, kChainLengthAsc, kAvailDesc, kAvailAsc };
OrderPolicy parse_order_policy(const std::string& s);
const char* to_string(OrderPolicy policy);

struct AssignmentOptions {
  bool correlation_aware = true;
  // When false, backups may land on the flow's own primary hosts (used only to
  // model placement that ignores anti-affinity altogether).
  bool exclude_primary_hosts = true;
  // Reject compositions whose instances share a host instead of scoring them
  // conservatively with per-instance composites.
  bool strict_distinct_hosts = false;
  std::optional<int> hop_budget;  // stage-path hop filter; disabled by default
  int k_paths = 3;
  std::size_t max_compositions = 10000;
  int max_chains = kDefaultMaxChains;
};

// Candidate instance ids per chain position.
using CandidateSets = std::vector<std::vector<InstanceIndex>>;

struct AvailabilityRange {
  double min = 0.0;
  double max = 0.0;
};

// MIN/MAX of 1 - (1 - primary)(1 - prod_g a_g) with a_g ranging over each
// position's composite availabilities.
AvailabilityRange availability_range(double primary_avail,
                                     const std::vector<std::vector<double>>& composites);

struct FeasibleSet {
  CandidateSets sets;
  int chains_required = 0;  // committed prefix plus the chain chosen from `sets`
  std::vector<std::vector<InstanceIndex>> committed;
  double effective_primary = 0.0;
};

struct Rejection {
  RejectReason reason = RejectReason::kNone;
};

struct ChainEnumeration {
  std::vector<std::vector<InstanceIndex>> chains;
  std::size_t examined = 0;
  bool truncated = false;
};

struct StagePath {
  std::vector<InstanceIndex> instances;
  int hops = 0;
};

// k cheapest src -> stage_1 -> ... -> stage_g -> dst paths over the multistage
// graph (stage nodes are instances, edge cost = hop distance between hosts),
// by backward dynamic programming. Ties resolve by instance sequence.
std::vector<StagePath> k_shortest_stage_paths(const Model& model, const HopMatrix& hops,
                                              NodeId src, NodeId dst, const CandidateSets& stages,
                                              int k);

struct AssignmentOutcome {
  FlowIndex flow = 0;
  bool accepted = false;
  RejectReason reason = RejectReason::kNone;
  std::vector<BackupChain> chains;
  double achieved_avail = 0.0;
  std::size_t compositions_examined = 0;
};

// Backup-chain assignment for flows with bound primaries over placed backup
// instances. Reservations are committed into the model's instance ledgers.
class Assigner {
 public:
  Assigner(Model& model, const DependencyProfile& profile, const FlowIndependence& independence,
           AssignmentOptions options = {});

  // Nodes a flow's backups must avoid: its primary hosts and their B^_n.
  std::vector<bool> exclusion_mask(FlowIndex f) const;

  std::variant<CandidateSets, Rejection> candidate_instances(FlowIndex f) const;

  // A_v * A_host(v).
  double composite(InstanceIndex v) const;

  AvailabilityRange min_max_availability(const CandidateSets& sets, double effective_primary) const;

  std::variant<FeasibleSet, Rejection> feasible_set(FlowIndex f, CandidateSets sets) const;

  // All compositions in the order of the given sets (lexicographic over
  // positions), filtered by host distinctness / hop budget when enabled and
  // truncated at max_compositions.
  std::variant<ChainEnumeration, Rejection> enumerate_chains(FlowIndex f,
                                                             const CandidateSets& sets) const;

  // g_f if the flow can share an existing reservation group on v, else the
  // instance's reserved fraction of capacity.
  double instance_weight(FlowIndex f, InstanceIndex v) const;
  double chain_weight(FlowIndex f, std::span<const InstanceIndex> chain) const;

  AssignmentOutcome assign_flow(FlowIndex f);
  std::vector<AssignmentOutcome> run_assignment(OrderPolicy policy);

  const AssignmentOptions& options() const { return options_; }

 private:
  std::vector<InstanceIndex> best_composition(const CandidateSets& sets) const;

  Model& model_;
  const DependencyProfile& profile_;
  const FlowIndependence& independence_;
  IndependenceFn independent_;
  AssignmentOptions options_;
  std::optional<HopMatrix> hops_;
};

// Processing order for a policy; stable with respect to input order.
std::vector<FlowIndex> order_flows(const Model& model, OrderPolicy policy);

}  // namespace coshare
