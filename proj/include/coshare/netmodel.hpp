#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coshare/topology.hpp"

namespace coshare {

using TypeIndex = std::size_t;
using InstanceIndex = std::size_t;
using FlowIndex = std::size_t;

enum class ReservationMode { kDedicated, kShared };
enum class InstanceRole { kPrimary, kBackup };

// How "disjoint primary service paths" is read when deciding flow independence.
enum class IndependenceRule {
  kHostingNodes,  // primary hosting nodes and primary instances disjoint
  kFullPath,      // additionally, interior transit nodes of the primary paths disjoint
};

const char* to_string(ReservationMode mode);
ReservationMode parse_reservation_mode(const std::string& s);
const char* to_string(InstanceRole role);
const char* to_string(IndependenceRule rule);
IndependenceRule parse_independence_rule(const std::string& s);

struct NfType {
  std::string name;
  int cores = 1;         // k_v
  int mem_gb = 2;
  double capacity = 10e6;  // mu_v, packets per second
  double avail = 0.999;    // A_v (nominal; also the worst case used for estimation)
};

using IndependenceFn = std::function<bool(FlowIndex, FlowIndex)>;

struct SharingGroup {
  std::vector<FlowIndex> members;
  std::vector<double> rates;  // parallel to members
  double rate = 0.0;          // max of rates

  void recompute() {
    rate = 0.0;
    for (double r : rates) rate = std::max(rate, r);
  }
};

// Capacity reservations held by one instance. In dedicated mode every flow is
// its own group; in shared mode a group holds pairwise-independent flows and
// reserves only the largest member rate.
class ReservationLedger {
 public:
  ReservationLedger(ReservationMode mode, double capacity);

  ReservationMode mode() const { return mode_; }
  double capacity() const { return capacity_; }
  double reserved() const;
  double free() const { return capacity_ - reserved(); }
  bool empty() const { return groups_.empty(); }

  bool contains(FlowIndex f) const;
  // D_v, in admission order.
  std::vector<FlowIndex> flows() const;
  // Sum of member rates, regardless of grouping.
  double demand() const;
  const std::vector<SharingGroup>& groups() const { return groups_; }
  // SR_v(f): the other members of f's group (empty if f is absent).
  std::vector<FlowIndex> sharing_with(FlowIndex f) const;

  // First existing group (creation order) the flow can join: pairwise
  // independent of every member and the rate increase fits. Dedicated mode
  // never shares.
  std::optional<std::size_t> shareable_group(FlowIndex f, double rate,
                                             const IndependenceFn& independent) const;
  bool can_admit(FlowIndex f, double rate, const IndependenceFn& independent) const;
  // Returns false (ledger unchanged) when the flow cannot be admitted or is
  // already present.
  bool reserve(FlowIndex f, double rate, const IndependenceFn& independent);
  void release(FlowIndex f);

  // Invariant checks.
  bool within_capacity() const;
  bool groups_independent(const IndependenceFn& independent) const;

 private:
  bool fits(double extra) const;

  ReservationMode mode_;
  double capacity_;
  std::vector<SharingGroup> groups_;
};

struct NfInstance {
  std::string id;
  TypeIndex type = 0;
  NodeId host = 0;
  InstanceRole role = InstanceRole::kBackup;
  double avail = 0.999;
  ReservationLedger ledger{ReservationMode::kDedicated, 0.0};
};

struct PrimaryBinding {
  std::vector<InstanceIndex> instances;  // one per chain position
  std::vector<NodeId> path;              // src .. dst node sequence
  std::vector<NodeId> hosts;             // distinct hosting nodes, ascending
  double avail = 1.0;                    // A_f^p
};

struct FlowSpec {
  std::string id;
  NodeId src = 0;
  NodeId dst = 0;
  double rate = 0.5e6;  // lambda_f, pps
  std::vector<TypeIndex> chain;
  int avail_class = 0;
  double avail_req = 0.999;
  std::optional<PrimaryBinding> primary;
};

struct BackupChain {
  FlowIndex flow = 0;
  std::vector<InstanceIndex> instances;
};

// Everything the allocation pipeline mutates: network, NF catalog, instances
// (primary and backup) with their ledgers, and flows.
struct Model {
  Network net;
  std::vector<NfType> types;
  std::vector<NfInstance> instances;
  std::vector<FlowSpec> flows;
  ReservationMode mode = ReservationMode::kDedicated;

  // Throws ValidationError for unknown names.
  TypeIndex type_index(const std::string& name) const;
  std::optional<InstanceIndex> find_instance(const std::string& id) const;

  // Appends an instance with an empty ledger in the model's mode. Throws
  // ValidationError if the host is an end node.
  InstanceIndex add_instance(std::string id, TypeIndex type, NodeId host, InstanceRole role,
                             double avail);

  // Binds a primary chain and computes hosts and A_f^p. Validates that the
  // instance types match the chain in order.
  void bind_primary(FlowIndex f, std::vector<InstanceIndex> instances, std::vector<NodeId> path);

  // Distinct hosting nodes of a chain, ascending.
  std::vector<NodeId> hosts_of(std::span<const InstanceIndex> chain) const;
};

// Availability of a chain of instances: product of instance availabilities
// times the product over distinct hosting nodes.
double chain_availability(const Model& model, std::span<const InstanceIndex> chain);

// Parallel combination of the primary chain with backup chains.
double service_availability(double primary_avail, std::span<const double> backup_avails);

// Throws ValidationError if either flow has no bound primary. A flow is never
// independent of itself (same id).
bool flows_independent(const FlowSpec& a, const FlowSpec& b,
                       IndependenceRule rule = IndependenceRule::kHostingNodes);

// Pairwise independence over all flows of a model, precomputed.
class FlowIndependence {
 public:
  FlowIndependence() = default;
  FlowIndependence(const Model& model, IndependenceRule rule);

  bool operator()(FlowIndex a, FlowIndex b) const { return table_[a * n_ + b] != 0; }
  IndependenceFn fn() const {
    return [this](FlowIndex a, FlowIndex b) { return (*this)(a, b); };
  }

 private:
  std::size_t n_ = 0;
  std::vector<unsigned char> table_;
};

bool reserve(NfInstance& instance, FlowIndex flow, double rate, const IndependenceFn& independent);
double free_capacity(const NfInstance& instance);

}  // namespace coshare
