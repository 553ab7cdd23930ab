#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coshare/assignment.hpp"
#include "coshare/netmodel.hpp"

namespace coshare {

struct SimConfig {
  std::uint64_t replications = 1'000'000;
  std::uint64_t seed = 1;
  bool contention_aware = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Flattened, self-contained view of a plan: every sampled element carries the
// key its random stream is derived from, so two plans that share an element
// id see the same draws (common random numbers).
struct SimPlan {
  struct Node {
    std::string id;
    double avail = 1.0;
  };
  struct Instance {
    std::string id;
    double avail = 1.0;
    std::size_t host = 0;  // index into nodes
    double capacity = 0.0;
  };
  struct Flow {
    std::string id;
    double rate = 0.0;
    std::vector<std::size_t> primary;               // indices into instances
    std::vector<std::vector<std::size_t>> backups;  // backup chains
  };
  std::vector<Node> nodes;
  std::vector<Instance> instances;
  std::vector<Flow> flows;
};

// Builds a SimPlan from a model and its assignment outcomes (rejected flows
// keep only their primary).
SimPlan make_sim_plan(const Model& model, const std::vector<AssignmentOutcome>& outcomes);

// Analytic availability of every flow under the independence model.
std::vector<double> analytic_availability(const SimPlan& plan);

struct FlowEstimate {
  std::string flow;
  double availability = 0.0;
  double half_width = 0.0;  // 95% normal approximation
  std::optional<double> contention_availability;
};

struct CdfPoint {
  double unavailability = 0.0;
  double fraction = 0.0;
};

struct SimReport {
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  bool contention_aware = false;
  std::vector<FlowEstimate> flows;
  std::vector<CdfPoint> unavailability_cdf;
  // fraction of flows with estimate >= 1 - 10^-k, for k = 1..6
  std::vector<double> fraction_at_nines;

  bool operator==(const SimReport&) const;
};

inline constexpr int kMaxNines = 6;

SimReport simulate(const SimPlan& plan, const SimConfig& config);

// Both plans under the same seed: identical element ids draw identical states.
std::pair<SimReport, SimReport> compare_placements(const SimPlan& a, const SimPlan& b,
                                                   const SimConfig& config);

// Served indicator per flow for replications [first, first + count); used to
// check per-replication monotonicity under common random numbers.
std::vector<std::vector<bool>> served_indicators(const SimPlan& plan, std::uint64_t seed,
                                                 std::uint64_t first, std::uint64_t count);

}  // namespace coshare
