#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coshare/assignment.hpp"
#include "coshare/montecarlo.hpp"
#include "coshare/netmodel.hpp"
#include "coshare/placement.hpp"
#include "coshare/structure.hpp"
#include "coshare/topology.hpp"

namespace coshare {

// Closed interval for drawn availabilities; lo == hi means a fixed value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct TopologySource {
  enum class Kind { kGenerate, kFile, kInline };
  Kind kind = Kind::kGenerate;
  std::string path;  // kFile, resolved against the config's directory
  std::string text;  // kInline
  IspTopologyParams generate;
};

struct NfTypeConfig {
  std::string name;
  int cores = 1;
  int mem_gb = 2;
  double capacity = 10e6;
  Range avail{0.999, 0.9999};
};

struct FlowGeneration {
  std::size_t count = 100;
  int chain_min = 2;
  int chain_max = 4;
  std::vector<double> class_mix;  // weights per class; empty = uniform
  double rate = 0.5e6;
};

struct ExplicitFlow {
  std::string id;
  std::string src;
  std::string dst;
  double rate = 0.5e6;
  std::vector<std::string> chain;
  std::optional<int> avail_class;
  std::optional<double> avail_req;
  // externally computed primary binding, passed through unchanged
  std::vector<std::string> primary_instances;
  std::vector<std::string> primary_path;
};

struct PrimaryInstanceSpec {
  std::string id;
  std::string type;
  std::string host;
  double avail = 0.999;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  TopologySource topology;
  std::optional<std::size_t> end_nodes;  // lowest-degree nodes become endpoints

  int node_cores = 8;
  int backup_cores = 4;
  int node_mem_gb = 16;
  int backup_mem_gb = 8;
  std::optional<Range> node_avail = Range{0.99, 0.999};  // nullopt keeps topology values

  std::vector<NfTypeConfig> nf_types;
  std::vector<double> classes{0.999, 0.9999, 0.99999};
  std::optional<FlowGeneration> flow_generation;
  std::vector<ExplicitFlow> flows;
  std::vector<PrimaryInstanceSpec> primary_instances;

  StructureOptions structure;
  ReservationMode mode = ReservationMode::kShared;
  OrderPolicy order = OrderPolicy::kChainLengthDesc;
  ClassOrder class_order = ClassOrder::kDescending;
  IndependenceRule independence = IndependenceRule::kHostingNodes;
  bool correlation_aware = true;
  bool random_placement = false;
  AssignmentOptions assignment;
  int x_max = kDefaultMaxChains;
  int runs = 1;
  unsigned threads = 0;
  std::optional<SimConfig> simulation;
};

// Defaults: five NF types Firewall, DPI, NAT, IDS, Proxy.
std::vector<NfTypeConfig> default_nf_catalog();

// Throws ConfigError with the offending key.
ScenarioConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
ScenarioConfig load_config_file(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& config);

// A materialized scenario: flows bound to primaries, per-node backup budgets.
struct Scenario {
  Model model;
  std::vector<NodeBudget> backup_budget;
  std::vector<double> class_requirements;
  std::uint64_t seed = 0;
  std::vector<std::string> streams;  // named generation streams, for replay
};

Network build_network(const ScenarioConfig& config, std::uint64_t seed);

// Builds the network, NF catalog and flows, then binds primaries (from the
// config if given, else greedily). Throws ConfigError or InfeasibleScenario.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct PrimaryBudget {
  std::vector<NodeBudget> free;  // per node
};

// Greedy stand-in for a primary allocator: route each flow on a shortest
// path; per NF reuse a primary of that type on the path with spare capacity,
// else create one on the path node with most free cores. Off the path, the
// nearest spare primary of that type or non-end node with room is used,
// reuse winning ties. New instances draw their availability
// from `type_avail` on the "primary_instance_avail" stream. Throws
// InfeasibleScenario.
void provision_primaries(Model& model, PrimaryBudget& budget, const std::vector<Range>& type_avail,
                         std::uint64_t seed);

}  // namespace coshare
