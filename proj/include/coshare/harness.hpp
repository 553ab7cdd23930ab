#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coshare/assignment.hpp"
#include "coshare/estimate.hpp"
#include "coshare/montecarlo.hpp"
#include "coshare/placement.hpp"
#include "coshare/scenario.hpp"
#include "coshare/structure.hpp"

namespace coshare {

struct ClassMetrics {
  int avail_class = 0;
  double requirement = 0.0;
  std::size_t flows = 0;
  std::size_t accepted = 0;
  double acceptance_ratio = 1.0;  // 1 for an empty class
  std::size_t primaries = 0;      // distinct primaries serving the class
  std::size_t backups_used = 0;   // distinct backups serving the class
  double overbuild = 0.0;
};

struct MetricsReport {
  std::size_t flows = 0;
  std::size_t accepted = 0;
  double acceptance_ratio = 1.0;
  std::size_t primaries = 0;
  std::size_t backups_placed = 0;
  std::size_t backups_used = 0;
  double overbuild = 0.0;      // backups used / primaries
  std::size_t nodes_used = 0;  // nodes hosting at least one used backup
  std::size_t nodes_placed = 0;
  std::vector<ClassMetrics> classes;
};

MetricsReport compute_metrics(const Model& model, const std::vector<AssignmentOutcome>& outcomes,
                              const std::vector<double>& class_requirements);

struct PipelineOptions {
  StructureOptions structure;
  OrderPolicy order = OrderPolicy::kChainLengthDesc;
  ClassOrder class_order = ClassOrder::kDescending;
  IndependenceRule independence = IndependenceRule::kHostingNodes;
  bool correlation_aware = true;
  // Random placement also drops anti-affinity in assignment, so backups may
  // share hosts with the primaries they protect.
  bool random_placement = false;
  AssignmentOptions assignment;
  int x_max = kDefaultMaxChains;
  unsigned threads = 0;
  // Per NF type; backups draw from these on "backup_instance_avail". Empty
  // means every backup gets its type's nominal availability.
  std::vector<Range> backup_avail;
  std::uint64_t seed = 1;
};

PipelineOptions pipeline_options(const ScenarioConfig& config, std::uint64_t seed);

struct PipelineResult {
  Model model;
  DependencyProfile profile;
  BackupDemand demand;
  PlacementResult placement;
  std::vector<AssignmentOutcome> outcomes;
  MetricsReport metrics;
  std::vector<double> class_requirements;
  std::uint64_t seed = 0;
};

// Adds one backup instance per placed entry ("b0", "b1", ...).
void materialize_backups(Model& model, const PlacementResult& placement,
                         const std::vector<Range>& backup_avail, std::uint64_t seed);

// analyze -> estimate -> place -> assign on a model whose flows already have
// primaries. `profile` may be passed to skip the DI computation.
PipelineResult run_pipeline(Model model, const std::vector<NodeBudget>& backup_budget,
                            const std::vector<double>& class_requirements,
                            const PipelineOptions& options,
                            const DependencyProfile* profile = nullptr);

// Scenario build plus pipeline for one seed.
PipelineResult run_once(const ScenarioConfig& config, std::uint64_t seed);

// Seed of run k: the config seed for k = 0, derived otherwise.
std::uint64_t run_seed(std::uint64_t base, int k);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 95%, Student t
};
Interval mean_ci(const std::vector<double>& samples);

struct ExperimentReport {
  ScenarioConfig config;
  std::vector<PipelineResult> runs;
  std::optional<SimReport> simulation;  // of the first run
  Interval backups_used;
  Interval overbuild;
  std::vector<Interval> class_backups_used;
  std::vector<Interval> class_overbuild;
  std::vector<Interval> class_acceptance;
};

ExperimentReport run_experiment(const ScenarioConfig& config);

struct SweepPoint {
  double t_di = 0.0;
  int backups_estimated = 0;
  std::size_t backups_placed = 0;
  std::size_t backups_used = 0;
  double coverage = 0.0;  // fraction of nodes inside some correlated set
};

// Fraction of nodes that belong to B^_n for at least one non-end node n.
double correlated_coverage(const Network& net, const DependencyProfile& profile);

// Reruns the pipeline per threshold on the first-run scenario; the DI table
// is computed once.
std::vector<SweepPoint> threshold_sweep(const ScenarioConfig& config, const std::vector<double>& t_values);

struct CorrelationExperiment {
  PipelineResult aware;
  PipelineResult random;
  SimReport aware_report;
  SimReport random_report;
};

// Correlation-aware vs random placement on one scenario, simulated with
// common random numbers.
CorrelationExperiment correlation_experiment(const ScenarioConfig& config, const SimConfig& sim);

}  // namespace coshare
