#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coshare/harness.hpp"
#include "coshare/montecarlo.hpp"

namespace coshare {

// AllocationPlan: network, NF catalog, instances with ledgers, per-flow
// status and chains, metrics. Self-contained, so `simulate` needs nothing else.
nlohmann::json plan_to_json(const PipelineResult& result);
nlohmann::json metrics_to_json(const MetricsReport& metrics);
nlohmann::json experiment_to_json(const ExperimentReport& report);

// Accepts a plan document or an experiment document (uses its "plan").
// Throws ConfigError on malformed input.
SimPlan sim_plan_from_json(const nlohmann::json& doc);

nlohmann::json sim_report_to_json(const SimReport& report);
std::string cdf_csv(const SimReport& report);

nlohmann::json demand_to_json(const Model& model, const BackupDemand& demand);
nlohmann::json placement_to_json(const Model& model, const PlacementResult& placement);
std::string placement_csv(const Model& model, const PlacementResult& placement);

nlohmann::json profile_to_json(const Network& net, const DependencyProfile& profile);
std::string di_csv(const Network& net, const DiTable& di);

nlohmann::json sweep_to_json(const std::vector<SweepPoint>& points);
std::string sweep_csv(const std::vector<SweepPoint>& points);

// Per-class summary table from an experiment document.
std::string report_csv(const nlohmann::json& experiment);

// Stable serialization used for every emitted document.
std::string dump(const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);

}  // namespace coshare
