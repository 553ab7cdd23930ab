#include "coshare/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "coshare/error.hpp"

namespace coshare {

std::optional<int> chains_needed(double class_req, double worst_primary, double worst_node,
                                 double worst_instance, int g, int x_max) {
  if (worst_primary >= class_req) return 0;
  const double chain = std::pow(worst_node * worst_instance, g);
  double down = 1.0 - worst_primary;
  for (int x = 1; x <= x_max; ++x) {
    down *= 1.0 - chain;
    if (1.0 - down >= class_req) return x;
  }
  return std::nullopt;
}

int instances_needed(std::span<const FlowSpec> class_flows, TypeIndex nf, double capacity, int h) {
  if (h <= 0) return 0;
  double load = 0.0;
  for (const auto& f : class_flows) {
    if (std::find(f.chain.begin(), f.chain.end(), nf) != f.chain.end()) load += f.rate;
  }
  if (load <= 0.0) return 0;
  // guard against 1.5/10*10 style rounding just above an integer
  const double ratio = load / capacity;
  const double rounded = std::round(ratio);
  const int slots = std::abs(ratio - rounded) < 1e-9 ? static_cast<int>(rounded)
                                                     : static_cast<int>(std::ceil(ratio));
  return h * slots;
}

int BackupDemand::h(int avail_class) const {
  for (const auto& c : classes) {
    if (c.avail_class == avail_class) return c.chains.value_or(0);
  }
  return 0;
}

int BackupDemand::count(TypeIndex type, int avail_class) const {
  auto it = z.find({type, avail_class});
  return it == z.end() ? 0 : it->second;
}

int BackupDemand::total() const {
  int sum = 0;
  for (int t : z_total) sum += t;
  return sum;
}

BackupDemand estimate_demand(const Model& model, const EstimateInputs& inputs) {
  BackupDemand demand;
  demand.z_total.assign(model.types.size(), 0);

  double worst_node = 1.0;
  for (NodeId n : inputs.backup_nodes) worst_node = std::min(worst_node, model.net.avail(n));
  double worst_instance = 1.0;
  for (const auto& t : model.types) worst_instance = std::min(worst_instance, t.avail);

  for (int c = 0; c < static_cast<int>(inputs.class_requirements.size()); ++c) {
    std::vector<FlowSpec> members;
    for (const auto& f : model.flows) {
      if (f.avail_class == c) members.push_back(f);
    }
    ClassEstimate est;
    est.avail_class = c;
    est.requirement = inputs.class_requirements[c];
    est.flow_count = members.size();
    est.worst_node = worst_node;
    est.worst_instance = worst_instance;
    if (members.empty()) {
      est.chains = 0;
      demand.classes.push_back(est);
      continue;
    }
    for (const auto& f : members) {
      if (!f.primary) throw ValidationError("flow '" + f.id + "' has no primary binding");
      est.worst_primary = std::min(est.worst_primary, f.primary->avail);
      est.max_chain_length = std::max(est.max_chain_length, static_cast<int>(f.chain.size()));
    }
    est.chains = chains_needed(est.requirement, est.worst_primary, worst_node, worst_instance,
                               est.max_chain_length, inputs.x_max);
    const int h = est.chains.value_or(0);
    for (TypeIndex t = 0; t < model.types.size(); ++t) {
      const int z = instances_needed(members, t, model.types[t].capacity, h);
      if (z > 0) {
        demand.z[{t, c}] = z;
        demand.z_total[t] += z;
      }
    }
    demand.classes.push_back(est);
  }
  return demand;
}

}  // namespace coshare
