#include "coshare/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "coshare/error.hpp"
#include "coshare/rng.hpp"

namespace coshare {

MetricsReport compute_metrics(const Model& model, const std::vector<AssignmentOutcome>& outcomes,
                              const std::vector<double>& class_requirements) {
  MetricsReport m;
  m.flows = model.flows.size();
  std::set<InstanceIndex> primaries, used;
  std::set<NodeId> used_nodes, placed_nodes;
  std::vector<std::set<InstanceIndex>> class_primaries(class_requirements.size());
  std::vector<std::set<InstanceIndex>> class_used(class_requirements.size());
  m.classes.resize(class_requirements.size());
  for (std::size_t c = 0; c < class_requirements.size(); ++c) {
    m.classes[c].avail_class = static_cast<int>(c);
    m.classes[c].requirement = class_requirements[c];
  }
  for (const auto& inst : model.instances) {
    if (inst.role == InstanceRole::kBackup) {
      ++m.backups_placed;
      placed_nodes.insert(inst.host);
    }
  }
  for (const auto& flow : model.flows) {
    const auto c = static_cast<std::size_t>(flow.avail_class);
    if (c >= m.classes.size()) throw ValidationError("flow '" + flow.id + "': class out of range");
    ++m.classes[c].flows;
    if (!flow.primary) continue;
    for (InstanceIndex v : flow.primary->instances) {
      primaries.insert(v);
      class_primaries[c].insert(v);
    }
  }
  for (const auto& o : outcomes) {
    const auto c = static_cast<std::size_t>(model.flows[o.flow].avail_class);
    if (!o.accepted) continue;
    ++m.accepted;
    ++m.classes[c].accepted;
    for (const auto& chain : o.chains) {
      for (InstanceIndex v : chain.instances) {
        used.insert(v);
        class_used[c].insert(v);
        used_nodes.insert(model.instances[v].host);
      }
    }
  }
  m.primaries = primaries.size();
  m.backups_used = used.size();
  m.nodes_used = used_nodes.size();
  m.nodes_placed = placed_nodes.size();
  m.acceptance_ratio = m.flows == 0 ? 1.0 : static_cast<double>(m.accepted) / static_cast<double>(m.flows);
  m.overbuild = m.primaries == 0 ? 0.0 : static_cast<double>(m.backups_used) / static_cast<double>(m.primaries);
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    auto& cm = m.classes[c];
    cm.primaries = class_primaries[c].size();
    cm.backups_used = class_used[c].size();
    cm.acceptance_ratio = cm.flows == 0 ? 1.0 : static_cast<double>(cm.accepted) / static_cast<double>(cm.flows);
    cm.overbuild = cm.primaries == 0 ? 0.0
                                     : static_cast<double>(cm.backups_used) / static_cast<double>(cm.primaries);
  }
  return m;
}

PipelineOptions pipeline_options(const ScenarioConfig& config, std::uint64_t seed) {
  PipelineOptions o;
  o.structure = config.structure;
  o.order = config.order;
  o.class_order = config.class_order;
  o.independence = config.independence;
  o.correlation_aware = config.correlation_aware;
  o.random_placement = config.random_placement;
  o.assignment = config.assignment;
  o.assignment.correlation_aware = config.correlation_aware;
  o.x_max = config.x_max;
  o.threads = config.threads;
  for (const auto& t : config.nf_types) o.backup_avail.push_back(t.avail);
  o.seed = seed;
  return o;
}

void materialize_backups(Model& model, const PlacementResult& placement,
                         const std::vector<Range>& backup_avail, std::uint64_t seed) {
  Stream s(seed, "backup_instance_avail");
  std::size_t k = 0;
  for (const auto& p : placement.placed) {
    double a = model.types[p.type].avail;
    if (!backup_avail.empty()) {
      const auto& r = backup_avail.at(p.type);
      a = r.lo == r.hi ? r.lo : s.uniform(r.lo, r.hi);
    }
    model.add_instance("b" + std::to_string(k++), p.type, p.host, InstanceRole::kBackup, a);
  }
}

PipelineResult run_pipeline(Model model, const std::vector<NodeBudget>& backup_budget,
                            const std::vector<double>& class_requirements,
                            const PipelineOptions& options, const DependencyProfile* profile) {
  PipelineResult r;
  r.seed = options.seed;
  r.class_requirements = class_requirements;
  r.profile = profile ? *profile
                      : DependencyProfile(compute_di_table(model.net, options.threads), options.structure);

  EstimateInputs in;
  in.class_requirements = class_requirements;
  in.x_max = options.x_max;
  for (NodeId n = 0; n < model.net.size(); ++n) {
    if (!model.net.is_end(n) && backup_budget.at(n).cores > 0) in.backup_nodes.push_back(n);
  }
  r.demand = estimate_demand(model, in);

  if (options.random_placement) {
    r.placement = place_backups_random(model.net, model.types, r.demand, backup_budget, options.seed);
  } else {
    std::map<int, std::vector<NodeId>> primary_nodes;
    for (const auto& f : model.flows) {
      if (!f.primary) continue;
      auto& v = primary_nodes[f.avail_class];
      v.insert(v.end(), f.primary->hosts.begin(), f.primary->hosts.end());
    }
    for (auto& [c, v] : primary_nodes) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    PlacementOptions po;
    po.class_order = options.class_order;
    po.correlation_aware = options.correlation_aware;
    r.placement = place_backups(model.net, model.types, r.demand, r.profile, primary_nodes,
                                backup_budget, po);
  }
  materialize_backups(model, r.placement, options.backup_avail, options.seed);

  AssignmentOptions ao = options.assignment;
  if (options.random_placement) {
    ao.correlation_aware = false;
    ao.exclude_primary_hosts = false;
  }
  r.model = std::move(model);
  const FlowIndependence independence(r.model, options.independence);
  Assigner assigner(r.model, r.profile, independence, ao);
  r.outcomes = assigner.run_assignment(options.order);
  r.metrics = compute_metrics(r.model, r.outcomes, class_requirements);
  return r;
}

PipelineResult run_once(const ScenarioConfig& config, std::uint64_t seed) {
  Scenario sc = build_scenario(config, seed);
  return run_pipeline(std::move(sc.model), sc.backup_budget, sc.class_requirements,
                      pipeline_options(config, seed));
}

std::uint64_t run_seed(std::uint64_t base, int k) {
  return k == 0 ? base : mix64(base + static_cast<std::uint64_t>(k));
}

Interval mean_ci(const std::vector<double>& samples) {
  Interval out;
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / n;
  if (samples.size() < 2) return out;
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  // two-sided 95% Student t quantiles, df = 1..30
  static constexpr double kT[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                  2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                  2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  const std::size_t df = samples.size() - 1;
  const double t = df <= 30 ? kT[df - 1] : 1.96;
  out.half_width = t * sd / std::sqrt(n);
  return out;
}

ExperimentReport run_experiment(const ScenarioConfig& config) {
  ExperimentReport rep;
  rep.config = config;
  for (int k = 0; k < config.runs; ++k) rep.runs.push_back(run_once(config, run_seed(config.seed, k)));

  std::vector<double> used, over;
  const std::size_t classes = config.classes.size();
  std::vector<std::vector<double>> cu(classes), co(classes), ca(classes);
  for (const auto& r : rep.runs) {
    used.push_back(static_cast<double>(r.metrics.backups_used));
    over.push_back(r.metrics.overbuild);
    for (std::size_t c = 0; c < classes; ++c) {
      cu[c].push_back(static_cast<double>(r.metrics.classes[c].backups_used));
      co[c].push_back(r.metrics.classes[c].overbuild);
      ca[c].push_back(r.metrics.classes[c].acceptance_ratio);
    }
  }
  rep.backups_used = mean_ci(used);
  rep.overbuild = mean_ci(over);
  for (std::size_t c = 0; c < classes; ++c) {
    rep.class_backups_used.push_back(mean_ci(cu[c]));
    rep.class_overbuild.push_back(mean_ci(co[c]));
    rep.class_acceptance.push_back(mean_ci(ca[c]));
  }
  if (config.simulation && !rep.runs.empty()) {
    rep.simulation = simulate(make_sim_plan(rep.runs[0].model, rep.runs[0].outcomes), *config.simulation);
  }
  return rep;
}

double correlated_coverage(const Network& net, const DependencyProfile& profile) {
  if (net.size() == 0) return 0.0;
  std::vector<bool> covered(net.size(), false);
  for (NodeId n = 0; n < net.size(); ++n) {
    if (net.is_end(n)) continue;
    for (NodeId b : profile.correlated(n)) covered[b] = true;
  }
  const auto count = std::count(covered.begin(), covered.end(), true);
  return static_cast<double>(count) / static_cast<double>(net.size());
}

std::vector<SweepPoint> threshold_sweep(const ScenarioConfig& config, const std::vector<double>& t_values) {
  const Scenario sc = build_scenario(config, config.seed);
  const auto options = pipeline_options(config, config.seed);
  const DependencyProfile base(compute_di_table(sc.model.net, config.threads), config.structure);
  std::vector<SweepPoint> out;
  for (double t : t_values) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("sweep threshold outside (0,1)");
    const auto profile = base.with_threshold(t);
    const auto r = run_pipeline(sc.model, sc.backup_budget, sc.class_requirements, options, &profile);
    SweepPoint p;
    p.t_di = t;
    p.backups_estimated = r.demand.total();
    p.backups_placed = r.metrics.backups_placed;
    p.backups_used = r.metrics.backups_used;
    p.coverage = correlated_coverage(sc.model.net, profile);
    out.push_back(p);
  }
  return out;
}

CorrelationExperiment correlation_experiment(const ScenarioConfig& config, const SimConfig& sim) {
  const Scenario sc = build_scenario(config, config.seed);
  auto options = pipeline_options(config, config.seed);
  options.random_placement = false;
  options.correlation_aware = true;
  options.assignment.correlation_aware = true;
  const DependencyProfile profile(compute_di_table(sc.model.net, config.threads), config.structure);
  CorrelationExperiment ex;
  ex.aware = run_pipeline(sc.model, sc.backup_budget, sc.class_requirements, options, &profile);
  options.random_placement = true;
  ex.random = run_pipeline(sc.model, sc.backup_budget, sc.class_requirements, options, &profile);
  auto [a, b] = compare_placements(make_sim_plan(ex.aware.model, ex.aware.outcomes),
                                   make_sim_plan(ex.random.model, ex.random.outcomes), sim);
  ex.aware_report = std::move(a);
  ex.random_report = std::move(b);
  return ex;
}

}  // namespace coshare
