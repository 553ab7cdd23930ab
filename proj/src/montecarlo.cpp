#include "coshare/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "coshare/rng.hpp"

namespace coshare {

namespace {

// Per-plan sampling tables.
class Sampler {
 public:
  explicit Sampler(const SimPlan& plan, std::uint64_t seed) : plan_(plan), seed_(seed) {
    for (const auto& n : plan.nodes) {
      node_key_.push_back(hash_name("node:" + n.id));
      node_thr_.push_back(bernoulli_threshold(n.avail));
    }
    for (const auto& i : plan.instances) {
      inst_key_.push_back(hash_name("instance:" + i.id));
      inst_thr_.push_back(bernoulli_threshold(i.avail));
    }
    node_up_.resize(plan.nodes.size());
    inst_up_.resize(plan.instances.size());
    load_.resize(plan.instances.size());
  }

  void draw(std::uint64_t rep) {
    for (std::size_t n = 0; n < node_key_.size(); ++n) {
      node_up_[n] = node_thr_[n] == UINT64_MAX || counter_draw(seed_, rep, node_key_[n]) < node_thr_[n];
    }
    for (std::size_t i = 0; i < inst_key_.size(); ++i) {
      const bool self = inst_thr_[i] == UINT64_MAX ||
                        counter_draw(seed_, rep, inst_key_[i]) < inst_thr_[i];
      inst_up_[i] = self && node_up_[plan_.instances[i].host];
    }
  }

  bool chain_up(const std::vector<std::size_t>& chain) const {
    return std::all_of(chain.begin(), chain.end(), [&](std::size_t i) { return inst_up_[i] != 0; });
  }

  bool served(const SimPlan::Flow& f) const {
    if (chain_up(f.primary)) return true;
    return std::any_of(f.backups.begin(), f.backups.end(),
                       [&](const auto& c) { return chain_up(c); });
  }

  // Flows fail over to their first surviving backup chain with residual
  // capacity at every instance; processed in flow order.
  void contention(std::vector<bool>& served_out) {
    std::fill(load_.begin(), load_.end(), 0.0);
    for (std::size_t k = 0; k < plan_.flows.size(); ++k) {
      const auto& f = plan_.flows[k];
      if (chain_up(f.primary)) {
        served_out[k] = true;
        continue;
      }
      served_out[k] = false;
      for (const auto& chain : f.backups) {
        if (!chain_up(chain)) continue;
        const bool room = std::all_of(chain.begin(), chain.end(), [&](std::size_t i) {
          return load_[i] + f.rate <= plan_.instances[i].capacity * (1.0 + 1e-12);
        });
        if (!room) continue;
        for (std::size_t i : chain) load_[i] += f.rate;
        served_out[k] = true;
        break;
      }
    }
  }

 private:
  const SimPlan& plan_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> node_key_, inst_key_, node_thr_, inst_thr_;
  std::vector<char> node_up_, inst_up_;
  std::vector<double> load_;
};

struct Tally {
  std::vector<std::uint64_t> served;
  std::vector<std::uint64_t> contention_served;
};

Tally run_range(const SimPlan& plan, const SimConfig& config, std::uint64_t first,
                std::uint64_t last) {
  Sampler sampler(plan, config.seed);
  Tally t;
  t.served.assign(plan.flows.size(), 0);
  if (config.contention_aware) t.contention_served.assign(plan.flows.size(), 0);
  std::vector<bool> contention_flags(plan.flows.size());
  for (std::uint64_t rep = first; rep < last; ++rep) {
    sampler.draw(rep);
    for (std::size_t k = 0; k < plan.flows.size(); ++k) {
      if (sampler.served(plan.flows[k])) ++t.served[k];
    }
    if (config.contention_aware) {
      sampler.contention(contention_flags);
      for (std::size_t k = 0; k < plan.flows.size(); ++k) {
        if (contention_flags[k]) ++t.contention_served[k];
      }
    }
  }
  return t;
}

}  // namespace

SimPlan make_sim_plan(const Model& model, const std::vector<AssignmentOutcome>& outcomes) {
  SimPlan plan;
  for (NodeId n = 0; n < model.net.size(); ++n) {
    plan.nodes.push_back({model.net.name(n), model.net.avail(n)});
  }
  for (const auto& inst : model.instances) {
    plan.instances.push_back({inst.id, inst.avail, inst.host, inst.ledger.capacity()});
  }
  std::vector<const AssignmentOutcome*> by_flow(model.flows.size(), nullptr);
  for (const auto& o : outcomes) by_flow[o.flow] = &o;
  for (FlowIndex f = 0; f < model.flows.size(); ++f) {
    const auto& flow = model.flows[f];
    SimPlan::Flow sf;
    sf.id = flow.id;
    sf.rate = flow.rate;
    if (flow.primary) sf.primary = flow.primary->instances;
    if (by_flow[f] && by_flow[f]->accepted) {
      for (const auto& c : by_flow[f]->chains) sf.backups.push_back(c.instances);
    }
    plan.flows.push_back(std::move(sf));
  }
  return plan;
}

std::vector<double> analytic_availability(const SimPlan& plan) {
  auto chain_avail = [&](const std::vector<std::size_t>& chain) {
    double a = 1.0;
    std::vector<std::size_t> hosts;
    for (std::size_t i : chain) {
      a *= plan.instances[i].avail;
      hosts.push_back(plan.instances[i].host);
    }
    std::sort(hosts.begin(), hosts.end());
    hosts.erase(std::unique(hosts.begin(), hosts.end()), hosts.end());
    for (std::size_t h : hosts) a *= plan.nodes[h].avail;
    return a;
  };
  std::vector<double> out;
  for (const auto& f : plan.flows) {
    double down = 1.0 - chain_avail(f.primary);
    for (const auto& b : f.backups) down *= 1.0 - chain_avail(b);
    out.push_back(1.0 - down);
  }
  return out;
}

bool SimReport::operator==(const SimReport& o) const {
  if (replications != o.replications || seed != o.seed || contention_aware != o.contention_aware ||
      flows.size() != o.flows.size() || fraction_at_nines != o.fraction_at_nines ||
      unavailability_cdf.size() != o.unavailability_cdf.size()) {
    return false;
  }
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const auto& a = flows[k];
    const auto& b = o.flows[k];
    if (a.flow != b.flow || a.availability != b.availability || a.half_width != b.half_width ||
        a.contention_availability != b.contention_availability) {
      return false;
    }
  }
  for (std::size_t k = 0; k < unavailability_cdf.size(); ++k) {
    if (unavailability_cdf[k].unavailability != o.unavailability_cdf[k].unavailability ||
        unavailability_cdf[k].fraction != o.unavailability_cdf[k].fraction) {
      return false;
    }
  }
  return true;
}

SimReport simulate(const SimPlan& plan, const SimConfig& config) {
  const std::uint64_t reps = std::max<std::uint64_t>(1, config.replications);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, reps));

  std::vector<Tally> tallies(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t first = reps * w / threads;
      const std::uint64_t last = reps * (w + 1) / threads;
      workers.emplace_back([&, w, first, last] { tallies[w] = run_range(plan, config, first, last); });
    }
  }
  Tally total;
  total.served.assign(plan.flows.size(), 0);
  total.contention_served.assign(plan.flows.size(), 0);
  for (const auto& t : tallies) {
    for (std::size_t k = 0; k < plan.flows.size(); ++k) {
      total.served[k] += t.served[k];
      if (config.contention_aware) total.contention_served[k] += t.contention_served[k];
    }
  }

  SimReport report;
  report.replications = reps;
  report.seed = config.seed;
  report.contention_aware = config.contention_aware;
  const double r = static_cast<double>(reps);
  std::vector<double> unavail;
  for (std::size_t k = 0; k < plan.flows.size(); ++k) {
    FlowEstimate e;
    e.flow = plan.flows[k].id;
    e.availability = static_cast<double>(total.served[k]) / r;
    e.half_width = 1.96 * std::sqrt(e.availability * (1.0 - e.availability) / r);
    if (config.contention_aware) {
      e.contention_availability = static_cast<double>(total.contention_served[k]) / r;
    }
    unavail.push_back(1.0 - e.availability);
    report.flows.push_back(std::move(e));
  }
  std::sort(unavail.begin(), unavail.end());
  for (std::size_t k = 0; k < unavail.size(); ++k) {
    report.unavailability_cdf.push_back(
        {unavail[k], static_cast<double>(k + 1) / static_cast<double>(unavail.size())});
  }
  for (int nines = 1; nines <= kMaxNines; ++nines) {
    const double level = 1.0 - std::pow(10.0, -nines);
    std::size_t count = 0;
    for (const auto& e : report.flows) {
      if (e.availability >= level - 1e-12) ++count;
    }
    report.fraction_at_nines.push_back(
        plan.flows.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(plan.flows.size()));
  }
  return report;
}

std::pair<SimReport, SimReport> compare_placements(const SimPlan& a, const SimPlan& b,
                                                   const SimConfig& config) {
  return {simulate(a, config), simulate(b, config)};
}

std::vector<std::vector<bool>> served_indicators(const SimPlan& plan, std::uint64_t seed,
                                                 std::uint64_t first, std::uint64_t count) {
  Sampler sampler(plan, seed);
  std::vector<std::vector<bool>> out;
  for (std::uint64_t rep = first; rep < first + count; ++rep) {
    sampler.draw(rep);
    std::vector<bool> row;
    for (const auto& f : plan.flows) row.push_back(sampler.served(f));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace coshare
