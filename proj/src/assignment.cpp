#include "coshare/assignment.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "coshare/error.hpp"

namespace coshare {

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone:
      return "none";
    case RejectReason::kNoCandidates:
      return "no_candidates";
    case RejectReason::kInsufficientCandidates:
      return "insufficient_candidates";
    case RejectReason::kNoPath:
      return "no_path";
  }
  return "unknown";
}

OrderPolicy parse_order_policy(const std::string& s) {
  if (s == "input") return OrderPolicy::kInput;
  if (s == "chain_length_desc") return OrderPolicy::kChainLengthDesc;
  if (s == "chain_length_asc") return OrderPolicy::kChainLengthAsc;
  if (s == "avail_desc") return OrderPolicy::kAvailDesc;
  if (s == "avail_asc") return OrderPolicy::kAvailAsc;
  throw ConfigError("unknown order policy '" + s + "'");
}

const char* to_string(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::kInput:
      return "input";
    case OrderPolicy::kChainLengthDesc:
      return "chain_length_desc";
    case OrderPolicy::kChainLengthAsc:
      return "chain_length_asc";
    case OrderPolicy::kAvailDesc:
      return "avail_desc";
    case OrderPolicy::kAvailAsc:
      return "avail_asc";
  }
  return "unknown";
}

AvailabilityRange availability_range(double primary_avail,
                                     const std::vector<std::vector<double>>& composites) {
  double lo = 1.0;
  double hi = 1.0;
  for (const auto& position : composites) {
    if (position.empty()) return {primary_avail, primary_avail};
    const auto [mn, mx] = std::minmax_element(position.begin(), position.end());
    lo *= *mn;
    hi *= *mx;
  }
  return {1.0 - (1.0 - primary_avail) * (1.0 - lo), 1.0 - (1.0 - primary_avail) * (1.0 - hi)};
}

std::vector<StagePath> k_shortest_stage_paths(const Model& model, const HopMatrix& hops,
                                              NodeId src, NodeId dst, const CandidateSets& stages,
                                              int k) {
  if (stages.empty() || k <= 0) return {};
  auto better = [&](const StagePath& a, const StagePath& b) {
    if (a.hops != b.hops) return a.hops < b.hops;
    return a.instances < b.instances;
  };
  // suffix[s][i]: up to k cheapest paths from stage s instance i to dst
  std::vector<std::vector<std::vector<StagePath>>> suffix(stages.size());
  for (std::size_t s = stages.size(); s-- > 0;) {
    suffix[s].resize(stages[s].size());
    for (std::size_t i = 0; i < stages[s].size(); ++i) {
      const InstanceIndex v = stages[s][i];
      const NodeId host = model.instances[v].host;
      std::vector<StagePath> best;
      if (s + 1 == stages.size()) {
        if (hops.reachable(host, dst)) best.push_back({{v}, hops.raw(host, dst)});
      } else {
        for (std::size_t j = 0; j < stages[s + 1].size(); ++j) {
          const NodeId next = model.instances[stages[s + 1][j]].host;
          if (!hops.reachable(host, next)) continue;
          for (const auto& tail : suffix[s + 1][j]) {
            StagePath p;
            p.instances.reserve(tail.instances.size() + 1);
            p.instances.push_back(v);
            p.instances.insert(p.instances.end(), tail.instances.begin(), tail.instances.end());
            p.hops = hops.raw(host, next) + tail.hops;
            best.push_back(std::move(p));
          }
        }
        std::sort(best.begin(), best.end(), better);
        if (best.size() > static_cast<std::size_t>(k)) best.resize(k);
      }
      suffix[s][i] = std::move(best);
    }
  }
  std::vector<StagePath> out;
  for (std::size_t i = 0; i < stages[0].size(); ++i) {
    const NodeId host = model.instances[stages[0][i]].host;
    if (!hops.reachable(src, host)) continue;
    for (auto p : suffix[0][i]) {
      p.hops += hops.raw(src, host);
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(), better);
  if (out.size() > static_cast<std::size_t>(k)) out.resize(k);
  return out;
}

Assigner::Assigner(Model& model, const DependencyProfile& profile,
                   const FlowIndependence& independence, AssignmentOptions options)
    : model_(model),
      profile_(profile),
      independence_(independence),
      independent_(independence.fn()),
      options_(options) {
  if (options_.hop_budget) hops_ = hop_matrix(model_.net);
}

std::vector<bool> Assigner::exclusion_mask(FlowIndex f) const {
  std::vector<bool> mask(model_.net.size(), false);
  const auto& flow = model_.flows[f];
  if (!flow.primary) return mask;
  for (NodeId p : flow.primary->hosts) {
    if (options_.exclude_primary_hosts) mask[p] = true;
    if (!options_.correlation_aware) continue;
    for (NodeId b : profile_.correlated(p)) mask[b] = true;
  }
  return mask;
}

std::variant<CandidateSets, Rejection> Assigner::candidate_instances(FlowIndex f) const {
  const auto& flow = model_.flows[f];
  if (!flow.primary) throw ValidationError("flow '" + flow.id + "' has no primary binding");
  const auto mask = exclusion_mask(f);
  CandidateSets sets(flow.chain.size());
  for (std::size_t g = 0; g < flow.chain.size(); ++g) {
    for (InstanceIndex v = 0; v < model_.instances.size(); ++v) {
      const auto& inst = model_.instances[v];
      if (inst.role != InstanceRole::kBackup || inst.type != flow.chain[g]) continue;
      if (mask[inst.host]) continue;
      if (!inst.ledger.can_admit(f, flow.rate, independent_)) continue;
      sets[g].push_back(v);
    }
    if (sets[g].empty()) return Rejection{RejectReason::kNoCandidates};
  }
  return sets;
}

double Assigner::composite(InstanceIndex v) const {
  const auto& inst = model_.instances[v];
  return inst.avail * model_.net.avail(inst.host);
}

AvailabilityRange Assigner::min_max_availability(const CandidateSets& sets,
                                                 double effective_primary) const {
  std::vector<std::vector<double>> composites(sets.size());
  for (std::size_t g = 0; g < sets.size(); ++g) {
    for (InstanceIndex v : sets[g]) composites[g].push_back(composite(v));
  }
  return availability_range(effective_primary, composites);
}

std::vector<InstanceIndex> Assigner::best_composition(const CandidateSets& sets) const {
  auto higher = [&](InstanceIndex a, InstanceIndex b) {
    const double ca = composite(a);
    const double cb = composite(b);
    if (ca != cb) return ca > cb;
    return model_.instances[a].id < model_.instances[b].id;
  };
  if (!options_.strict_distinct_hosts) {
    std::vector<InstanceIndex> chain;
    for (const auto& s : sets) chain.push_back(*std::min_element(s.begin(), s.end(), higher));
    return chain;
  }
  // strict mode: best product over host-distinct compositions
  CandidateSets sorted = sets;
  for (auto& s : sorted) std::sort(s.begin(), s.end(), higher);
  std::vector<InstanceIndex> best;
  double best_value = -1.0;
  std::vector<InstanceIndex> cur;
  std::vector<NodeId> hosts;
  std::size_t visited = 0;
  auto dfs = [&](auto&& self, std::size_t g, double value) -> void {
    if (visited >= options_.max_compositions) return;
    if (value <= best_value) return;  // composites <= 1, so the product only shrinks
    if (g == sorted.size()) {
      ++visited;
      best_value = value;
      best = cur;
      return;
    }
    for (InstanceIndex v : sorted[g]) {
      const NodeId h = model_.instances[v].host;
      if (std::find(hosts.begin(), hosts.end(), h) != hosts.end()) continue;
      cur.push_back(v);
      hosts.push_back(h);
      self(self, g + 1, value * composite(v));
      cur.pop_back();
      hosts.pop_back();
    }
  };
  dfs(dfs, 0, 1.0);
  return best;
}

std::variant<FeasibleSet, Rejection> Assigner::feasible_set(FlowIndex f, CandidateSets sets) const {
  const auto& flow = model_.flows[f];
  if (!flow.primary) throw ValidationError("flow '" + flow.id + "' has no primary binding");
  const double req = flow.avail_req;
  FeasibleSet fs;
  fs.effective_primary = flow.primary->avail;
  if (fs.effective_primary >= req) {
    fs.sets = std::move(sets);
    return fs;
  }
  auto by_id = [&](InstanceIndex a, InstanceIndex b) {
    return model_.instances[a].id < model_.instances[b].id;
  };
  for (auto& s : sets) std::sort(s.begin(), s.end(), by_id);

  while (true) {
    for (const auto& s : sets) {
      if (s.empty()) {
        return Rejection{fs.committed.empty() ? RejectReason::kNoCandidates
                                              : RejectReason::kInsufficientCandidates};
      }
    }
    auto range = min_max_availability(sets, fs.effective_primary);
    if (range.max < req) {
      // one more chain cannot reach the requirement: fix the best one and retry
      if (static_cast<int>(fs.committed.size()) + 1 >= options_.max_chains) {
        return Rejection{RejectReason::kInsufficientCandidates};
      }
      auto chain = best_composition(sets);
      if (chain.empty()) return Rejection{RejectReason::kInsufficientCandidates};
      double chain_composite = 1.0;
      for (InstanceIndex v : chain) chain_composite *= composite(v);
      fs.effective_primary = 1.0 - (1.0 - fs.effective_primary) * (1.0 - chain_composite);
      for (std::size_t g = 0; g < sets.size(); ++g) {
        std::erase(sets[g], chain[g]);
      }
      fs.committed.push_back(std::move(chain));
      continue;
    }
    while (range.min < req) {
      // drop the single lowest-composite instance across all positions; a
      // lone candidate stays since every composition needs it anyway
      std::size_t drop_g = 0;
      std::size_t drop_k = 0;
      bool found = false;
      for (std::size_t g = 0; g < sets.size(); ++g) {
        if (sets[g].size() <= 1) continue;
        for (std::size_t k = 0; k < sets[g].size(); ++k) {
          if (!found) {
            drop_g = g;
            drop_k = k;
            found = true;
            continue;
          }
          const double c = composite(sets[g][k]);
          const double best = composite(sets[drop_g][drop_k]);
          bool take = false;
          if (c != best) {
            take = c < best;
          } else if (sets[g].size() != sets[drop_g].size()) {
            take = sets[g].size() > sets[drop_g].size();
          } else {
            take = by_id(sets[g][k], sets[drop_g][drop_k]);
          }
          if (take) {
            drop_g = g;
            drop_k = k;
          }
        }
      }
      if (!found) return Rejection{RejectReason::kInsufficientCandidates};
      sets[drop_g].erase(sets[drop_g].begin() + static_cast<std::ptrdiff_t>(drop_k));
      range = min_max_availability(sets, fs.effective_primary);
    }
    fs.sets = std::move(sets);
    fs.chains_required = static_cast<int>(fs.committed.size()) + 1;
    return fs;
  }
}

std::variant<ChainEnumeration, Rejection> Assigner::enumerate_chains(
    FlowIndex f, const CandidateSets& sets) const {
  const auto& flow = model_.flows[f];
  ChainEnumeration out;
  if (sets.empty()) return out;
  for (const auto& s : sets) {
    if (s.empty()) return Rejection{RejectReason::kNoCandidates};
  }
  // minimal hop cost from each stage instance to dst (k = 1 suffix of the DP)
  std::vector<std::vector<int>> suffix;
  if (hops_) {
    const auto& h = *hops_;
    constexpr int kInf = std::numeric_limits<int>::max() / 4;
    suffix.resize(sets.size());
    for (std::size_t s = sets.size(); s-- > 0;) {
      suffix[s].assign(sets[s].size(), kInf);
      for (std::size_t i = 0; i < sets[s].size(); ++i) {
        const NodeId host = model_.instances[sets[s][i]].host;
        if (s + 1 == sets.size()) {
          if (h.reachable(host, flow.dst)) suffix[s][i] = h.raw(host, flow.dst);
          continue;
        }
        for (std::size_t j = 0; j < sets[s + 1].size(); ++j) {
          const NodeId next = model_.instances[sets[s + 1][j]].host;
          if (!h.reachable(host, next) || suffix[s + 1][j] >= kInf) continue;
          suffix[s][i] = std::min(suffix[s][i], h.raw(host, next) + suffix[s + 1][j]);
        }
      }
    }
  }

  std::vector<InstanceIndex> cur;
  std::vector<NodeId> hosts;
  auto dfs = [&](auto&& self, std::size_t g, int cost) -> void {
    if (out.truncated) return;
    if (g == sets.size()) {
      if (hops_) {
        const auto& h = *hops_;
        const NodeId last = hosts.back();
        if (!h.reachable(last, flow.dst) || cost + h.raw(last, flow.dst) > *options_.hop_budget) {
          return;
        }
      }
      if (out.examined >= options_.max_compositions) {
        out.truncated = true;
        return;
      }
      ++out.examined;
      out.chains.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < sets[g].size(); ++i) {
      const InstanceIndex v = sets[g][i];
      const NodeId host = model_.instances[v].host;
      if (options_.strict_distinct_hosts &&
          std::find(hosts.begin(), hosts.end(), host) != hosts.end()) {
        continue;
      }
      int next_cost = cost;
      if (hops_) {
        const auto& h = *hops_;
        const NodeId prev = g == 0 ? flow.src : hosts.back();
        if (!h.reachable(prev, host)) continue;
        next_cost += h.raw(prev, host);
        if (next_cost + suffix[g][i] > *options_.hop_budget) continue;
      }
      cur.push_back(v);
      hosts.push_back(host);
      self(self, g + 1, next_cost);
      cur.pop_back();
      hosts.pop_back();
      if (out.truncated) return;
    }
  };
  dfs(dfs, 0, 0);
  if (out.chains.empty()) {
    return Rejection{hops_ ? RejectReason::kNoPath : RejectReason::kInsufficientCandidates};
  }
  return out;
}

double Assigner::instance_weight(FlowIndex f, InstanceIndex v) const {
  const auto& flow = model_.flows[f];
  const auto& ledger = model_.instances[v].ledger;
  if (ledger.shareable_group(f, flow.rate, independent_)) {
    return static_cast<double>(flow.chain.size());
  }
  return ledger.reserved() / ledger.capacity();
}

double Assigner::chain_weight(FlowIndex f, std::span<const InstanceIndex> chain) const {
  double w = 0.0;
  for (InstanceIndex v : chain) w += instance_weight(f, v);
  return w;
}

AssignmentOutcome Assigner::assign_flow(FlowIndex f) {
  const auto& flow = model_.flows[f];
  if (!flow.primary) throw ValidationError("flow '" + flow.id + "' has no primary binding");
  AssignmentOutcome outcome;
  outcome.flow = f;
  outcome.achieved_avail = flow.primary->avail;
  if (flow.primary->avail >= flow.avail_req) {
    outcome.accepted = true;
    return outcome;
  }
  auto reject = [&](RejectReason reason) {
    outcome.accepted = false;
    outcome.reason = reason;
    outcome.chains.clear();
    outcome.achieved_avail = flow.primary->avail;
    return outcome;
  };

  auto candidates = candidate_instances(f);
  if (auto* r = std::get_if<Rejection>(&candidates)) return reject(r->reason);
  auto feasible = feasible_set(f, std::move(std::get<CandidateSets>(candidates)));
  if (auto* r = std::get_if<Rejection>(&feasible)) return reject(r->reason);
  auto& fs = std::get<FeasibleSet>(feasible);

  // Scoring is additive per instance, so order each position by weight
  // (then id) before enumerating: truncation then keeps the best compositions.
  std::map<InstanceIndex, double> weight;
  for (auto& s : fs.sets) {
    for (InstanceIndex v : s) weight[v] = instance_weight(f, v);
    std::sort(s.begin(), s.end(), [&](InstanceIndex a, InstanceIndex b) {
      if (weight[a] != weight[b]) return weight[a] > weight[b];
      return model_.instances[a].id < model_.instances[b].id;
    });
  }
  auto enumeration = enumerate_chains(f, fs.sets);
  if (auto* r = std::get_if<Rejection>(&enumeration)) return reject(r->reason);
  const auto& chains = std::get<ChainEnumeration>(enumeration);
  outcome.compositions_examined = chains.examined;

  auto id_sequence_less = [&](const std::vector<InstanceIndex>& a,
                              const std::vector<InstanceIndex>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [&](InstanceIndex x, InstanceIndex y) { return model_.instances[x].id < model_.instances[y].id; });
  };
  const std::vector<InstanceIndex>* best = nullptr;
  double best_w = -1.0;
  for (const auto& chain : chains.chains) {
    double w = 0.0;
    for (InstanceIndex v : chain) w += weight[v];
    if (best == nullptr || w > best_w || (w == best_w && id_sequence_less(chain, *best))) {
      best = &chain;
      best_w = w;
    }
  }

  std::vector<std::vector<InstanceIndex>> selected = fs.committed;
  selected.push_back(*best);
  // commit atomically
  std::vector<InstanceIndex> reserved;
  for (const auto& chain : selected) {
    for (InstanceIndex v : chain) {
      if (!model_.instances[v].ledger.reserve(f, flow.rate, independent_)) {
        for (InstanceIndex u : reserved) model_.instances[u].ledger.release(f);
        return reject(RejectReason::kInsufficientCandidates);
      }
      reserved.push_back(v);
    }
  }
  std::vector<double> avails;
  for (const auto& chain : selected) {
    avails.push_back(chain_availability(model_, chain));
    outcome.chains.push_back({f, chain});
  }
  outcome.accepted = true;
  outcome.achieved_avail = service_availability(flow.primary->avail, avails);
  return outcome;
}

std::vector<FlowIndex> order_flows(const Model& model, OrderPolicy policy) {
  std::vector<FlowIndex> order(model.flows.size());
  for (FlowIndex f = 0; f < order.size(); ++f) order[f] = f;
  auto key_sort = [&](auto key, bool desc) {
    std::stable_sort(order.begin(), order.end(), [&](FlowIndex a, FlowIndex b) {
      return desc ? key(a) > key(b) : key(a) < key(b);
    });
  };
  auto length = [&](FlowIndex f) { return model.flows[f].chain.size(); };
  auto req = [&](FlowIndex f) { return model.flows[f].avail_req; };
  switch (policy) {
    case OrderPolicy::kInput:
      break;
    case OrderPolicy::kChainLengthDesc:
      key_sort(length, true);
      break;
    case OrderPolicy::kChainLengthAsc:
      key_sort(length, false);
      break;
    case OrderPolicy::kAvailDesc:
      key_sort(req, true);
      break;
    case OrderPolicy::kAvailAsc:
      key_sort(req, false);
      break;
  }
  return order;
}

std::vector<AssignmentOutcome> Assigner::run_assignment(OrderPolicy policy) {
  std::vector<AssignmentOutcome> outcomes;
  for (FlowIndex f : order_flows(model_, policy)) outcomes.push_back(assign_flow(f));
  return outcomes;
}

}  // namespace coshare
