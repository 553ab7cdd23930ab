#include "coshare/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>

#include "coshare/error.hpp"

namespace coshare {

namespace {

struct Slot {
  TypeIndex type;
  NodeId node;
};

// Minimal reservation for a set of flows on one instance: dedicated is a
// sum; shared is the cheapest partition into pairwise-independent groups,
// each reserving its maximum rate.
double min_shared_reservation(const std::vector<FlowIndex>& flows, const std::vector<double>& rate,
                              const FlowIndependence& indep) {
  double best = 0.0;
  for (FlowIndex f : flows) best += rate[f];
  std::vector<std::vector<FlowIndex>> groups;
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double cost) {
    if (cost >= best) return;
    if (k == flows.size()) {
      best = cost;
      return;
    }
    const FlowIndex f = flows[k];
    for (auto& g : groups) {
      const bool ok = std::all_of(g.begin(), g.end(), [&](FlowIndex m) { return indep(f, m); });
      if (!ok) continue;
      double gmax = 0.0;
      for (FlowIndex m : g) gmax = std::max(gmax, rate[m]);
      g.push_back(f);
      rec(k + 1, cost + std::max(0.0, rate[f] - gmax));
      g.pop_back();
    }
    groups.push_back({f});
    rec(k + 1, cost + rate[f]);
    groups.pop_back();
  };
  rec(0, 0.0);
  return best;
}

std::uint64_t multiset_count(std::uint64_t slots, int k) {
  // C(slots + k - 1, k), saturating
  if (k == 0) return 1;
  if (slots == 0) return 0;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * static_cast<long double>(slots + i - 1) / i;
  return c > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(c + 0.5L);
}

void validate(const TinyScenario& s) {
  const auto& m = s.model;
  if (m.net.size() > 8) throw ValidationError("tiny scenario: more than 8 nodes");
  if (m.flows.size() > 6) throw ValidationError("tiny scenario: more than 6 flows");
  if (m.types.size() > 3) throw ValidationError("tiny scenario: more than 3 NF types");
  if (s.budget.size() != m.net.size()) throw ValidationError("tiny scenario: budget size");
  for (const auto& f : m.flows) {
    if (f.chain.size() > 2) throw ValidationError("tiny scenario: chain longer than 2");
    if (!f.primary) throw ValidationError("tiny scenario: flow '" + f.id + "' has no primary");
  }
}

std::vector<Slot> slots_of(const TinyScenario& s) {
  std::vector<bool> used(s.model.types.size(), false);
  for (const auto& f : s.model.flows) {
    for (TypeIndex t : f.chain) used[t] = true;
  }
  std::vector<Slot> slots;
  for (TypeIndex t = 0; t < s.model.types.size(); ++t) {
    if (!used[t]) continue;
    for (NodeId n = 0; n < s.model.net.size(); ++n) {
      if (s.model.net.is_end(n)) continue;
      if (s.budget[n].cores >= s.model.types[t].cores && s.budget[n].mem_gb >= s.model.types[t].mem_gb) {
        slots.push_back({t, n});
      }
    }
  }
  return slots;
}

}  // namespace

std::uint64_t search_space_size(const TinyScenario& scenario) {
  validate(scenario);
  const auto slots = slots_of(scenario).size();
  std::uint64_t total = 0;
  for (int k = 0; k <= scenario.max_backups; ++k) {
    const auto c = multiset_count(slots, k);
    if (c == UINT64_MAX || total + c < total) return UINT64_MAX;
    total += c;
  }
  return total;
}

OracleResult exhaustive_min_backups(const TinyScenario& scenario, std::uint64_t bound) {
  validate(scenario);
  const auto size = search_space_size(scenario);
  if (size > bound) {
    throw ValidationError("oracle search space " + std::to_string(size) + " exceeds bound " +
                          std::to_string(bound));
  }
  const Model& model = scenario.model;
  const auto slots = slots_of(scenario);
  const std::size_t flow_count = model.flows.size();
  const FlowIndependence indep(model, scenario.independence);
  const DependencyProfile profile = DependencyProfile::analyze(model.net, scenario.structure);
  std::vector<double> rate(flow_count);
  for (FlowIndex f = 0; f < flow_count; ++f) rate[f] = model.flows[f].rate;

  std::vector<std::vector<bool>> excluded(flow_count, std::vector<bool>(model.net.size(), false));
  for (FlowIndex f = 0; f < flow_count; ++f) {
    for (NodeId p : model.flows[f].primary->hosts) {
      excluded[f][p] = true;
      if (!scenario.correlation_aware) continue;
      for (NodeId b : profile.correlated(p)) excluded[f][b] = true;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  OracleResult result;
  result.chains.assign(flow_count, {});

  std::vector<std::size_t> pick;  // slot indices, nondecreasing
  // Returns true if the current placement admits an assignment; fills witness.
  auto assignable = [&](const std::vector<Slot>& placed,
                        std::vector<std::vector<std::vector<std::size_t>>>& witness) {
    // options per flow: minimal instance-disjoint chain sets meeting the requirement
    std::vector<std::vector<std::vector<std::vector<std::size_t>>>> options(flow_count);
    std::map<std::vector<std::size_t>, double> chain_avail;  // memo
    auto avail_of = [&](const std::vector<std::size_t>& chain) {
      auto it = chain_avail.find(chain);
      if (it != chain_avail.end()) return it->second;
      double a = 1.0;
      std::vector<NodeId> hosts;
      for (std::size_t i : chain) {
        a *= model.types[placed[i].type].avail;
        hosts.push_back(placed[i].node);
      }
      std::sort(hosts.begin(), hosts.end());
      hosts.erase(std::unique(hosts.begin(), hosts.end()), hosts.end());
      for (NodeId h : hosts) a *= model.net.avail(h);
      chain_avail.emplace(chain, a);
      return a;
    };
    for (FlowIndex f = 0; f < flow_count; ++f) {
      const auto& flow = model.flows[f];
      if (flow.primary->avail >= flow.avail_req) {
        options[f].push_back({});
        continue;
      }
      std::vector<std::vector<std::size_t>> per_pos(flow.chain.size());
      for (std::size_t g = 0; g < flow.chain.size(); ++g) {
        for (std::size_t i = 0; i < placed.size(); ++i) {
          if (placed[i].type == flow.chain[g] && !excluded[f][placed[i].node]) per_pos[g].push_back(i);
        }
      }
      std::vector<std::vector<std::size_t>> comps{{}};
      for (const auto& pos : per_pos) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& c : comps) {
          for (std::size_t i : pos) {
            if (std::find(c.begin(), c.end(), i) != c.end()) continue;
            auto d = c;
            d.push_back(i);
            next.push_back(std::move(d));
          }
        }
        comps = std::move(next);
      }
      // subsets of compositions, by size, keeping minimal feasible ones
      std::vector<std::vector<std::size_t>> chosen;  // indices into comps
      std::function<void(std::size_t, std::vector<std::size_t>&)> rec =
          [&](std::size_t from, std::vector<std::size_t>& cur) {
            if (!cur.empty()) {
              double down = 1.0 - flow.primary->avail;
              for (std::size_t c : cur) down *= 1.0 - avail_of(comps[c]);
              if (1.0 - down >= flow.avail_req) {
                // minimal if dropping any chain breaks the requirement
                bool minimal = true;
                for (std::size_t skip = 0; skip < cur.size() && minimal; ++skip) {
                  double d2 = 1.0 - flow.primary->avail;
                  for (std::size_t k = 0; k < cur.size(); ++k) {
                    if (k != skip) d2 *= 1.0 - avail_of(comps[cur[k]]);
                  }
                  if (1.0 - d2 >= flow.avail_req) minimal = false;
                }
                if (minimal) chosen.push_back(cur);
                return;  // supersets are never minimal
              }
            }
            if (static_cast<int>(cur.size()) >= scenario.max_chains_per_flow) return;
            for (std::size_t c = from; c < comps.size(); ++c) {
              bool disjoint = true;
              for (std::size_t o : cur) {
                for (std::size_t i : comps[c]) {
                  if (std::find(comps[o].begin(), comps[o].end(), i) != comps[o].end()) disjoint = false;
                }
              }
              if (!disjoint) continue;
              cur.push_back(c);
              rec(c + 1, cur);
              cur.pop_back();
            }
          };
      std::vector<std::size_t> cur;
      rec(0, cur);
      for (const auto& sel : chosen) {
        std::vector<std::vector<std::size_t>> opt;
        for (std::size_t c : sel) opt.push_back(comps[c]);
        options[f].push_back(std::move(opt));
      }
      if (options[f].empty()) return false;
    }
    // DFS over flows, fewest options first
    std::vector<FlowIndex> order(flow_count);
    for (FlowIndex f = 0; f < flow_count; ++f) order[f] = f;
    std::stable_sort(order.begin(), order.end(),
                     [&](FlowIndex a, FlowIndex b) { return options[a].size() < options[b].size(); });
    std::vector<std::vector<FlowIndex>> users(placed.size());
    std::vector<std::size_t> choice(flow_count, 0);
    auto fits = [&](std::size_t i) {
      const double cap = model.types[placed[i].type].capacity;
      double need = 0.0;
      if (model.mode == ReservationMode::kDedicated) {
        for (FlowIndex u : users[i]) need += rate[u];
      } else {
        need = min_shared_reservation(users[i], rate, indep);
      }
      return need <= cap * (1.0 + 1e-12);
    };
    std::function<bool(std::size_t)> dfs = [&](std::size_t k) {
      if (k == order.size()) return true;
      const FlowIndex f = order[k];
      for (std::size_t o = 0; o < options[f].size(); ++o) {
        bool ok = true;
        std::vector<std::size_t> touched;
        for (const auto& chain : options[f][o]) {
          for (std::size_t i : chain) {
            users[i].push_back(f);
            touched.push_back(i);
          }
        }
        for (std::size_t i : touched) {
          if (!fits(i)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          choice[f] = o;
          if (dfs(k + 1)) return true;
        }
        for (std::size_t i : touched) users[i].pop_back();
      }
      return false;
    };
    if (!dfs(0)) return false;
    witness.assign(flow_count, {});
    for (FlowIndex f = 0; f < flow_count; ++f) witness[f] = options[f][choice[f]];
    return true;
  };

  for (int k = 0; k <= scenario.max_backups; ++k) {
    bool found = false;
    std::vector<Slot> placed;
    std::vector<NodeBudget> budget = scenario.budget;
    // enumerate nondecreasing slot sequences of length k
    std::function<bool(std::size_t, int)> rec = [&](std::size_t from, int left) {
      if (scenario.time_budget_s > 0.0) {
        const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
        if (el.count() > scenario.time_budget_s) {
          result.complete = false;
          return true;
        }
      }
      if (left == 0) {
        ++result.placements_examined;
        std::vector<std::vector<std::vector<std::size_t>>> witness;
        if (assignable(placed, witness)) {
          result.feasible = true;
          result.count = k;
          result.placement.clear();
          for (std::size_t i = 0; i < placed.size(); ++i) {
            result.placement.push_back({placed[i].type, 0, placed[i].node});
          }
          result.chains = std::move(witness);
          found = true;
          return true;
        }
        return false;
      }
      for (std::size_t s = from; s < slots.size(); ++s) {
        auto& b = budget[slots[s].node];
        const auto& t = model.types[slots[s].type];
        if (b.cores < t.cores || b.mem_gb < t.mem_gb) continue;
        b.cores -= t.cores;
        b.mem_gb -= t.mem_gb;
        placed.push_back(slots[s]);
        const bool stop = rec(s, left - 1);
        placed.pop_back();
        b.cores += t.cores;
        b.mem_gb += t.mem_gb;
        if (stop) return true;
      }
      return false;
    };
    rec(0, k);
    if (found || !result.complete) break;
  }
  return result;
}

DiTable independent_di_recompute(const Network& net) {
  const std::size_t size = net.size();
  if (size > 12) throw ValidationError("independent DI recompute limited to 12 nodes");
  DiTable table(size);
  if (size < 3) return table;
  std::vector<std::vector<int>> adj(size, std::vector<int>(size, 0));
  for (auto [a, b] : net.links()) {
    adj[a][b] = 1;
    adj[b][a] = 1;
  }
  // hop distance from s to t avoiding `banned` (size = none); -1 if unreachable
  auto distance = [&](std::size_t s, std::size_t t, std::size_t banned) {
    std::vector<int> seen(size, -1);
    std::deque<std::size_t> q{s};
    seen[s] = 0;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      if (u == t) return seen[u];
      for (std::size_t v = 0; v < size; ++v) {
        if (adj[u][v] && v != banned && seen[v] < 0) {
          seen[v] = seen[u] + 1;
          q.push_back(v);
        }
      }
    }
    return -1;
  };
  for (std::size_t n = 0; n < size; ++n) {
    if (net.is_end(n)) continue;
    for (std::size_t i = 0; i < size; ++i) {
      if (i == n) continue;
      double sum = 0.0;
      for (std::size_t j = 0; j < size; ++j) {
        if (j == i || j == n) continue;
        const int d = distance(i, j, size);
        if (d < 0) continue;
        const int dn = distance(i, j, n);
        sum += dn < 0 ? 1.0 : 1.0 / d - 1.0 / dn;
      }
      table.set(i, n, sum / static_cast<double>(size - 2));
    }
  }
  return table;
}

}  // namespace coshare
