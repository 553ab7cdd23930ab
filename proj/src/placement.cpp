#include "coshare/placement.hpp"

#include <algorithm>
#include <set>

#include "coshare/error.hpp"
#include "coshare/rng.hpp"

namespace coshare {

ClassOrder parse_class_order(const std::string& s) {
  if (s == "descending") return ClassOrder::kDescending;
  if (s == "ascending") return ClassOrder::kAscending;
  throw ConfigError("unknown class order '" + s + "'");
}

const char* to_string(ClassOrder order) {
  return order == ClassOrder::kAscending ? "ascending" : "descending";
}

NodeQueues class_node_queues(const Network& net, const DependencyProfile& profile,
                             const std::vector<NodeId>& primary_nodes, bool correlation_aware) {
  std::vector<bool> avoid(net.size(), false);
  if (correlation_aware) {
    for (NodeId p : primary_nodes) {
      avoid[p] = true;
      for (NodeId b : profile.correlated(p)) avoid[b] = true;
    }
  }
  NodeQueues q;
  for (NodeId n = 0; n < net.size(); ++n) {
    if (net.is_end(n)) continue;
    (avoid[n] ? q.other : q.uncorrelated).push_back(n);
  }
  auto by_avail = [&](NodeId a, NodeId b) {
    if (net.avail(a) != net.avail(b)) return net.avail(a) > net.avail(b);
    return net.name(a) < net.name(b);
  };
  std::sort(q.uncorrelated.begin(), q.uncorrelated.end(), by_avail);
  std::sort(q.other.begin(), q.other.end(), by_avail);
  return q;
}

PlacementResult place_backups(const Network& net, const std::vector<NfType>& types,
                              const BackupDemand& demand, const DependencyProfile& profile,
                              const std::map<int, std::vector<NodeId>>& primary_nodes_by_class,
                              std::vector<NodeBudget> budget, const PlacementOptions& options) {
  if (budget.size() != net.size()) throw ValidationError("budget size does not match network");
  PlacementResult result;
  std::set<NodeId> used;

  std::vector<ClassEstimate> classes = demand.classes;
  std::stable_sort(classes.begin(), classes.end(), [&](const auto& a, const auto& b) {
    if (a.requirement != b.requirement) {
      return options.class_order == ClassOrder::kDescending ? a.requirement > b.requirement
                                                            : a.requirement < b.requirement;
    }
    return a.avail_class < b.avail_class;
  });

  for (const auto& cls : classes) {
    const int c = cls.avail_class;
    // NF type queue: z_v(c) descending, then name
    std::vector<TypeIndex> type_queue;
    std::vector<int> remaining(types.size(), 0);
    for (TypeIndex t = 0; t < types.size(); ++t) {
      remaining[t] = demand.count(t, c);
      if (remaining[t] > 0) type_queue.push_back(t);
    }
    if (type_queue.empty()) continue;
    std::stable_sort(type_queue.begin(), type_queue.end(), [&](TypeIndex a, TypeIndex b) {
      if (remaining[a] != remaining[b]) return remaining[a] > remaining[b];
      return types[a].name < types[b].name;
    });

    static const std::vector<NodeId> kNone;
    auto pit = primary_nodes_by_class.find(c);
    const auto queues = class_node_queues(net, profile, pit == primary_nodes_by_class.end()
                                                            ? kNone
                                                            : pit->second,
                                          options.correlation_aware);
    // Q' is exhausted before Q'' is touched, so one concatenated cursor suffices.
    std::vector<NodeId> nodes = queues.uncorrelated;
    nodes.insert(nodes.end(), queues.other.begin(), queues.other.end());

    std::size_t active = 0;
    std::size_t slot = 0;  // position in type_queue
    auto left = [&]() {
      int sum = 0;
      for (TypeIndex t : type_queue) sum += remaining[t];
      return sum;
    };
    auto advance_type = [&]() {
      for (std::size_t step = 1; step <= type_queue.size(); ++step) {
        const std::size_t next = (slot + step) % type_queue.size();
        if (remaining[type_queue[next]] > 0) {
          slot = next;
          return;
        }
      }
    };
    if (remaining[type_queue[slot]] == 0) advance_type();

    while (left() > 0 && active < nodes.size()) {
      const TypeIndex v = type_queue[slot];
      const NodeId node = nodes[active];
      auto& b = budget[node];
      if (b.cores >= types[v].cores && b.mem_gb >= types[v].mem_gb) {
        b.cores -= types[v].cores;
        b.mem_gb -= types[v].mem_gb;
        result.placed.push_back({v, c, node});
        used.insert(node);
        --remaining[v];
        advance_type();
      } else {
        ++active;
      }
    }
    for (TypeIndex t : type_queue) {
      if (remaining[t] > 0) result.unplaced[{t, c}] = remaining[t];
    }
  }
  result.nodes_used.assign(used.begin(), used.end());
  result.remaining = std::move(budget);
  return result;
}

PlacementResult place_backups_random(const Network& net, const std::vector<NfType>& types,
                                     const BackupDemand& demand, std::vector<NodeBudget> budget,
                                     std::uint64_t seed) {
  if (budget.size() != net.size()) throw ValidationError("budget size does not match network");
  Stream rng(seed, "random_placement");
  PlacementResult result;
  std::set<NodeId> used;
  for (const auto& [key, count] : demand.z) {
    const auto [v, c] = key;
    for (int k = 0; k < count; ++k) {
      std::vector<NodeId> fits;
      for (NodeId n = 0; n < net.size(); ++n) {
        if (!net.is_end(n) && budget[n].cores >= types[v].cores && budget[n].mem_gb >= types[v].mem_gb) {
          fits.push_back(n);
        }
      }
      if (fits.empty()) {
        result.unplaced[key] = count - k;
        break;
      }
      const NodeId node = fits[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(fits.size()) - 1))];
      budget[node].cores -= types[v].cores;
      budget[node].mem_gb -= types[v].mem_gb;
      result.placed.push_back({v, c, node});
      used.insert(node);
    }
  }
  result.nodes_used.assign(used.begin(), used.end());
  result.remaining = std::move(budget);
  return result;
}

}  // namespace coshare
