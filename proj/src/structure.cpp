#include "coshare/structure.hpp"

#include <algorithm>
#include <thread>

#include "coshare/error.hpp"

namespace coshare {

double path_dependency(const HopMatrix& intact, const HopMatrix& without_n, NodeId i, NodeId j) {
  if (!intact.reachable(i, j)) return 0.0;
  if (!without_n.reachable(i, j)) return 1.0;
  return 1.0 / intact.raw(i, j) - 1.0 / without_n.raw(i, j);
}

double path_dependency(const Network& net, NodeId i, NodeId j, NodeId n) {
  if (i == j || i == n || j == n) throw ValidationError("path_dependency needs distinct nodes");
  if (i >= net.size() || j >= net.size() || n >= net.size()) {
    throw ValidationError("path_dependency: unknown node");
  }
  const auto intact = bfs_hops(net, i);
  const auto without = bfs_hops(net, i, n);
  if (intact[j] == HopMatrix::kUnreachable) return 0.0;
  if (without[j] == HopMatrix::kUnreachable) return 1.0;
  return 1.0 / intact[j] - 1.0 / without[j];
}

double node_dependency(const Network& net, NodeId i, NodeId n) {
  if (net.size() < 3) throw ValidationError("node_dependency needs at least 3 nodes");
  if (i == n) throw ValidationError("node_dependency needs i != n");
  const auto intact = bfs_hops(net, i);
  const auto without = bfs_hops(net, i, n);
  double sum = 0.0;
  for (NodeId j = 0; j < net.size(); ++j) {
    if (j == i || j == n || intact[j] == HopMatrix::kUnreachable) continue;
    sum += without[j] == HopMatrix::kUnreachable ? 1.0 : 1.0 / intact[j] - 1.0 / without[j];
  }
  return sum / static_cast<double>(net.size() - 2);
}

DiTable compute_di_table(const Network& net, unsigned threads) {
  const std::size_t size = net.size();
  DiTable table(size);
  if (size < 3) return table;
  const HopMatrix intact = hop_matrix(net);
  const double divisor = static_cast<double>(size - 2);

  auto fill_column = [&](NodeId n) {
    const HopMatrix without = hop_matrix_without(net, n);
    for (NodeId i = 0; i < size; ++i) {
      if (i == n) continue;
      double sum = 0.0;
      for (NodeId j = 0; j < size; ++j) {
        if (j == i || j == n) continue;
        sum += path_dependency(intact, without, i, j);
      }
      table.set(i, n, sum / divisor);
    }
  };

  std::vector<NodeId> removable;
  for (NodeId n = 0; n < size; ++n) {
    if (!net.is_end(n)) removable.push_back(n);
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(removable.size()));
  if (threads <= 1) {
    for (NodeId n : removable) fill_column(n);
    return table;
  }
  // columns are disjoint, so workers write without synchronization
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t k = w; k < removable.size(); k += threads) fill_column(removable[k]);
    });
  }
  return table;
}

std::vector<NodeId> critical_set(const DiTable& di, NodeId n, double t_di) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < di.size(); ++i) {
    if (i != n && di(n, i) > t_di) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> correlated_set(const DiTable& di, NodeId n, double t_di, int cascade_depth) {
  const std::size_t size = di.size();
  std::vector<bool> member(size, false);
  const auto crit_n = critical_set(di, n, t_di);
  for (NodeId i : crit_n) member[i] = true;
  for (NodeId i = 0; i < size; ++i) {
    if (i != n && di(i, n) > t_di) member[i] = true;  // n in C(i)
  }
  // second (and deeper) level: C(i) for i in C(n), then C(j) for those j, ...
  std::vector<NodeId> frontier = crit_n;
  std::vector<bool> expanded(size, false);
  for (int level = 2; level <= cascade_depth && !frontier.empty(); ++level) {
    std::vector<NodeId> next;
    for (NodeId i : frontier) {
      if (expanded[i]) continue;
      expanded[i] = true;
      for (NodeId j : critical_set(di, i, t_di)) {
        if (!member[j]) next.push_back(j);
        member[j] = true;
      }
    }
    frontier = std::move(next);
  }
  member[n] = false;
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size; ++i) {
    if (member[i]) out.push_back(i);
  }
  return out;
}

DependencyProfile::DependencyProfile(DiTable di, const StructureOptions& options)
    : di_(std::move(di)), options_(options) {
  if (!(options.t_di > 0.0 && options.t_di < 1.0)) {
    throw ConfigError("t_DI must be in (0,1)");
  }
  if (options.cascade_depth < 1) throw ConfigError("cascade depth must be >= 1");
  const std::size_t size = di_.size();
  critical_.resize(size);
  correlated_.resize(size);
  for (NodeId n = 0; n < size; ++n) {
    critical_[n] = critical_set(di_, n, options.t_di);
    correlated_[n] = correlated_set(di_, n, options.t_di, options.cascade_depth);
  }
}

DependencyProfile DependencyProfile::analyze(const Network& net, const StructureOptions& options) {
  return DependencyProfile(compute_di_table(net), options);
}

bool DependencyProfile::is_correlated(NodeId n, NodeId other) const {
  const auto& set = correlated_[n];
  return std::binary_search(set.begin(), set.end(), other);
}

DependencyProfile DependencyProfile::with_threshold(double t_di) const {
  StructureOptions options = options_;
  options.t_di = t_di;
  return DependencyProfile(di_, options);
}

}  // namespace coshare
