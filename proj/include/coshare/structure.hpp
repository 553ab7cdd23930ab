#pragma once

#include <vector>

#include "coshare/topology.hpp"

namespace coshare {

// Dependency of the i -> j path on node n: 1 if j becomes unreachable from i
// once n is removed, else 1/d_ij - 1/d_ij^{-n}. Throws ValidationError unless
// i, j, n are distinct. Pairs unreachable in the intact network contribute 0.
double path_dependency(const Network& net, NodeId i, NodeId j, NodeId n);

// Kernel form over precomputed hop matrices (intact and with n removed).
double path_dependency(const HopMatrix& intact, const HopMatrix& without_n, NodeId i, NodeId j);

// Average of path_dependency(i, j, n) over j in N - {n}, j != i, divided by
// N - 2. Throws ValidationError for i == n or |N| < 3.
double node_dependency(const Network& net, NodeId i, NodeId n);

// DI(i|n) for every ordered pair. End nodes never act as the removed node n
// (their column is all zero) but are included as path endpoints.
class DiTable {
 public:
  DiTable() = default;
  explicit DiTable(std::size_t n) : n_(n), di_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(NodeId i, NodeId n) const { return di_[i * n_ + n]; }
  void set(NodeId i, NodeId n, double v) { di_[i * n_ + n] = v; }

  bool operator==(const DiTable&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> di_;
};

// Computes the full table; parallel over the removed node when `threads` > 1
// (0 = hardware concurrency).
DiTable compute_di_table(const Network& net, unsigned threads = 0);

// C(n) = { i != n : DI(n|i) > t }, ascending.
std::vector<NodeId> critical_set(const DiTable& di, NodeId n, double t_di);

// B^_n: C(n), every i with n in C(i), and the cascade through C(i) for
// i in C(n). `cascade_depth` = 2 reproduces the two-level rule; larger values
// keep following C(.) from the newly reached critical nodes. n itself is
// never a member. Ascending.
std::vector<NodeId> correlated_set(const DiTable& di, NodeId n, double t_di, int cascade_depth = 2);

struct StructureOptions {
  double t_di = 0.5;
  int cascade_depth = 2;
};

class DependencyProfile {
 public:
  DependencyProfile() = default;
  DependencyProfile(DiTable di, const StructureOptions& options);

  static DependencyProfile analyze(const Network& net, const StructureOptions& options);

  const DiTable& di() const { return di_; }
  double threshold() const { return options_.t_di; }
  const StructureOptions& options() const { return options_; }
  const std::vector<NodeId>& critical(NodeId n) const { return critical_[n]; }
  const std::vector<NodeId>& correlated(NodeId n) const { return correlated_[n]; }
  bool is_correlated(NodeId n, NodeId other) const;

  // Same DI table, different threshold.
  DependencyProfile with_threshold(double t_di) const;

 private:
  DiTable di_;
  StructureOptions options_;
  std::vector<std::vector<NodeId>> critical_;
  std::vector<std::vector<NodeId>> correlated_;
};

}  // namespace coshare
