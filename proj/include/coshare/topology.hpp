#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coshare {

// Dense node index, assigned in first-seen order.
using NodeId = std::size_t;

struct NodeAttributes {
  int cores = 8;
  int mem_gb = 16;
  double avail = 0.999;
  bool end = false;  // flow endpoint; never hosts NF instances
};

// Undirected, unweighted network G(N, L).
class Network {
 public:
  // Throws ValidationError on duplicate id or invalid attributes.
  NodeId add_node(std::string id, const NodeAttributes& attrs);
  // Throws ValidationError on self-loop, unknown node or duplicate link.
  void add_link(NodeId a, NodeId b);

  std::size_t size() const { return names_.size(); }
  std::size_t link_count() const { return links_; }

  const std::string& name(NodeId n) const { return names_[n]; }
  std::optional<NodeId> find(std::string_view id) const;
  // Throws ValidationError for an unknown id.
  NodeId at(std::string_view id) const;

  std::span<const NodeId> neighbors(NodeId n) const { return adjacency_[n]; }
  bool linked(NodeId a, NodeId b) const;
  std::vector<std::pair<NodeId, NodeId>> links() const;

  const NodeAttributes& attrs(NodeId n) const { return attrs_[n]; }
  double avail(NodeId n) const { return attrs_[n].avail; }
  int cores(NodeId n) const { return attrs_[n].cores; }
  bool is_end(NodeId n) const { return attrs_[n].end; }

  void set_attrs(NodeId n, const NodeAttributes& attrs);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<NodeAttributes> attrs_;
  std::vector<std::vector<NodeId>> adjacency_;  // kept sorted
  std::size_t links_ = 0;
};

struct TopologyDefaults {
  NodeAttributes node;
};

// Parses the edge-list format:
//   node <id> cores=<int> avail=<float> [mem=<int>] [end]
//   <id> <id>
//   # comment
// Nodes first mentioned by a link get `defaults`. Throws ParseError (with line
// number) or ValidationError.
Network load_topology(std::string_view text, const TopologyDefaults& defaults = {});
Network load_topology_file(const std::string& path, const TopologyDefaults& defaults = {});
std::string write_topology(const Network& net);

// All-pairs hop counts with an explicit unreachable sentinel.
class HopMatrix {
 public:
  static constexpr int kUnreachable = -1;

  HopMatrix() = default;
  explicit HopMatrix(std::size_t n) : n_(n), dist_(n * n, kUnreachable) {}

  std::size_t size() const { return n_; }
  bool reachable(NodeId i, NodeId j) const { return raw(i, j) != kUnreachable; }
  std::optional<int> hops(NodeId i, NodeId j) const {
    const int d = raw(i, j);
    return d == kUnreachable ? std::nullopt : std::optional<int>(d);
  }
  int raw(NodeId i, NodeId j) const { return dist_[i * n_ + j]; }
  void set(NodeId i, NodeId j, int d) { dist_[i * n_ + j] = d; }

  bool operator==(const HopMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> dist_;
};

HopMatrix hop_matrix(const Network& net);
// Hop matrix of the subgraph induced on N - {removed}; the removed node's row
// and column are unreachable. Throws ValidationError for an unknown node.
HopMatrix hop_matrix_without(const Network& net, NodeId removed);

// Single-source BFS; `skip` (if any) is treated as absent.
std::vector<int> bfs_hops(const Network& net, NodeId source,
                          std::optional<NodeId> skip = std::nullopt);

// One shortest path (node sequence, inclusive). Ties are broken toward the
// lowest-index predecessor. Empty if unreachable.
std::vector<NodeId> shortest_path(const Network& net, NodeId src, NodeId dst);

// ISP-like topology generator: preferential attachment where each arriving
// node brings between 1 and `max_attach` links (weighted toward 1 and 2),
// followed by preferential chords until exactly `links` links exist. All
// nodes get `attrs`. Node ids are "n0".."n{N-1}".
struct IspTopologyParams {
  std::size_t nodes = 100;
  std::size_t links = 294;
  int max_attach = 4;
  std::uint64_t seed = 1;
};
Network generate_isp_topology(const IspTopologyParams& params,
                              const NodeAttributes& attrs = {});

}  // namespace coshare
