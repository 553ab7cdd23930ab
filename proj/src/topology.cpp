#include "coshare/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

#include "coshare/error.hpp"
#include "coshare/rng.hpp"

namespace coshare {

namespace {

void validate_attrs(const std::string& id, const NodeAttributes& attrs) {
  if (!(attrs.avail > 0.0 && attrs.avail <= 1.0)) {
    throw ValidationError("node '" + id + "': availability must be in (0,1]");
  }
  if (attrs.cores < 0 || attrs.mem_gb < 0) {
    throw ValidationError("node '" + id + "': negative resources");
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view key) {
  T value{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, "bad value for " + std::string(key) + ": '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

NodeId Network::add_node(std::string id, const NodeAttributes& attrs) {
  if (id.empty()) throw ValidationError("empty node id");
  if (index_.contains(id)) throw ValidationError("duplicate node '" + id + "'");
  validate_attrs(id, attrs);
  const NodeId n = names_.size();
  index_.emplace(id, n);
  names_.push_back(std::move(id));
  attrs_.push_back(attrs);
  adjacency_.emplace_back();
  return n;
}

void Network::add_link(NodeId a, NodeId b) {
  if (a >= size() || b >= size()) throw ValidationError("link endpoint is not a declared node");
  if (a == b) throw ValidationError("self-loop on '" + names_[a] + "'");
  if (linked(a, b)) {
    throw ValidationError("duplicate link '" + names_[a] + "' - '" + names_[b] + "'");
  }
  auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(adjacency_[a], b);
  insert_sorted(adjacency_[b], a);
  ++links_;
}

std::optional<NodeId> Network::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId Network::at(std::string_view id) const {
  if (auto n = find(id)) return *n;
  throw ValidationError("unknown node '" + std::string(id) + "'");
}

bool Network::linked(NodeId a, NodeId b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<std::pair<NodeId, NodeId>> Network::links() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(links_);
  for (NodeId a = 0; a < size(); ++a) {
    for (NodeId b : adjacency_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

void Network::set_attrs(NodeId n, const NodeAttributes& attrs) {
  validate_attrs(names_[n], attrs);
  attrs_[n] = attrs;
}

Network load_topology(std::string_view text, const TopologyDefaults& defaults) {
  Network net;
  std::vector<bool> declared;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto node_for = [&](std::string_view id) {
    if (auto n = net.find(id)) return *n;
    const NodeId n = net.add_node(std::string(id), defaults.node);
    declared.push_back(false);
    return n;
  };
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    try {
      if (tokens[0] == "node") {
        if (tokens.size() < 2) throw ParseError(line_no, "node declaration without id");
        NodeAttributes attrs = defaults.node;
        for (std::size_t t = 2; t < tokens.size(); ++t) {
          const auto tok = tokens[t];
          if (tok == "end") {
            attrs.end = true;
            continue;
          }
          const auto eq = tok.find('=');
          if (eq == std::string_view::npos) {
            throw ParseError(line_no, "unexpected token '" + std::string(tok) + "'");
          }
          const auto key = tok.substr(0, eq);
          const auto val = tok.substr(eq + 1);
          if (key == "cores") {
            attrs.cores = parse_number<int>(val, line_no, key);
          } else if (key == "avail") {
            attrs.avail = parse_number<double>(val, line_no, key);
          } else if (key == "mem") {
            attrs.mem_gb = parse_number<int>(val, line_no, key);
          } else {
            throw ParseError(line_no, "unknown attribute '" + std::string(key) + "'");
          }
        }
        const std::string id(tokens[1]);
        if (auto existing = net.find(id)) {
          if (declared[*existing]) throw ValidationError("duplicate node '" + id + "'");
          net.set_attrs(*existing, attrs);
          declared[*existing] = true;
        } else {
          net.add_node(id, attrs);
          declared.push_back(true);
        }
      } else if (tokens.size() == 2) {
        const NodeId a = node_for(tokens[0]);
        const NodeId b = node_for(tokens[1]);
        net.add_link(a, b);
      } else {
        throw ParseError(line_no, "expected '<id> <id>' or a node declaration");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (eol == text.size()) break;
  }
  return net;
}

Network load_topology_file(const std::string& path, const TopologyDefaults& defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_topology(buf.str(), defaults);
}

std::string write_topology(const Network& net) {
  std::ostringstream out;
  out.precision(17);
  for (NodeId n = 0; n < net.size(); ++n) {
    const auto& a = net.attrs(n);
    out << "node " << net.name(n) << " cores=" << a.cores << " avail=" << a.avail
        << " mem=" << a.mem_gb << (a.end ? " end" : "") << '\n';
  }
  for (auto [a, b] : net.links()) out << net.name(a) << ' ' << net.name(b) << '\n';
  return out.str();
}

std::vector<int> bfs_hops(const Network& net, NodeId source, std::optional<NodeId> skip) {
  std::vector<int> dist(net.size(), HopMatrix::kUnreachable);
  if (skip && *skip == source) return dist;
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : net.neighbors(u)) {
      if (skip && v == *skip) continue;
      if (dist[v] == HopMatrix::kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

namespace {

HopMatrix all_pairs(const Network& net, std::optional<NodeId> skip) {
  HopMatrix m(net.size());
  for (NodeId s = 0; s < net.size(); ++s) {
    if (skip && s == *skip) continue;
    const auto row = bfs_hops(net, s, skip);
    for (NodeId t = 0; t < net.size(); ++t) m.set(s, t, row[t]);
  }
  return m;
}

}  // namespace

HopMatrix hop_matrix(const Network& net) { return all_pairs(net, std::nullopt); }

HopMatrix hop_matrix_without(const Network& net, NodeId removed) {
  if (removed >= net.size()) throw ValidationError("unknown node index " + std::to_string(removed));
  return all_pairs(net, removed);
}

std::vector<NodeId> shortest_path(const Network& net, NodeId src, NodeId dst) {
  const auto dist = bfs_hops(net, dst);
  if (dist[src] == HopMatrix::kUnreachable) return {};
  std::vector<NodeId> path{src};
  NodeId cur = src;
  while (cur != dst) {
    // neighbors are sorted, so the first hit is the lowest index
    for (NodeId v : net.neighbors(cur)) {
      if (dist[v] == dist[cur] - 1) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

Network generate_isp_topology(const IspTopologyParams& params, const NodeAttributes& attrs) {
  const std::size_t n = params.nodes;
  if (n < 2) throw ConfigError("generator needs at least 2 nodes");
  if (params.links < n - 1 || params.links > n * (n - 1) / 2) {
    throw ConfigError("generator link count must be in [N-1, N(N-1)/2]");
  }
  Stream rng(params.seed, "topology");
  Network net;
  for (std::size_t i = 0; i < n; ++i) net.add_node("n" + std::to_string(i), attrs);

  // endpoints list: each node appears once per incident link (degree-weighted)
  std::vector<NodeId> ends;
  auto connect = [&](NodeId a, NodeId b) {
    net.add_link(a, b);
    ends.push_back(a);
    ends.push_back(b);
  };
  connect(0, 1);
  // Attachment-size distribution: 1 (35%), 2 (35%), 3 (20%), 4+ (10%).
  auto draw_attach = [&]() {
    const double u = rng.uniform();
    int m = u < 0.35 ? 1 : u < 0.70 ? 2 : u < 0.90 ? 3 : 4;
    return std::min(m, std::max(1, params.max_attach));
  };
  for (NodeId v = 2; v < n; ++v) {
    const std::size_t remaining_nodes = n - v - 1;
    const std::size_t budget = params.links - net.link_count() - remaining_nodes;
    const std::size_t m = std::min<std::size_t>({static_cast<std::size_t>(draw_attach()), v,
                                                 std::max<std::size_t>(1, budget)});
    std::size_t added = 0;
    std::size_t guard = 0;
    while (added < m && guard++ < 1000) {
      const NodeId target = ends[rng.integer(0, static_cast<std::int64_t>(ends.size()) - 1)];
      if (target == v || net.linked(v, target)) continue;
      net.add_link(v, target);
      ++added;
    }
    for (std::size_t k = 0; k < added; ++k) {
      // record after the loop so targets are drawn from the pre-arrival graph
      ends.push_back(v);
    }
    for (NodeId t : net.neighbors(v)) ends.push_back(t);
  }
  std::size_t misses = 0;
  while (net.link_count() < params.links) {
    // fall back to uniform endpoints if the preferential core saturates
    const bool uniform = misses > 100 * n;
    auto pick = [&]() -> NodeId {
      if (uniform) return static_cast<NodeId>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
      return ends[rng.integer(0, static_cast<std::int64_t>(ends.size()) - 1)];
    };
    const NodeId a = pick();
    const NodeId b = pick();
    if (a == b || net.linked(a, b)) {
      ++misses;
      continue;
    }
    connect(a, b);
  }
  return net;
}

}  // namespace coshare
