#pragma once

#include <string>
#include <vector>

#include "coshare/netmodel.hpp"
#include "coshare/rng.hpp"
#include "coshare/topology.hpp"

namespace coshare::testing {

inline NodeAttributes attrs(double avail = 0.999, int cores = 8, bool end = false) {
  NodeAttributes a;
  a.avail = avail;
  a.cores = cores;
  a.end = end;
  return a;
}

inline std::string node_name(std::size_t k) { return "v" + std::to_string(k); }

inline Network path_graph(std::size_t n) {
  Network net;
  for (std::size_t k = 0; k < n; ++k) net.add_node(node_name(k), attrs());
  for (std::size_t k = 0; k + 1 < n; ++k) net.add_link(k, k + 1);
  return net;
}

inline Network cycle_graph(std::size_t n) {
  Network net = path_graph(n);
  net.add_link(n - 1, 0);
  return net;
}

inline Network full_mesh(std::size_t n) {
  Network net;
  for (std::size_t k = 0; k < n; ++k) net.add_node(node_name(k), attrs());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) net.add_link(a, b);
  }
  return net;
}

// Node 0 is the hub.
inline Network star_graph(std::size_t leaves) {
  Network net;
  net.add_node("h", attrs());
  for (std::size_t k = 0; k < leaves; ++k) {
    net.add_node("x" + std::to_string(k), attrs());
    net.add_link(0, k + 1);
  }
  return net;
}

// Random spanning tree plus `extra` random chords.
inline Network random_connected(std::size_t n, std::size_t extra, Stream& rng) {
  Network net;
  for (std::size_t k = 0; k < n; ++k) net.add_node(node_name(k), attrs());
  for (std::size_t k = 1; k < n; ++k) {
    net.add_link(k, static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(k) - 1)));
  }
  for (std::size_t e = 0, tries = 0; e < extra && tries < 100 * (extra + 1); ++tries) {
    const auto a = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
    const auto b = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
    if (a == b || net.linked(a, b)) continue;
    net.add_link(a, b);
    ++e;
  }
  return net;
}

// All-pairs hop counts by Floyd-Warshall; -1 for unreachable. `removed`
// (if < size) is deleted first.
inline std::vector<std::vector<int>> floyd_warshall(const Network& net, std::size_t removed = SIZE_MAX) {
  const std::size_t n = net.size();
  constexpr int kInf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    if (i != removed) d[i][i] = 0;
  }
  for (auto [a, b] : net.links()) {
    if (a == removed || b == removed) continue;
    d[a][b] = d[b][a] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  for (auto& row : d) {
    for (int& x : row) {
      if (x >= kInf) x = -1;
    }
  }
  return d;
}

// Model over `net` with NF types named T0.. (1 core, 2 GB, capacity, avail).
inline Model make_model(Network net, std::size_t types, double capacity = 10.0, double avail = 0.999,
                        ReservationMode mode = ReservationMode::kDedicated) {
  Model m;
  m.net = std::move(net);
  m.mode = mode;
  for (std::size_t t = 0; t < types; ++t) m.types.push_back({"T" + std::to_string(t), 1, 2, capacity, avail});
  return m;
}

inline FlowIndex add_flow(Model& m, std::string id, NodeId src, NodeId dst, double rate,
                          std::vector<TypeIndex> chain, double req) {
  FlowSpec f;
  f.id = std::move(id);
  f.src = src;
  f.dst = dst;
  f.rate = rate;
  f.chain = std::move(chain);
  f.avail_req = req;
  m.flows.push_back(std::move(f));
  return m.flows.size() - 1;
}

// Adds primary instances of the flow's chain on `hosts` (one per position) and binds them.
inline void bind_on(Model& m, FlowIndex f, const std::vector<NodeId>& hosts, double inst_avail = 1.0) {
  std::vector<InstanceIndex> chain;
  for (std::size_t g = 0; g < hosts.size(); ++g) {
    const auto v = m.add_instance(m.flows[f].id + "-p" + std::to_string(g), m.flows[f].chain[g], hosts[g],
                                  InstanceRole::kPrimary, inst_avail);
    m.instances[v].ledger = ReservationLedger(ReservationMode::kDedicated, m.types[m.flows[f].chain[g]].capacity);
    m.instances[v].ledger.reserve(f, m.flows[f].rate, nullptr);
    chain.push_back(v);
  }
  m.bind_primary(f, chain, {m.flows[f].src, m.flows[f].dst});
}

}  // namespace coshare::testing
