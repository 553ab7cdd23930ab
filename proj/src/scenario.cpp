#include "coshare/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "coshare/error.hpp"
#include "coshare/rng.hpp"

namespace coshare {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Range parse_range(const json& j, const char* key) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v};
  }
  if (j.is_object() && j.contains("min") && j.contains("max")) {
    Range r{j.at("min").get<double>(), j.at("max").get<double>()};
    if (r.lo > r.hi) throw ConfigError(std::string("config key '") + key + "': min > max");
    return r;
  }
  throw ConfigError(std::string("config key '") + key + "': expected number or {min, max}");
}

void check_avail_range(const Range& r, const std::string& what) {
  if (!(r.lo > 0.0 && r.hi <= 1.0)) throw ConfigError(what + ": availability must lie in (0,1]");
}

json range_json(const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return json{{"min", r.lo}, {"max", r.hi}};
}

double draw(Stream& s, const Range& r) { return r.lo == r.hi ? r.lo : s.uniform(r.lo, r.hi); }

}  // namespace

std::vector<NfTypeConfig> default_nf_catalog() {
  std::vector<NfTypeConfig> out;
  for (const char* name : {"Firewall", "DPI", "NAT", "IDS", "Proxy"}) {
    NfTypeConfig t;
    t.name = name;
    out.push_back(t);
  }
  return out;
}

ScenarioConfig parse_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig c;
  try {
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);

    if (j.contains("topology")) {
      const auto& t = j.at("topology");
      if (t.contains("file")) {
        c.topology.kind = TopologySource::Kind::kFile;
        std::filesystem::path p = t.at("file").get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.topology.path = p.lexically_normal().string();
      } else if (t.contains("inline")) {
        c.topology.kind = TopologySource::Kind::kInline;
        c.topology.text = t.at("inline").get<std::string>();
      } else if (t.contains("generate")) {
        const auto& g = t.at("generate");
        c.topology.kind = TopologySource::Kind::kGenerate;
        c.topology.generate.nodes = get_or<std::size_t>(g, "nodes", c.topology.generate.nodes);
        c.topology.generate.links = get_or<std::size_t>(g, "links", c.topology.generate.links);
        c.topology.generate.max_attach = get_or<int>(g, "max_attach", c.topology.generate.max_attach);
        c.topology.generate.seed = get_or<std::uint64_t>(g, "seed", c.seed);
      } else {
        throw ConfigError("topology needs one of 'file', 'inline', 'generate'");
      }
    } else {
      c.topology.generate.seed = c.seed;
    }
    if (j.contains("end_nodes") && !j.at("end_nodes").is_null()) {
      c.end_nodes = j.at("end_nodes").get<std::size_t>();
    }

    if (j.contains("node")) {
      const auto& n = j.at("node");
      c.node_cores = get_or<int>(n, "cores", c.node_cores);
      c.backup_cores = get_or<int>(n, "backup_cores", c.node_cores / 2);
      c.node_mem_gb = get_or<int>(n, "mem_gb", c.node_mem_gb);
      c.backup_mem_gb = get_or<int>(n, "backup_mem_gb", c.node_mem_gb / 2);
      if (n.contains("avail")) {
        const auto& a = n.at("avail");
        if (a.is_string() && a.get<std::string>() == "topology") {
          c.node_avail.reset();
        } else {
          c.node_avail = parse_range(a, "node.avail");
        }
      }
    }
    if (c.node_cores < 0 || c.backup_cores < 0 || c.backup_cores > c.node_cores) {
      throw ConfigError("node cores: need 0 <= backup_cores <= cores");
    }
    if (c.node_mem_gb < 0 || c.backup_mem_gb < 0 || c.backup_mem_gb > c.node_mem_gb) {
      throw ConfigError("node memory: need 0 <= backup_mem_gb <= mem_gb");
    }
    if (c.node_avail) check_avail_range(*c.node_avail, "node.avail");

    if (j.contains("nf_types")) {
      for (const auto& t : j.at("nf_types")) {
        NfTypeConfig nf;
        nf.name = t.at("name").get<std::string>();
        nf.cores = get_or<int>(t, "cores", nf.cores);
        nf.mem_gb = get_or<int>(t, "mem_gb", nf.mem_gb);
        nf.capacity = get_or<double>(t, "capacity_pps", nf.capacity);
        if (t.contains("avail")) nf.avail = parse_range(t.at("avail"), "nf_types.avail");
        check_avail_range(nf.avail, "NF type '" + nf.name + "'");
        if (nf.capacity <= 0.0) throw ConfigError("NF type '" + nf.name + "': capacity must be > 0");
        if (nf.cores < 0 || nf.mem_gb < 0) throw ConfigError("NF type '" + nf.name + "': negative size");
        c.nf_types.push_back(nf);
      }
    } else {
      c.nf_types = default_nf_catalog();
    }
    for (std::size_t a = 0; a < c.nf_types.size(); ++a) {
      for (std::size_t b = a + 1; b < c.nf_types.size(); ++b) {
        if (c.nf_types[a].name == c.nf_types[b].name) {
          throw ConfigError("duplicate NF type '" + c.nf_types[a].name + "'");
        }
      }
    }

    if (j.contains("classes")) c.classes = j.at("classes").get<std::vector<double>>();
    if (c.classes.empty()) throw ConfigError("at least one availability class is required");
    for (std::size_t k = 0; k < c.classes.size(); ++k) {
      if (!(c.classes[k] > 0.0 && c.classes[k] < 1.0)) throw ConfigError("class requirement outside (0,1)");
      if (k > 0 && !(c.classes[k] > c.classes[k - 1])) {
        throw ConfigError("class requirements must be strictly increasing");
      }
    }

    if (j.contains("flow_generation")) {
      const auto& g = j.at("flow_generation");
      FlowGeneration fg;
      fg.count = get_or<std::size_t>(g, "count", fg.count);
      if (g.contains("chain_length")) {
        const auto& cl = g.at("chain_length");
        if (cl.is_number()) {
          fg.chain_min = fg.chain_max = cl.get<int>();
        } else {
          fg.chain_min = cl.at(0).get<int>();
          fg.chain_max = cl.at(1).get<int>();
        }
      }
      fg.class_mix = get_or<std::vector<double>>(g, "class_mix", {});
      fg.rate = get_or<double>(g, "rate_pps", fg.rate);
      if (fg.chain_min < 1 || fg.chain_min > fg.chain_max) throw ConfigError("flow_generation.chain_length");
      if (static_cast<std::size_t>(fg.chain_max) > c.nf_types.size()) {
        throw ConfigError("flow_generation.chain_length exceeds the number of NF types");
      }
      if (!fg.class_mix.empty() && fg.class_mix.size() != c.classes.size()) {
        throw ConfigError("flow_generation.class_mix must have one weight per class");
      }
      if (fg.rate <= 0.0) throw ConfigError("flow_generation.rate_pps must be > 0");
      c.flow_generation = fg;
    }
    if (j.contains("flows")) {
      for (const auto& f : j.at("flows")) {
        ExplicitFlow ef;
        ef.id = f.at("id").get<std::string>();
        ef.src = f.at("src").get<std::string>();
        ef.dst = f.at("dst").get<std::string>();
        ef.rate = get_or<double>(f, "rate_pps", ef.rate);
        ef.chain = f.at("chain").get<std::vector<std::string>>();
        if (f.contains("class")) ef.avail_class = f.at("class").get<int>();
        if (f.contains("avail_req")) ef.avail_req = f.at("avail_req").get<double>();
        if (f.contains("primary")) {
          const auto& p = f.at("primary");
          ef.primary_instances = p.at("instances").get<std::vector<std::string>>();
          ef.primary_path = get_or<std::vector<std::string>>(p, "path", {});
        }
        c.flows.push_back(ef);
      }
    }
    if (c.flow_generation && !c.flows.empty()) {
      throw ConfigError("use either 'flow_generation' or 'flows', not both");
    }
    if (j.contains("primary_instances")) {
      for (const auto& p : j.at("primary_instances")) {
        PrimaryInstanceSpec ps;
        ps.id = p.at("id").get<std::string>();
        ps.type = p.at("type").get<std::string>();
        ps.host = p.at("host").get<std::string>();
        ps.avail = get_or<double>(p, "avail", ps.avail);
        c.primary_instances.push_back(ps);
      }
    }

    c.structure.t_di = get_or<double>(j, "t_di", c.structure.t_di);
    c.structure.cascade_depth = get_or<int>(j, "cascade_depth", c.structure.cascade_depth);
    if (!(c.structure.t_di > 0.0 && c.structure.t_di < 1.0)) throw ConfigError("t_di must lie in (0,1)");
    if (c.structure.cascade_depth < 1) throw ConfigError("cascade_depth must be >= 1");
    c.mode = parse_reservation_mode(get_or<std::string>(j, "reservation", to_string(c.mode)));
    c.order = parse_order_policy(get_or<std::string>(j, "order", to_string(c.order)));
    c.class_order = parse_class_order(get_or<std::string>(j, "class_order", to_string(c.class_order)));
    c.independence =
        parse_independence_rule(get_or<std::string>(j, "independence", to_string(c.independence)));
    c.correlation_aware = get_or<bool>(j, "correlation_aware", c.correlation_aware);
    const auto placement = get_or<std::string>(j, "placement", "coshare");
    if (placement != "coshare" && placement != "random") {
      throw ConfigError("placement must be 'coshare' or 'random'");
    }
    c.random_placement = placement == "random";
    c.x_max = get_or<int>(j, "x_max", c.x_max);
    if (c.x_max < 1) throw ConfigError("x_max must be >= 1");
    c.runs = get_or<int>(j, "runs", c.runs);
    if (c.runs < 1) throw ConfigError("runs must be >= 1");
    c.threads = get_or<unsigned>(j, "threads", c.threads);

    auto& a = c.assignment;
    a.correlation_aware = c.correlation_aware;
    a.max_chains = c.x_max;
    if (j.contains("assignment")) {
      const auto& aj = j.at("assignment");
      a.strict_distinct_hosts = get_or<bool>(aj, "strict_distinct_hosts", a.strict_distinct_hosts);
      if (aj.contains("hop_budget") && !aj.at("hop_budget").is_null()) {
        a.hop_budget = aj.at("hop_budget").get<int>();
      }
      a.k_paths = get_or<int>(aj, "k_paths", a.k_paths);
      a.max_compositions = get_or<std::size_t>(aj, "max_compositions", a.max_compositions);
      a.max_chains = get_or<int>(aj, "max_chains", a.max_chains);
      if (a.max_compositions == 0 || a.max_chains < 1 || a.k_paths < 1) {
        throw ConfigError("assignment limits must be positive");
      }
    }

    if (j.contains("simulation") && !j.at("simulation").is_null()) {
      const auto& s = j.at("simulation");
      SimConfig sc;
      sc.replications = get_or<std::uint64_t>(s, "replications", sc.replications);
      sc.seed = get_or<std::uint64_t>(s, "seed", c.seed);
      sc.contention_aware = get_or<bool>(s, "contention_aware", sc.contention_aware);
      sc.threads = c.threads;
      if (sc.replications < 1) throw ConfigError("simulation.replications must be >= 1");
      c.simulation = sc;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(j, dir.empty() ? "." : dir.string());
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["seed"] = c.seed;
  switch (c.topology.kind) {
    case TopologySource::Kind::kFile:
      j["topology"] = {{"file", c.topology.path}};
      break;
    case TopologySource::Kind::kInline:
      j["topology"] = {{"inline", c.topology.text}};
      break;
    case TopologySource::Kind::kGenerate:
      j["topology"] = {{"generate",
                        {{"nodes", c.topology.generate.nodes},
                         {"links", c.topology.generate.links},
                         {"max_attach", c.topology.generate.max_attach},
                         {"seed", c.topology.generate.seed}}}};
      break;
  }
  j["end_nodes"] = c.end_nodes ? json(*c.end_nodes) : json(nullptr);
  j["node"] = {{"cores", c.node_cores},
               {"backup_cores", c.backup_cores},
               {"mem_gb", c.node_mem_gb},
               {"backup_mem_gb", c.backup_mem_gb},
               {"avail", c.node_avail ? range_json(*c.node_avail) : json("topology")}};
  j["nf_types"] = json::array();
  for (const auto& t : c.nf_types) {
    j["nf_types"].push_back({{"name", t.name},
                             {"cores", t.cores},
                             {"mem_gb", t.mem_gb},
                             {"capacity_pps", t.capacity},
                             {"avail", range_json(t.avail)}});
  }
  j["classes"] = c.classes;
  if (c.flow_generation) {
    const auto& g = *c.flow_generation;
    j["flow_generation"] = {{"count", g.count},
                            {"chain_length", {g.chain_min, g.chain_max}},
                            {"class_mix", g.class_mix},
                            {"rate_pps", g.rate}};
  }
  if (!c.flows.empty()) {
    j["flows"] = json::array();
    for (const auto& f : c.flows) {
      json fj{{"id", f.id}, {"src", f.src}, {"dst", f.dst}, {"rate_pps", f.rate}, {"chain", f.chain}};
      if (f.avail_class) fj["class"] = *f.avail_class;
      if (f.avail_req) fj["avail_req"] = *f.avail_req;
      if (!f.primary_instances.empty()) {
        fj["primary"] = {{"instances", f.primary_instances}, {"path", f.primary_path}};
      }
      j["flows"].push_back(fj);
    }
  }
  if (!c.primary_instances.empty()) {
    j["primary_instances"] = json::array();
    for (const auto& p : c.primary_instances) {
      j["primary_instances"].push_back(
          {{"id", p.id}, {"type", p.type}, {"host", p.host}, {"avail", p.avail}});
    }
  }
  j["t_di"] = c.structure.t_di;
  j["cascade_depth"] = c.structure.cascade_depth;
  j["reservation"] = to_string(c.mode);
  j["order"] = to_string(c.order);
  j["class_order"] = to_string(c.class_order);
  j["independence"] = to_string(c.independence);
  j["correlation_aware"] = c.correlation_aware;
  j["placement"] = c.random_placement ? "random" : "coshare";
  j["x_max"] = c.x_max;
  j["runs"] = c.runs;
  j["assignment"] = {{"strict_distinct_hosts", c.assignment.strict_distinct_hosts},
                     {"hop_budget", c.assignment.hop_budget ? json(*c.assignment.hop_budget)
                                                            : json(nullptr)},
                     {"k_paths", c.assignment.k_paths},
                     {"max_compositions", c.assignment.max_compositions},
                     {"max_chains", c.assignment.max_chains}};
  if (c.simulation) {
    j["simulation"] = {{"replications", c.simulation->replications},
                       {"seed", c.simulation->seed},
                       {"contention_aware", c.simulation->contention_aware}};
  }
  return j;
}

Network build_network(const ScenarioConfig& config, std::uint64_t seed) {
  NodeAttributes attrs;
  attrs.cores = config.node_cores;
  attrs.mem_gb = config.node_mem_gb;
  Network net;
  try {
    switch (config.topology.kind) {
      case TopologySource::Kind::kFile:
        net = load_topology_file(config.topology.path, TopologyDefaults{attrs});
        break;
      case TopologySource::Kind::kInline:
        net = load_topology(config.topology.text, TopologyDefaults{attrs});
        break;
      case TopologySource::Kind::kGenerate:
        net = generate_isp_topology(config.topology.generate, attrs);
        break;
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }

  if (config.node_avail) {
    Stream s(seed, "node_avail");
    for (NodeId n = 0; n < net.size(); ++n) {
      auto a = net.attrs(n);
      a.avail = draw(s, *config.node_avail);
      net.set_attrs(n, a);
    }
  }
  if (config.end_nodes) {
    if (*config.end_nodes > net.size()) throw ConfigError("end_nodes exceeds the node count");
    std::vector<NodeId> order(net.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      return net.neighbors(a).size() < net.neighbors(b).size();
    });
    for (std::size_t k = 0; k < *config.end_nodes; ++k) {
      auto a = net.attrs(order[k]);
      a.end = true;
      net.set_attrs(order[k], a);
    }
  }
  return net;
}

void provision_primaries(Model& model, PrimaryBudget& budget, const std::vector<Range>& type_avail,
                         std::uint64_t seed) {
  Stream avail_stream(seed, "primary_instance_avail");
  const auto& net = model.net;
  std::size_t created = 0;
  for (FlowIndex f = 0; f < model.flows.size(); ++f) {
    const auto& flow = model.flows[f];
    if (flow.primary) continue;
    const auto path = shortest_path(net, flow.src, flow.dst);
    if (path.empty()) {
      throw InfeasibleScenario("flow '" + flow.id + "': destination unreachable from source");
    }
    std::vector<InstanceIndex> chain;
    for (TypeIndex t : flow.chain) {
      const auto& type = model.types[t];
      std::optional<InstanceIndex> pick;
      for (NodeId n : path) {
        for (InstanceIndex v = 0; v < model.instances.size() && !pick; ++v) {
          const auto& inst = model.instances[v];
          if (inst.role != InstanceRole::kPrimary || inst.type != t || inst.host != n) continue;
          if (std::find(chain.begin(), chain.end(), v) != chain.end()) continue;
          if (inst.ledger.free() + 1e-9 * type.capacity >= flow.rate) pick = v;
        }
        if (pick) break;
      }
      std::optional<NodeId> host;
      if (!pick) {
        auto fits = [&](NodeId n) {
          return !net.is_end(n) && budget.free[n].cores >= type.cores &&
                 budget.free[n].mem_gb >= type.mem_gb;
        };
        for (NodeId n : path) {
          if (fits(n) && (!host || budget.free[n].cores > budget.free[*host].cores)) host = n;
        }
        if (!host) {
          // off the path: nearest spare primary of this type, else nearest
          // node with room; distance is hops from the closest path node
          std::vector<int> dist(net.size(), -1);
          for (NodeId p : path) {
            const auto d = bfs_hops(net, p);
            for (NodeId n = 0; n < net.size(); ++n) {
              if (d[n] >= 0 && (dist[n] < 0 || d[n] < dist[n])) dist[n] = d[n];
            }
          }
          int best = std::numeric_limits<int>::max();
          for (InstanceIndex v = 0; v < model.instances.size(); ++v) {
            const auto& inst = model.instances[v];
            if (inst.role != InstanceRole::kPrimary || inst.type != t || dist[inst.host] < 0) continue;
            if (std::find(chain.begin(), chain.end(), v) != chain.end()) continue;
            if (inst.ledger.free() + 1e-9 * type.capacity < flow.rate) continue;
            if (dist[inst.host] < best) {
              best = dist[inst.host];
              pick = v;
            }
          }
          for (NodeId n = 0; n < net.size(); ++n) {
            if (dist[n] >= 0 && fits(n) && dist[n] < best) {
              best = dist[n];
              host = n;
              pick.reset();
            }
          }
        }
      }
      if (!pick) {
        if (!host) {
          throw InfeasibleScenario("flow '" + flow.id + "': no node can host a primary " +
                                   type.name);
        }
        budget.free[*host].cores -= type.cores;
        budget.free[*host].mem_gb -= type.mem_gb;
        const double a = draw(avail_stream, type_avail.at(t));
        pick = model.add_instance("p" + std::to_string(created++), t, *host, InstanceRole::kPrimary, a);
        model.instances[*pick].ledger = ReservationLedger(ReservationMode::kDedicated, type.capacity);
      }
      if (!model.instances[*pick].ledger.reserve(f, flow.rate, nullptr)) {
        throw InfeasibleScenario("flow '" + flow.id + "': primary " + type.name +
                                 " rate exceeds instance capacity");
      }
      chain.push_back(*pick);
    }
    model.bind_primary(f, std::move(chain), path);
  }
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  Scenario sc;
  sc.seed = seed;
  sc.class_requirements = config.classes;
  Model& model = sc.model;
  model.net = build_network(config, seed);
  model.mode = config.mode;
  sc.streams = {"node_avail", "flows", "primary_instance_avail", "backup_instance_avail"};
  if (config.topology.kind == TopologySource::Kind::kGenerate) sc.streams.insert(sc.streams.begin(), "topology");
  const auto& net = model.net;

  std::vector<Range> type_avail;
  for (const auto& t : config.nf_types) {
    // estimation works from the worst case of the drawn range
    model.types.push_back({t.name, t.cores, t.mem_gb, t.capacity, t.avail.lo});
    type_avail.push_back(t.avail);
  }

  auto node_of = [&](const std::string& id) {
    auto n = net.find(id);
    if (!n) throw ConfigError("unknown node '" + id + "'");
    return *n;
  };
  auto type_of = [&](const std::string& name) {
    try {
      return model.type_index(name);
    } catch (const ValidationError&) {
      throw ConfigError("unknown NF type '" + name + "'");
    }
  };
  auto class_for = [&](double req) {
    for (std::size_t k = 0; k < config.classes.size(); ++k) {
      if (config.classes[k] >= req) return static_cast<int>(k);
    }
    return static_cast<int>(config.classes.size()) - 1;
  };

  if (config.flow_generation) {
    const auto& g = *config.flow_generation;
    std::vector<NodeId> ends;
    for (NodeId n = 0; n < net.size(); ++n) {
      if (net.is_end(n)) ends.push_back(n);
    }
    if (g.count > 0 && ends.size() < 2) throw ConfigError("flow generation needs at least two end nodes");
    std::vector<double> mix = g.class_mix;
    if (mix.empty()) mix.assign(config.classes.size(), 1.0);
    const double mix_total = std::accumulate(mix.begin(), mix.end(), 0.0);
    if (!(mix_total > 0.0)) throw ConfigError("flow_generation.class_mix must have positive weight");
    Stream s(seed, "flows");
    for (std::size_t k = 0; k < g.count; ++k) {
      FlowSpec f;
      f.id = "f" + std::to_string(k);
      const auto a = static_cast<std::size_t>(s.integer(0, static_cast<std::int64_t>(ends.size()) - 1));
      auto b = static_cast<std::size_t>(s.integer(0, static_cast<std::int64_t>(ends.size()) - 2));
      if (b >= a) ++b;
      f.src = ends[a];
      f.dst = ends[b];
      f.rate = g.rate;
      const auto len = static_cast<std::size_t>(s.integer(g.chain_min, g.chain_max));
      std::vector<TypeIndex> pool(model.types.size());
      std::iota(pool.begin(), pool.end(), TypeIndex{0});
      for (std::size_t i = 0; i < len; ++i) {
        const auto r = static_cast<std::size_t>(
            s.integer(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
        std::swap(pool[i], pool[r]);
        f.chain.push_back(pool[i]);
      }
      double u = s.uniform() * mix_total;
      f.avail_class = static_cast<int>(mix.size()) - 1;
      for (std::size_t c = 0; c < mix.size(); ++c) {
        if (u < mix[c]) {
          f.avail_class = static_cast<int>(c);
          break;
        }
        u -= mix[c];
      }
      f.avail_req = config.classes[static_cast<std::size_t>(f.avail_class)];
      model.flows.push_back(std::move(f));
    }
  }
  for (const auto& ef : config.flows) {
    FlowSpec f;
    f.id = ef.id;
    f.src = node_of(ef.src);
    f.dst = node_of(ef.dst);
    if (f.src == f.dst) throw ConfigError("flow '" + ef.id + "': src equals dst");
    if (!net.is_end(f.src) || !net.is_end(f.dst)) {
      throw ConfigError("flow '" + ef.id + "': endpoints must be end nodes");
    }
    if (!(ef.rate > 0.0)) throw ConfigError("flow '" + ef.id + "': rate must be > 0");
    f.rate = ef.rate;
    for (const auto& name : ef.chain) {
      const TypeIndex t = type_of(name);
      if (std::find(f.chain.begin(), f.chain.end(), t) != f.chain.end()) {
        throw ConfigError("flow '" + ef.id + "': NF type '" + name + "' repeated in chain");
      }
      f.chain.push_back(t);
    }
    if (f.chain.empty()) throw ConfigError("flow '" + ef.id + "': empty chain");
    if (ef.avail_class) {
      if (*ef.avail_class < 0 || static_cast<std::size_t>(*ef.avail_class) >= config.classes.size()) {
        throw ConfigError("flow '" + ef.id + "': unknown class");
      }
      f.avail_class = *ef.avail_class;
      f.avail_req = ef.avail_req.value_or(config.classes[static_cast<std::size_t>(f.avail_class)]);
    } else if (ef.avail_req) {
      f.avail_req = *ef.avail_req;
      f.avail_class = class_for(f.avail_req);
    } else {
      f.avail_class = 0;
      f.avail_req = config.classes[0];
    }
    if (!(f.avail_req > 0.0 && f.avail_req < 1.0)) throw ConfigError("flow '" + ef.id + "': avail_req");
    for (const auto& other : model.flows) {
      if (other.id == f.id) throw ConfigError("duplicate flow id '" + f.id + "'");
    }
    model.flows.push_back(std::move(f));
  }

  PrimaryBudget budget;
  for (NodeId n = 0; n < net.size(); ++n) {
    budget.free.push_back({net.cores(n) - config.backup_cores, net.attrs(n).mem_gb - config.backup_mem_gb});
    sc.backup_budget.push_back(net.is_end(n) ? NodeBudget{0, 0}
                                             : NodeBudget{std::min(config.backup_cores, net.cores(n)),
                                                          std::min(config.backup_mem_gb, net.attrs(n).mem_gb)});
  }

  try {
    for (const auto& p : config.primary_instances) {
      const TypeIndex t = type_of(p.type);
      const NodeId host = node_of(p.host);
      if (model.find_instance(p.id)) throw ConfigError("duplicate instance id '" + p.id + "'");
      const auto v = model.add_instance(p.id, t, host, InstanceRole::kPrimary, p.avail);
      model.instances[v].ledger = ReservationLedger(ReservationMode::kDedicated, model.types[t].capacity);
      budget.free[host].cores -= model.types[t].cores;
      budget.free[host].mem_gb -= model.types[t].mem_gb;
    }
    for (std::size_t k = 0; k < config.flows.size(); ++k) {
      const auto& ef = config.flows[k];
      if (ef.primary_instances.empty()) continue;
      const FlowIndex f = model.flows.size() - config.flows.size() + k;
      std::vector<InstanceIndex> chain;
      for (const auto& id : ef.primary_instances) {
        auto v = model.find_instance(id);
        if (!v) throw ConfigError("flow '" + ef.id + "': unknown primary instance '" + id + "'");
        if (!model.instances[*v].ledger.reserve(f, model.flows[f].rate, nullptr)) {
          throw InfeasibleScenario("flow '" + ef.id + "': primary instance '" + id + "' over capacity");
        }
        chain.push_back(*v);
      }
      std::vector<NodeId> path;
      for (const auto& n : ef.primary_path) path.push_back(node_of(n));
      if (path.empty()) path = shortest_path(net, model.flows[f].src, model.flows[f].dst);
      model.bind_primary(f, std::move(chain), std::move(path));
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  provision_primaries(model, budget, type_avail, seed);
  return sc;
}

}  // namespace coshare
