#include "coshare/plan_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "coshare/error.hpp"

namespace coshare {

using nlohmann::json;

namespace {

// shortest text that round-trips
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json interval_json(const Interval& i) { return {{"mean", i.mean}, {"ci95", i.half_width}}; }

}  // namespace

json metrics_to_json(const MetricsReport& m) {
  json j{{"flows", m.flows},
         {"accepted", m.accepted},
         {"acceptance_ratio", m.acceptance_ratio},
         {"primaries", m.primaries},
         {"backups_placed", m.backups_placed},
         {"backups_used", m.backups_used},
         {"overbuild", m.overbuild},
         {"nodes_used", m.nodes_used},
         {"nodes_placed", m.nodes_placed}};
  j["classes"] = json::array();
  for (const auto& c : m.classes) {
    j["classes"].push_back({{"class", c.avail_class},
                            {"requirement", c.requirement},
                            {"flows", c.flows},
                            {"accepted", c.accepted},
                            {"acceptance_ratio", c.acceptance_ratio},
                            {"primaries", c.primaries},
                            {"backups_used", c.backups_used},
                            {"overbuild", c.overbuild}});
  }
  return j;
}

json plan_to_json(const PipelineResult& r) {
  const Model& m = r.model;
  json j;
  j["seed"] = r.seed;
  j["reservation"] = to_string(m.mode);
  j["class_requirements"] = r.class_requirements;
  j["nodes"] = json::array();
  for (NodeId n = 0; n < m.net.size(); ++n) {
    j["nodes"].push_back({{"id", m.net.name(n)},
                          {"cores", m.net.cores(n)},
                          {"mem_gb", m.net.attrs(n).mem_gb},
                          {"avail", m.net.avail(n)},
                          {"end", m.net.is_end(n)}});
  }
  j["links"] = json::array();
  for (auto [a, b] : m.net.links()) j["links"].push_back({m.net.name(a), m.net.name(b)});
  j["nf_types"] = json::array();
  for (const auto& t : m.types) {
    j["nf_types"].push_back({{"name", t.name},
                             {"cores", t.cores},
                             {"mem_gb", t.mem_gb},
                             {"capacity_pps", t.capacity},
                             {"avail", t.avail}});
  }
  j["instances"] = json::array();
  for (const auto& inst : m.instances) {
    json groups = json::array();
    for (const auto& g : inst.ledger.groups()) {
      json members = json::array();
      for (FlowIndex f : g.members) members.push_back(m.flows[f].id);
      groups.push_back({{"flows", members}, {"rate_pps", g.rate}});
    }
    j["instances"].push_back({{"id", inst.id},
                              {"type", m.types[inst.type].name},
                              {"host", m.net.name(inst.host)},
                              {"role", to_string(inst.role)},
                              {"avail", inst.avail},
                              {"capacity_pps", inst.ledger.capacity()},
                              {"ledger",
                               {{"mode", to_string(inst.ledger.mode())},
                                {"reserved_pps", inst.ledger.reserved()},
                                {"groups", groups}}}});
  }
  std::vector<const AssignmentOutcome*> by_flow(m.flows.size(), nullptr);
  for (const auto& o : r.outcomes) by_flow[o.flow] = &o;
  j["flows"] = json::array();
  for (FlowIndex f = 0; f < m.flows.size(); ++f) {
    const auto& flow = m.flows[f];
    json chain = json::array();
    for (TypeIndex t : flow.chain) chain.push_back(m.types[t].name);
    json fj{{"id", flow.id},
            {"src", m.net.name(flow.src)},
            {"dst", m.net.name(flow.dst)},
            {"rate_pps", flow.rate},
            {"chain", chain},
            {"class", flow.avail_class},
            {"avail_req", flow.avail_req}};
    if (flow.primary) {
      json inst = json::array(), path = json::array();
      for (InstanceIndex v : flow.primary->instances) inst.push_back(m.instances[v].id);
      for (NodeId n : flow.primary->path) path.push_back(m.net.name(n));
      fj["primary"] = {{"instances", inst}, {"path", path}, {"avail", flow.primary->avail}};
    }
    const auto* o = by_flow[f];
    fj["status"] = o == nullptr ? "unassigned" : (o->accepted ? "accepted" : "rejected");
    fj["reason"] = o == nullptr ? "none" : to_string(o->reason);
    json chains = json::array();
    if (o != nullptr) {
      for (const auto& c : o->chains) {
        json ids = json::array();
        for (InstanceIndex v : c.instances) ids.push_back(m.instances[v].id);
        chains.push_back(ids);
      }
    }
    fj["chains"] = chains;
    fj["achieved_avail"] = o == nullptr ? 0.0 : o->achieved_avail;
    j["flows"].push_back(fj);
  }
  j["estimate"] = demand_to_json(m, r.demand);
  j["metrics"] = metrics_to_json(r.metrics);
  return j;
}

json experiment_to_json(const ExperimentReport& rep) {
  json j;
  j["config"] = to_json(rep.config);
  j["streams"] = {"topology", "node_avail", "flows", "primary_instance_avail",
                  "backup_instance_avail", "random_placement"};
  j["runs"] = json::array();
  for (const auto& r : rep.runs) j["runs"].push_back({{"seed", r.seed}, {"metrics", metrics_to_json(r.metrics)}});
  json summary{{"runs", rep.runs.size()},
               {"backups_used", interval_json(rep.backups_used)},
               {"overbuild", interval_json(rep.overbuild)}};
  summary["classes"] = json::array();
  for (std::size_t c = 0; c < rep.class_overbuild.size(); ++c) {
    summary["classes"].push_back({{"class", c},
                                  {"requirement", rep.config.classes[c]},
                                  {"backups_used", interval_json(rep.class_backups_used[c])},
                                  {"overbuild", interval_json(rep.class_overbuild[c])},
                                  {"acceptance_ratio", interval_json(rep.class_acceptance[c])}});
  }
  j["summary"] = summary;
  if (!rep.runs.empty()) j["plan"] = plan_to_json(rep.runs.front());
  if (rep.simulation) j["simulation"] = sim_report_to_json(*rep.simulation);
  return j;
}

SimPlan sim_plan_from_json(const json& doc) {
  const json& p = doc.contains("plan") ? doc.at("plan") : doc;
  SimPlan plan;
  try {
    std::map<std::string, std::size_t> node_index, inst_index;
    for (const auto& n : p.at("nodes")) {
      const auto id = n.at("id").get<std::string>();
      node_index[id] = plan.nodes.size();
      plan.nodes.push_back({id, n.at("avail").get<double>()});
    }
    for (const auto& i : p.at("instances")) {
      const auto id = i.at("id").get<std::string>();
      const auto host = i.at("host").get<std::string>();
      if (!node_index.count(host)) throw ConfigError("plan: instance '" + id + "' on unknown node");
      inst_index[id] = plan.instances.size();
      plan.instances.push_back(
          {id, i.at("avail").get<double>(), node_index.at(host), i.at("capacity_pps").get<double>()});
    }
    auto resolve = [&](const json& ids) {
      std::vector<std::size_t> out;
      for (const auto& id : ids) {
        const auto s = id.get<std::string>();
        if (!inst_index.count(s)) throw ConfigError("plan: unknown instance '" + s + "'");
        out.push_back(inst_index.at(s));
      }
      return out;
    };
    for (const auto& f : p.at("flows")) {
      SimPlan::Flow flow;
      flow.id = f.at("id").get<std::string>();
      flow.rate = f.at("rate_pps").get<double>();
      if (f.contains("primary")) flow.primary = resolve(f.at("primary").at("instances"));
      for (const auto& c : f.at("chains")) flow.backups.push_back(resolve(c));
      plan.flows.push_back(std::move(flow));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  return plan;
}

json sim_report_to_json(const SimReport& r) {
  json j{{"replications", r.replications}, {"seed", r.seed}, {"contention_aware", r.contention_aware}};
  j["flows"] = json::array();
  for (const auto& f : r.flows) {
    json fj{{"id", f.flow}, {"availability", f.availability}, {"ci95", f.half_width}};
    if (f.contention_availability) fj["contention_availability"] = *f.contention_availability;
    j["flows"].push_back(fj);
  }
  j["fraction_at_nines"] = json::array();
  for (std::size_t k = 0; k < r.fraction_at_nines.size(); ++k) {
    j["fraction_at_nines"].push_back({{"nines", k + 1}, {"fraction", r.fraction_at_nines[k]}});
  }
  j["unavailability_cdf"] = json::array();
  for (const auto& p : r.unavailability_cdf) {
    j["unavailability_cdf"].push_back({{"unavailability", p.unavailability}, {"fraction", p.fraction}});
  }
  return j;
}

std::string cdf_csv(const SimReport& r) {
  std::string out = "unavailability,fraction\n";
  for (const auto& p : r.unavailability_cdf) out += fmt(p.unavailability) + "," + fmt(p.fraction) + "\n";
  return out;
}

json demand_to_json(const Model& model, const BackupDemand& d) {
  json j;
  j["classes"] = json::array();
  for (const auto& c : d.classes) {
    json z = json::object();
    for (TypeIndex t = 0; t < model.types.size(); ++t) {
      if (d.count(t, c.avail_class) > 0) z[model.types[t].name] = d.count(t, c.avail_class);
    }
    j["classes"].push_back({{"class", c.avail_class},
                            {"requirement", c.requirement},
                            {"flows", c.flow_count},
                            {"worst_primary", c.worst_primary},
                            {"worst_node", c.worst_node},
                            {"worst_instance", c.worst_instance},
                            {"max_chain_length", c.max_chain_length},
                            {"h", c.chains ? json(*c.chains) : json(nullptr)},
                            {"z", z}});
  }
  json totals = json::object();
  for (TypeIndex t = 0; t < model.types.size(); ++t) totals[model.types[t].name] = d.z_total[t];
  j["z_total"] = totals;
  j["total"] = d.total();
  return j;
}

json placement_to_json(const Model& model, const PlacementResult& p) {
  std::map<NodeId, std::vector<std::size_t>> by_node;
  for (std::size_t k = 0; k < p.placed.size(); ++k) by_node[p.placed[k].host].push_back(k);
  json j;
  j["nodes"] = json::array();
  for (const auto& [n, ks] : by_node) {
    json inst = json::array();
    for (std::size_t k : ks) {
      inst.push_back({{"id", "b" + std::to_string(k)},
                      {"type", model.types[p.placed[k].type].name},
                      {"class", p.placed[k].avail_class}});
    }
    j["nodes"].push_back({{"node", model.net.name(n)}, {"instances", inst}});
  }
  j["unplaced"] = json::array();
  for (const auto& [key, count] : p.unplaced) {
    j["unplaced"].push_back({{"type", model.types[key.first].name}, {"class", key.second}, {"count", count}});
  }
  j["placed"] = p.placed.size();
  j["nodes_used"] = p.nodes_used.size();
  return j;
}

std::string placement_csv(const Model& model, const PlacementResult& p) {
  std::string out = "instance,node,type,class\n";
  for (std::size_t k = 0; k < p.placed.size(); ++k) {
    out += "b" + std::to_string(k) + "," + model.net.name(p.placed[k].host) + "," +
           model.types[p.placed[k].type].name + "," + std::to_string(p.placed[k].avail_class) + "\n";
  }
  return out;
}

json profile_to_json(const Network& net, const DependencyProfile& profile) {
  json j;
  j["t_di"] = profile.threshold();
  j["cascade_depth"] = profile.options().cascade_depth;
  j["nodes"] = json::array();
  for (NodeId n = 0; n < net.size(); ++n) {
    json crit = json::array(), corr = json::array();
    for (NodeId c : profile.critical(n)) crit.push_back(net.name(c));
    for (NodeId c : profile.correlated(n)) corr.push_back(net.name(c));
    j["nodes"].push_back({{"id", net.name(n)}, {"end", net.is_end(n)}, {"critical", crit}, {"correlated", corr}});
  }
  return j;
}

std::string di_csv(const Network& net, const DiTable& di) {
  std::string out = "i,n,di\n";
  for (NodeId i = 0; i < net.size(); ++i) {
    for (NodeId n = 0; n < net.size(); ++n) {
      if (i == n) continue;
      out += net.name(i) + "," + net.name(n) + "," + fmt(di(i, n)) + "\n";
    }
  }
  return out;
}

json sweep_to_json(const std::vector<SweepPoint>& points) {
  json j = json::array();
  for (const auto& p : points) {
    j.push_back({{"t_di", p.t_di},
                 {"backups_estimated", p.backups_estimated},
                 {"backups_placed", p.backups_placed},
                 {"backups_used", p.backups_used},
                 {"coverage", p.coverage}});
  }
  return j;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "t_di,backups_estimated,backups_placed,backups_used,coverage\n";
  for (const auto& p : points) {
    out += fmt(p.t_di) + "," + std::to_string(p.backups_estimated) + "," + std::to_string(p.backups_placed) +
           "," + std::to_string(p.backups_used) + "," + fmt(p.coverage) + "\n";
  }
  return out;
}

std::string report_csv(const json& doc) {
  std::string out = "class,requirement,backups_used,backups_used_ci95,overbuild,overbuild_ci95,"
                    "acceptance_ratio,acceptance_ratio_ci95\n";
  try {
    for (const auto& c : doc.at("summary").at("classes")) {
      out += std::to_string(c.at("class").get<int>()) + "," + fmt(c.at("requirement").get<double>()) + "," +
             fmt(c.at("backups_used").at("mean").get<double>()) + "," +
             fmt(c.at("backups_used").at("ci95").get<double>()) + "," +
             fmt(c.at("overbuild").at("mean").get<double>()) + "," +
             fmt(c.at("overbuild").at("ci95").get<double>()) + "," +
             fmt(c.at("acceptance_ratio").at("mean").get<double>()) + "," +
             fmt(c.at("acceptance_ratio").at("ci95").get<double>()) + "\n";
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: not an experiment document: ") + e.what());
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace coshare
