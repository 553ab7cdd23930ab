#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "coshare/error.hpp"
#include "coshare/harness.hpp"
#include "coshare/oracle.hpp"
#include "coshare/plan_io.hpp"

using namespace coshare;
using nlohmann::json;

namespace {

constexpr int kConfigExit = 2;
constexpr int kInfeasibleExit = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list");
    }
  }
  return out;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string reservation;
  std::string order;
  std::optional<double> t_di;
  std::optional<int> runs;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Override the scenario seed");
    app->add_option("--reservation", reservation, "dedicated | shared");
    app->add_option("--order", order, "input | chain_length_desc | chain_length_asc | avail_desc | avail_asc");
    app->add_option("--t-di", t_di, "Override the DI threshold");
    app->add_option("--runs", runs, "Number of seeded runs");
  }

  void apply(ScenarioConfig& c) const {
    if (seed) {
      c.seed = *seed;
      if (c.topology.kind == TopologySource::Kind::kGenerate) c.topology.generate.seed = *seed;
    }
    if (!reservation.empty()) c.mode = parse_reservation_mode(reservation);
    if (!order.empty()) c.order = parse_order_policy(order);
    if (t_di) {
      if (!(*t_di > 0.0 && *t_di < 1.0)) throw ConfigError("t_di must lie in (0,1)");
      c.structure.t_di = *t_di;
    }
    if (runs) {
      if (*runs < 1) throw ConfigError("runs must be >= 1");
      c.runs = *runs;
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Redundancy allocation for NFV service chains"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_path, topology_path;
  Overrides overrides;

  auto* analyze = app.add_subcommand("analyze-topology", "DI table and correlated sets");
  analyze->add_option("--config", config_path, "Scenario config (JSON)");
  analyze->add_option("--topology", topology_path, "Edge-list file (instead of a config)");
  analyze->add_option("--json", out_path, "Write critical/correlated sets JSON here");
  analyze->add_option("--csv", csv_path, "Write the DI table CSV (i,n,di) here");
  overrides.add(analyze);

  std::string estimates_path, placement_path, placement_csv_path;
  auto* plan = app.add_subcommand("plan", "Run the allocation pipeline");
  plan->add_option("--config", config_path, "Scenario config (JSON)")->required();
  plan->add_option("--out", out_path, "Experiment/plan JSON (default stdout)");
  plan->add_option("--emit-estimates", estimates_path, "Write backup estimates JSON");
  plan->add_option("--emit-placement", placement_path, "Write per-node placement JSON");
  plan->add_option("--placement-csv", placement_csv_path, "Write per-instance placement CSV");
  overrides.add(plan);

  std::string plan_path, cdf_path;
  SimConfig sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo availability of a plan");
  simulate_cmd->add_option("--plan", plan_path, "Plan or experiment JSON")->required();
  simulate_cmd->add_option("--replications", sim.replications, "Replications")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "Sampling seed");
  simulate_cmd->add_flag("--contention-aware", sim.contention_aware, "Also evaluate capacity contention");
  simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  simulate_cmd->add_option("--out", out_path, "SimReport JSON (default stdout)");
  simulate_cmd->add_option("--cdf", cdf_path, "Unavailability CDF CSV");

  std::uint64_t bound = kOracleSearchBound;
  double time_budget = 0.0;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive minimum backup count on a tiny scenario");
  oracle->add_option("--config", config_path, "Scenario config (JSON)")->required();
  oracle->add_option("--bound", bound, "Refuse search spaces larger than this");
  oracle->add_option("--time-budget", time_budget, "Seconds before the search stops early");
  oracle->add_option("--out", out_path, "Result JSON (default stdout)");
  overrides.add(oracle);

  std::string t_values = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  auto* sweep = app.add_subcommand("sweep", "Backup counts across DI thresholds");
  sweep->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sweep->add_option("--t", t_values, "Comma-separated thresholds");
  sweep->add_option("--out", out_path, "Sweep JSON (default stdout)");
  sweep->add_option("--csv", csv_path, "Sweep CSV");
  overrides.add(sweep);

  std::string experiment_path;
  auto* report = app.add_subcommand("report", "Per-class summary of an experiment");
  report->add_option("--experiment", experiment_path, "Experiment JSON from `plan`")->required();
  report->add_option("--csv", csv_path, "Write CSV here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&]() {
      ScenarioConfig c = load_config_file(config_path);
      overrides.apply(c);
      return c;
    };

    if (analyze->parsed()) {
      Network net;
      StructureOptions so;
      unsigned threads = 0;
      if (!config_path.empty()) {
        const auto c = load();
        net = build_network(c, c.seed);
        so = c.structure;
        threads = c.threads;
      } else if (!topology_path.empty()) {
        net = load_topology_file(topology_path);
        if (overrides.t_di) so.t_di = *overrides.t_di;
      } else {
        throw ConfigError("analyze-topology needs --config or --topology");
      }
      const DependencyProfile profile(compute_di_table(net, threads), so);
      if (!csv_path.empty()) emit(csv_path, di_csv(net, profile.di()));
      if (!out_path.empty() || csv_path.empty()) emit(out_path, dump(profile_to_json(net, profile)));
    } else if (plan->parsed()) {
      const auto c = load();
      const auto rep = run_experiment(c);
      const auto& first = rep.runs.front();
      if (!estimates_path.empty()) emit(estimates_path, dump(demand_to_json(first.model, first.demand)));
      if (!placement_path.empty()) emit(placement_path, dump(placement_to_json(first.model, first.placement)));
      if (!placement_csv_path.empty()) emit(placement_csv_path, placement_csv(first.model, first.placement));
      emit(out_path, dump(experiment_to_json(rep)));
    } else if (simulate_cmd->parsed()) {
      const auto sp = sim_plan_from_json(read_json_file(plan_path));
      const auto r = simulate(sp, sim);
      if (!cdf_path.empty()) emit(cdf_path, cdf_csv(r));
      emit(out_path, dump(sim_report_to_json(r)));
    } else if (oracle->parsed()) {
      const auto c = load();
      Scenario sc = build_scenario(c, c.seed);
      TinyScenario tiny;
      tiny.model = sc.model;
      tiny.budget = sc.backup_budget;
      tiny.structure = c.structure;
      tiny.correlation_aware = c.correlation_aware;
      tiny.independence = c.independence;
      tiny.time_budget_s = time_budget;
      const auto res = exhaustive_min_backups(tiny, bound);
      json j{{"feasible", res.feasible},
             {"complete", res.complete},
             {"count", res.count},
             {"placements_examined", res.placements_examined},
             {"search_space", search_space_size(tiny)}};
      j["placement"] = json::array();
      for (const auto& p : res.placement) {
        j["placement"].push_back({{"type", tiny.model.types[p.type].name}, {"node", tiny.model.net.name(p.host)}});
      }
      j["chains"] = json::object();
      for (std::size_t f = 0; f < res.chains.size(); ++f) j["chains"][tiny.model.flows[f].id] = res.chains[f];
      auto po = pipeline_options(c, c.seed);
      po.backup_avail.clear();
      const auto heur = run_pipeline(sc.model, sc.backup_budget, sc.class_requirements, po);
      j["coshare"] = metrics_to_json(heur.metrics);
      emit(out_path, dump(j));
      if (!res.feasible && res.complete) return kInfeasibleExit;
    } else if (sweep->parsed()) {
      const auto c = load();
      const auto points = threshold_sweep(c, parse_list(t_values));
      if (!csv_path.empty()) emit(csv_path, sweep_csv(points));
      if (!out_path.empty() || csv_path.empty()) emit(out_path, dump(sweep_to_json(points)));
    } else if (report->parsed()) {
      emit(csv_path, report_csv(read_json_file(experiment_path)));
    }
  } catch (const InfeasibleScenario& e) {
    std::cerr << "infeasible scenario: " << e.what() << "\n";
    return kInfeasibleExit;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
