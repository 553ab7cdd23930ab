#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "coshare/assignment.hpp"
#include "coshare/error.hpp"
#include "support.hpp"
#include "shareable_pair.hpp"

using namespace coshare;
using namespace coshare::testing;

namespace {

// Full mesh: s, d (end nodes), then `hosts` hosting nodes. Two NF types.
Model mesh_model(std::size_t hosts, double node_avail = 1.0,
                 ReservationMode mode = ReservationMode::kDedicated) {
  Network net;
  net.add_node("s", attrs(1.0, 8, true));
  net.add_node("d", attrs(1.0, 8, true));
  for (std::size_t k = 0; k < hosts; ++k) net.add_node("h" + std::to_string(k), attrs(node_avail));
  for (NodeId a = 0; a < net.size(); ++a) {
    for (NodeId b = a + 1; b < net.size(); ++b) net.add_link(a, b);
  }
  return make_model(std::move(net), 2, 10.0, 0.999, mode);
}

InstanceIndex backup(Model& m, const std::string& id, TypeIndex t, NodeId host, double avail) {
  const auto v = m.add_instance(id, t, host, InstanceRole::kBackup, avail);
  m.instances[v].ledger = ReservationLedger(m.mode, m.types[t].capacity);
  return v;
}

struct Pipeline {
  DependencyProfile profile;
  FlowIndependence indep;
  Assigner assigner;
  Pipeline(Model& m, AssignmentOptions opt = {})
      : profile(DependencyProfile::analyze(m.net, {})),
        indep(m, IndependenceRule::kHostingNodes),
        assigner(m, profile, indep, opt) {}
};

// The five-FW / five-LB walkthrough: primary 0.99, requirement 0.9999, all
// hosts perfectly available so composites equal instance availabilities.
struct Walkthrough {
  Model m = mesh_model(12);
  FlowIndex f = 0;
  std::vector<double> fw{0.999, 0.998, 0.997, 0.995, 0.993};
  std::vector<double> lb{0.998, 0.996, 0.994, 0.95, 0.9};
  Walkthrough() {
    f = add_flow(m, "f", 0, 1, 1.0, {0, 1}, 0.9999);
    const auto p0 = m.add_instance("p0", 0, 2, InstanceRole::kPrimary, 0.99);
    const auto p1 = m.add_instance("p1", 1, 3, InstanceRole::kPrimary, 1.0);
    m.bind_primary(f, {p0, p1}, {0, 2, 3, 1});
    for (std::size_t k = 0; k < 5; ++k) {
      backup(m, "fw" + std::to_string(k), 0, 4 + k, fw[k]);
      backup(m, "lb" + std::to_string(k), 1, 9 + k, lb[k]);
    }
  }
  std::vector<double> avails(const std::vector<InstanceIndex>& set) const {
    std::vector<double> out;
    for (auto v : set) out.push_back(m.instances[v].avail);
    std::sort(out.rbegin(), out.rend());
    return out;
  }
};

}  // namespace

TEST(AvailabilityRange, WorkedExample) {
  const auto r = availability_range(0.9, {{0.99, 0.95}, {0.99}});
  EXPECT_NEAR(r.min, 0.99405, 1e-12);
  EXPECT_NEAR(r.max, 0.99801, 1e-12);
  const auto single = availability_range(0.9, {{0.97}, {0.98}});
  EXPECT_EQ(single.min, single.max);
}

TEST(Candidates, WalkthroughSets) {
  Walkthrough fx;
  Pipeline p(fx.m);
  const auto c = p.assigner.candidate_instances(fx.f);
  const auto sets = std::get<CandidateSets>(c);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].size(), 5u);
  EXPECT_EQ(sets[1].size(), 5u);
  const auto range = p.assigner.min_max_availability(sets, 0.99);
  EXPECT_LT(range.min, 0.9999);
  EXPECT_GT(range.max, 0.9999);
}

TEST(Candidates, FullInstanceAndPrimaryHostExcluded) {
  Model m = mesh_model(4);
  const auto f = add_flow(m, "f", 0, 1, 2.0, {0}, 0.9999);
  bind_on(m, f, {2}, 0.99);
  backup(m, "on-primary", 0, 2, 0.999);
  const auto other = add_flow(m, "other", 0, 1, 9.0, {0}, 0.9999);
  bind_on(m, other, {5});
  const auto full = backup(m, "full", 0, 3, 0.999);
  m.instances[full].ledger.reserve(other, 9.0, nullptr);
  const auto ok = backup(m, "ok", 0, 4, 0.999);
  Pipeline p(m);
  const auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(f));
  EXPECT_EQ(sets[0], (std::vector<InstanceIndex>{ok}));
}

TEST(Candidates, CorrelatedHostExcluded) {
  // path s - a - b - c - d: a's removal cuts s off, so b is tied to a
  Network net;
  net.add_node("s", attrs(1.0, 8, true));
  net.add_node("a", attrs());
  net.add_node("b", attrs());
  net.add_node("c", attrs());
  net.add_node("d", attrs(1.0, 8, true));
  for (NodeId k = 0; k + 1 < 5; ++k) net.add_link(k, k + 1);
  Model m = make_model(std::move(net), 1);
  const auto f = add_flow(m, "f", 0, 4, 1.0, {0}, 0.99999);
  bind_on(m, f, {1}, 0.99);
  std::vector<InstanceIndex> bk;
  for (NodeId h : {2u, 3u}) bk.push_back(backup(m, "b" + std::to_string(h), 0, h, 0.999));
  Pipeline p(m);
  const auto mask = p.assigner.exclusion_mask(f);
  for (NodeId n : p.profile.correlated(1)) EXPECT_TRUE(mask[n]);
  EXPECT_TRUE(mask[1]);
  const auto c = p.assigner.candidate_instances(f);
  if (const auto* sets = std::get_if<CandidateSets>(&c)) {
    for (auto v : (*sets)[0]) EXPECT_FALSE(mask[m.instances[v].host]);
  } else {
    EXPECT_EQ(std::get<Rejection>(c).reason, RejectReason::kNoCandidates);
  }
  EXPECT_FALSE(p.profile.correlated(1).empty());
}

TEST(Candidates, EmptyTypeRejected) {
  Model m = mesh_model(3);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0, 1}, 0.9999);
  bind_on(m, f, {2, 2}, 0.99);
  backup(m, "fw", 0, 3, 0.999);
  Pipeline p(m);
  EXPECT_EQ(std::get<Rejection>(p.assigner.candidate_instances(f)).reason, RejectReason::kNoCandidates);
  const auto out = p.assigner.assign_flow(f);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, RejectReason::kNoCandidates);
}

TEST(FeasibleSet, WalkthroughTrace) {
  Walkthrough fx;
  Pipeline p(fx.m);
  auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  const auto fs = std::get<FeasibleSet>(p.assigner.feasible_set(fx.f, sets));
  EXPECT_EQ(fx.avails(fs.sets[0]), (std::vector<double>{0.999, 0.998, 0.997, 0.995}));
  EXPECT_EQ(fx.avails(fs.sets[1]), (std::vector<double>{0.998, 0.996}));
  EXPECT_EQ(fs.chains_required, 1);
  EXPECT_TRUE(fs.committed.empty());
  const auto range = p.assigner.min_max_availability(fs.sets, fs.effective_primary);
  EXPECT_GE(range.min, 0.9999);
}

TEST(FeasibleSet, LowestDroppedFirst) {
  // only one drop needed: removing LB 0.9 lifts MIN to 0.99943 at req 0.9994
  Walkthrough fx;
  fx.m.flows[fx.f].avail_req = 0.9994;
  Pipeline p(fx.m);
  auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  const auto fs = std::get<FeasibleSet>(p.assigner.feasible_set(fx.f, sets));
  EXPECT_EQ(fx.avails(fs.sets[0]).size(), 5u);
  EXPECT_EQ(fx.avails(fs.sets[1]), (std::vector<double>{0.998, 0.996, 0.994, 0.95}));
}

TEST(FeasibleSet, UnchangedWhenMinSuffices) {
  Walkthrough fx;
  fx.m.flows[fx.f].avail_req = 0.995;
  Pipeline p(fx.m);
  auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  const auto fs = std::get<FeasibleSet>(p.assigner.feasible_set(fx.f, sets));
  EXPECT_EQ(fs.sets[0].size(), 5u);
  EXPECT_EQ(fs.sets[1].size(), 5u);
}

TEST(FeasibleSet, TwoChainsRequired) {
  // primary 0.99; each backup chain (0.99 * 0.999)^2 = 0.97814; one chain
  // reaches 0.9997814 < 0.99999, two reach 0.99999522
  Model m = mesh_model(6, 0.99);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0, 1}, 0.99999);
  const auto p0 = m.add_instance("p0", 0, 2, InstanceRole::kPrimary, 1.0);
  const auto p1 = m.add_instance("p1", 1, 2, InstanceRole::kPrimary, 1.0);
  m.bind_primary(f, {p0, p1}, {0, 2, 1});
  EXPECT_NEAR(m.flows[f].primary->avail, 0.99, 1e-15);
  for (NodeId k = 0; k < 2; ++k) {
    backup(m, "fw" + std::to_string(k), 0, 3 + k, 0.999);
    backup(m, "lb" + std::to_string(k), 1, 5 + k, 0.999);
  }
  Pipeline p(m);
  auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(f));
  const double single = p.assigner.min_max_availability(sets, 0.99).max;
  EXPECT_NEAR(single, 0.9997814, 1e-7);
  const auto fs = std::get<FeasibleSet>(p.assigner.feasible_set(f, sets));
  EXPECT_EQ(fs.chains_required, 2);
  ASSERT_EQ(fs.committed.size(), 1u);
  EXPECT_NEAR(fs.effective_primary, single, 1e-15);

  const auto out = p.assigner.assign_flow(f);
  ASSERT_TRUE(out.accepted);
  ASSERT_EQ(out.chains.size(), 2u);
  const double b = std::pow(0.99 * 0.999, 2);
  EXPECT_NEAR(out.achieved_avail, 1.0 - 0.01 * (1.0 - b) * (1.0 - b), 1e-12);
  EXPECT_GE(out.achieved_avail, 0.99999);
  std::set<InstanceIndex> used;
  for (const auto& c : out.chains) used.insert(c.instances.begin(), c.instances.end());
  EXPECT_EQ(used.size(), 4u);
}

TEST(FeasibleSet, LoneCandidateKept) {
  // the lone LB (0.96) is the lowest composite, but every chain needs it;
  // dropping FW 0.97 instead gives MIN = MAX = 0.9995904 >= 0.9995
  Model m = mesh_model(4);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0, 1}, 0.9995);
  const auto p0 = m.add_instance("p0", 0, 2, InstanceRole::kPrimary, 0.99);
  const auto p1 = m.add_instance("p1", 1, 2, InstanceRole::kPrimary, 1.0);
  m.bind_primary(f, {p0, p1}, {0, 2, 1});
  const auto fw_hi = backup(m, "fw0", 0, 3, 0.999);
  backup(m, "fw1", 0, 4, 0.97);
  const auto lb = backup(m, "lb0", 1, 5, 0.96);
  Pipeline p(m);
  auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(f));
  const auto fs = std::get<FeasibleSet>(p.assigner.feasible_set(f, sets));
  EXPECT_EQ(fs.sets[0], (std::vector<InstanceIndex>{fw_hi}));
  EXPECT_EQ(fs.sets[1], (std::vector<InstanceIndex>{lb}));
  EXPECT_NEAR(p.assigner.min_max_availability(fs.sets, fs.effective_primary).min, 0.9995904, 1e-12);
}

TEST(FeasibleSet, InsufficientCandidates) {
  Model m = mesh_model(4, 0.99);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0}, 0.9999999);
  bind_on(m, f, {2}, 0.9);
  backup(m, "a", 0, 3, 0.99);
  Pipeline p(m);
  auto out = p.assigner.assign_flow(f);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, RejectReason::kInsufficientCandidates);
  EXPECT_TRUE(m.instances[m.find_instance("a").value()].ledger.empty());
}

TEST(Enumerate, CountsAndTruncation) {
  Walkthrough fx;
  Pipeline p(fx.m);
  const auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  const auto all = std::get<ChainEnumeration>(p.assigner.enumerate_chains(fx.f, sets));
  EXPECT_EQ(all.chains.size(), 25u);
  EXPECT_EQ(all.examined, 25u);
  EXPECT_FALSE(all.truncated);
  const CandidateSets ones{{sets[0][0]}, {sets[1][0]}};
  EXPECT_EQ(std::get<ChainEnumeration>(p.assigner.enumerate_chains(fx.f, ones)).chains.size(), 1u);

  AssignmentOptions capped;
  capped.max_compositions = 7;
  Pipeline q(fx.m, capped);
  const auto cut = std::get<ChainEnumeration>(q.assigner.enumerate_chains(fx.f, sets));
  EXPECT_EQ(cut.chains.size(), 7u);
  EXPECT_TRUE(cut.truncated);
  // lexicographic prefix
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(cut.chains[k], all.chains[k]);
}

TEST(Enumerate, HopBudgetZeroIsNoPath) {
  Walkthrough fx;
  AssignmentOptions opt;
  opt.hop_budget = 0;
  Pipeline p(fx.m, opt);
  const auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  EXPECT_EQ(std::get<Rejection>(p.assigner.enumerate_chains(fx.f, sets)).reason, RejectReason::kNoPath);
  const auto out = p.assigner.assign_flow(fx.f);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, RejectReason::kNoPath);
  for (const auto& inst : fx.m.instances) {
    if (inst.role == InstanceRole::kBackup) EXPECT_TRUE(inst.ledger.empty());
  }
}

TEST(Enumerate, HopBudgetMatchesStagePaths) {
  // in a full mesh every stage path s -> x -> y -> d costs 3 hops when x, y
  // are on distinct hosts and 2 when co-hosted
  Walkthrough fx;
  AssignmentOptions opt;
  opt.hop_budget = 3;
  Pipeline p(fx.m, opt);
  const auto sets = std::get<CandidateSets>(p.assigner.candidate_instances(fx.f));
  EXPECT_EQ(std::get<ChainEnumeration>(p.assigner.enumerate_chains(fx.f, sets)).chains.size(), 25u);
  const auto paths = k_shortest_stage_paths(fx.m, hop_matrix(fx.m.net), 0, 1, sets, 3);
  ASSERT_EQ(paths.size(), 3u);
  for (const auto& sp : paths) EXPECT_EQ(sp.hops, 3);
  EXPECT_LT(paths[0].instances, paths[1].instances);
}

TEST(Weights, InstanceWeightBranches) {
  Model m = mesh_model(5, 1.0, ReservationMode::kShared);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0, 1}, 0.9999);
  bind_on(m, f, {2, 2});
  const auto f1 = add_flow(m, "f1", 0, 1, 2.0, {0, 1}, 0.9999);
  bind_on(m, f1, {3, 3});  // disjoint from f
  const auto f2 = add_flow(m, "f2", 0, 1, 2.0, {0, 1}, 0.9999);
  bind_on(m, f2, {2, 2});  // shares f's hosts
  const auto indep_v = backup(m, "u", 0, 4, 0.999);
  const auto dep_v = backup(m, "w", 0, 5, 0.999);
  const auto empty_v = backup(m, "e", 0, 6, 0.999);
  Pipeline p(m);
  ASSERT_TRUE(m.instances[indep_v].ledger.reserve(f1, 2.0, p.indep.fn()));
  ASSERT_TRUE(m.instances[dep_v].ledger.reserve(f2, 2.0, p.indep.fn()));
  EXPECT_EQ(p.assigner.instance_weight(f, indep_v), 2.0);
  EXPECT_NEAR(p.assigner.instance_weight(f, dep_v), 0.2, 1e-12);
  EXPECT_EQ(p.assigner.instance_weight(f, empty_v), 0.0);
  const std::vector<InstanceIndex> r{indep_v, dep_v};
  EXPECT_NEAR(p.assigner.chain_weight(f, r), 2.2, 1e-12);
  const std::vector<InstanceIndex> zero{empty_v};
  EXPECT_EQ(p.assigner.chain_weight(f, zero), 0.0);
}

TEST(Weights, DedicatedNeverShares) {
  Model m = mesh_model(4);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0}, 0.9999);
  bind_on(m, f, {2});
  const auto f1 = add_flow(m, "f1", 0, 1, 2.0, {0}, 0.9999);
  bind_on(m, f1, {3});
  const auto v = backup(m, "u", 0, 4, 0.999);
  Pipeline p(m);
  m.instances[v].ledger.reserve(f1, 2.0, p.indep.fn());
  EXPECT_NEAR(p.assigner.instance_weight(f, v), 0.2, 1e-12);
}

TEST(Weights, SumExample) {
  // r = [2, 0.5] beats r' = [0.9, 0.9]
  EXPECT_GT(2.0 + 0.5, 0.9 + 0.9);
  EXPECT_EQ(2.0 + 0.5, 2.5);
}

TEST(Assign, WalkthroughPicksLexicographicOnTie) {
  Walkthrough fx;
  Pipeline p(fx.m);
  const auto out = p.assigner.assign_flow(fx.f);
  ASSERT_TRUE(out.accepted);
  ASSERT_EQ(out.chains.size(), 1u);
  EXPECT_EQ(fx.m.instances[out.chains[0].instances[0]].id, "fw0");
  EXPECT_EQ(fx.m.instances[out.chains[0].instances[1]].id, "lb0");
  EXPECT_NEAR(out.achieved_avail, 1.0 - 0.01 * (1.0 - 0.999 * 0.998), 1e-12);
  EXPECT_EQ(out.compositions_examined, 8u);
  EXPECT_TRUE(fx.m.instances[out.chains[0].instances[0]].ledger.contains(fx.f));
}

TEST(Assign, PrefersShareableInstance) {
  Model m = mesh_model(5, 1.0, ReservationMode::kShared);
  const auto f1 = add_flow(m, "f1", 0, 1, 1.0, {0}, 0.9999);
  bind_on(m, f1, {2}, 0.99);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0}, 0.9999);
  bind_on(m, f, {3}, 0.99);
  const auto plain = backup(m, "a", 0, 4, 0.999);
  const auto shared = backup(m, "b", 0, 5, 0.999);
  Pipeline p(m);
  m.instances[shared].ledger.reserve(f1, 1.0, p.indep.fn());
  const auto out = p.assigner.assign_flow(f);
  ASSERT_TRUE(out.accepted);
  EXPECT_EQ(out.chains[0].instances, (std::vector<InstanceIndex>{shared}));
  EXPECT_EQ(m.instances[shared].ledger.groups().size(), 1u);
  EXPECT_TRUE(m.instances[plain].ledger.empty());
}

TEST(Assign, PrimaryAloneAccepted) {
  Model m = mesh_model(3);
  const auto f = add_flow(m, "f", 0, 1, 1.0, {0}, 0.9);
  bind_on(m, f, {2}, 0.99);
  Pipeline p(m);
  const auto out = p.assigner.assign_flow(f);
  EXPECT_TRUE(out.accepted);
  EXPECT_TRUE(out.chains.empty());
  EXPECT_EQ(out.achieved_avail, 0.99);
}

TEST(Assign, OrderPolicies) {
  Model m = mesh_model(3);
  add_flow(m, "a", 0, 1, 1.0, {0}, 0.999);
  add_flow(m, "b", 0, 1, 1.0, {0, 1}, 0.99999);
  add_flow(m, "c", 0, 1, 1.0, {1}, 0.9999);
  EXPECT_EQ(order_flows(m, OrderPolicy::kInput), (std::vector<FlowIndex>{0, 1, 2}));
  EXPECT_EQ(order_flows(m, OrderPolicy::kChainLengthDesc), (std::vector<FlowIndex>{1, 0, 2}));
  EXPECT_EQ(order_flows(m, OrderPolicy::kChainLengthAsc), (std::vector<FlowIndex>{0, 2, 1}));
  EXPECT_EQ(order_flows(m, OrderPolicy::kAvailDesc), (std::vector<FlowIndex>{1, 2, 0}));
  EXPECT_EQ(order_flows(m, OrderPolicy::kAvailAsc), (std::vector<FlowIndex>{0, 2, 1}));
  Model empty = mesh_model(2);
  Pipeline p(empty);
  EXPECT_TRUE(p.assigner.run_assignment(OrderPolicy::kChainLengthDesc).empty());
  EXPECT_THROW(parse_order_policy("sideways"), ConfigError);
}

// A chain with at least one instance taking the sharing
// branch outweighs any chain with none, as long as every instance can admit f.
TEST(ShareableWeight, ShareableChainWins) {
  Stream rng(83, "shareable-pair");
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = shareable_pair_trial(rng);
    ASSERT_TRUE(t.setup_ok) << "trial " << trial << ": " << t.problem;
    ASSERT_GT(t.w_share, t.w_none) << "trial " << trial;
  }
}

// Random end-to-end runs: accepted flows meet their requirement (recomputed
// independently from node and instance availabilities), ledgers stay within
// capacity and groups independent, rejected flows hold no reservation.
TEST(AssignProperty, AcceptedMeetsRequirement) {
  Stream rng(89, "assign-property");
  for (int trial = 0; trial < 60; ++trial) {
    const auto mode = trial % 2 ? ReservationMode::kShared : ReservationMode::kDedicated;
    Model m = mesh_model(8, 1.0, mode);
    for (NodeId n = 2; n < m.net.size(); ++n) {
      auto a = m.net.attrs(n);
      a.avail = rng.uniform(0.99, 0.999);
      m.net.set_attrs(n, a);
    }
    const int flows = static_cast<int>(rng.integer(1, 8));
    for (int k = 0; k < flows; ++k) {
      const auto len = static_cast<std::size_t>(rng.integer(1, 2));
      std::vector<TypeIndex> chain{0, 1};
      chain.resize(len);
      const double req = std::vector<double>{0.999, 0.9999, 0.99999}[rng.integer(0, 2)];
      const auto f = add_flow(m, "f" + std::to_string(k), 0, 1, rng.uniform(0.5, 4.0), chain, req);
      std::vector<NodeId> hosts;
      for (std::size_t g = 0; g < len; ++g) hosts.push_back(static_cast<NodeId>(rng.integer(2, 4)));
      bind_on(m, f, hosts, 0.999);
    }
    for (int k = 0; k < 8; ++k) {
      backup(m, "b" + std::to_string(k), static_cast<TypeIndex>(k % 2),
             static_cast<NodeId>(rng.integer(5, 9)), rng.uniform(0.999, 0.9999));
    }
    Pipeline p(m);
    const auto outcomes = p.assigner.run_assignment(OrderPolicy::kChainLengthDesc);
    ASSERT_EQ(outcomes.size(), static_cast<std::size_t>(flows));
    for (const auto& o : outcomes) {
      const auto& flow = m.flows[o.flow];
      if (!o.accepted) {
        for (const auto& inst : m.instances) {
          if (inst.role == InstanceRole::kBackup) ASSERT_FALSE(inst.ledger.contains(o.flow));
        }
        continue;
      }
      double down = 1.0 - flow.primary->avail;
      for (const auto& c : o.chains) {
        double a = 1.0;
        std::set<NodeId> hosts;
        for (auto v : c.instances) {
          a *= m.instances[v].avail;
          hosts.insert(m.instances[v].host);
          ASSERT_TRUE(m.instances[v].ledger.contains(o.flow));
        }
        for (NodeId h : hosts) a *= m.net.avail(h);
        down *= 1.0 - a;
      }
      ASSERT_NEAR(o.achieved_avail, 1.0 - down, 1e-12);
      ASSERT_GE(o.achieved_avail, flow.avail_req);
    }
    for (const auto& inst : m.instances) {
      ASSERT_TRUE(inst.ledger.within_capacity());
      ASSERT_TRUE(inst.ledger.groups_independent(p.indep.fn()));
    }
  }
}

TEST(AssignProperty, Deterministic) {
  auto run = [] {
    Walkthrough fx;
    add_flow(fx.m, "g", 0, 1, 3.0, {0, 1}, 0.9999);
    bind_on(fx.m, 1, {2, 3}, 0.995);
    Pipeline p(fx.m);
    std::vector<std::vector<InstanceIndex>> picked;
    for (const auto& o : p.assigner.run_assignment(OrderPolicy::kChainLengthDesc)) {
      for (const auto& c : o.chains) picked.push_back(c.instances);
    }
    return picked;
  };
  EXPECT_EQ(run(), run());
}
