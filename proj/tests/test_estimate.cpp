#include <gtest/gtest.h>

#include <cmath>

#include "coshare/estimate.hpp"
#include "support.hpp"

using namespace coshare;
using namespace coshare::testing;

namespace {

// Direct scan of the chain-count inequality.
std::optional<int> scan(double req, double wp, double wn, double wi, int g, int x_max) {
  if (wp >= req) return 0;
  const double a = std::pow(wn * wi, g);
  for (int x = 1; x <= x_max; ++x) {
    if (1.0 - (1.0 - wp) * std::pow(1.0 - a, x) >= req) return x;
  }
  return std::nullopt;
}

}  // namespace

TEST(ChainsNeeded, WorkedExample) {
  // A~ = (0.99 * 0.999)^2; x = 1 gives 0.99978, x = 2 gives 0.9999952
  EXPECT_EQ(chains_needed(0.99999, 0.99, 0.99, 0.999, 2), 2);
}

TEST(ChainsNeeded, PrimarySuffices) { EXPECT_EQ(chains_needed(0.999, 0.9999, 0.99, 0.999, 2), 0); }

TEST(ChainsNeeded, InfeasibleWithinCap) {
  EXPECT_FALSE(chains_needed(0.9999999999, 0.5, 0.5, 0.5, 4, 3).has_value());
}

TEST(InstancesNeeded, CeilOfLoad) {
  std::vector<FlowSpec> flows(3);
  for (auto& f : flows) {
    f.rate = 0.5e6;
    f.chain = {0};
  }
  EXPECT_EQ(instances_needed(flows, 0, 10e6, 2), 2);
  EXPECT_EQ(instances_needed(flows, 0, 10e6, 0), 0);
  EXPECT_EQ(instances_needed(flows, 1, 10e6, 2), 0);
}

TEST(InstancesNeeded, ExactMultipleDoesNotRoundUp) {
  // 0.1 + 0.2 style accumulation must not push 20 * 0.5 just above 10
  std::vector<FlowSpec> flows(20);
  for (auto& f : flows) {
    f.rate = 0.5e6;
    f.chain = {0};
  }
  EXPECT_EQ(instances_needed(flows, 0, 10e6, 1), 1);
  std::vector<FlowSpec> tenths(30);
  for (auto& f : tenths) {
    f.rate = 0.1;
    f.chain = {0};
  }
  EXPECT_EQ(instances_needed(tenths, 0, 3.0, 1), 1);
}

TEST(ChainsNeededProperty, MatchesScanAndMonotone) {
  Stream rng(61, "chains-needed");
  for (int trial = 0; trial < 5000; ++trial) {
    const double req = 1.0 - std::pow(10.0, -rng.uniform(1.0, 6.0));
    const double wp = rng.uniform(0.9, 0.99999);
    const double wn = rng.uniform(0.95, 1.0);
    const double wi = rng.uniform(0.95, 1.0);
    const int g = static_cast<int>(rng.integer(1, 4));
    const auto got = chains_needed(req, wp, wn, wi, g, 10);
    ASSERT_EQ(got, scan(req, wp, wn, wi, g, 10));
    const auto harder = chains_needed(std::min(req + 1e-6, 0.9999999), wp, wn, wi, g, 10);
    if (got && harder) ASSERT_GE(*harder, *got);
    if (got) {
      const auto better = chains_needed(req, wp, std::min(1.0, wn + 0.001), wi, g, 10);
      ASSERT_TRUE(better.has_value());
      ASSERT_LE(*better, *got);
    }
  }
}

TEST(EstimateDemand, PerClassAndTotals) {
  Network net = full_mesh(4);
  for (NodeId n = 0; n < 4; ++n) {
    auto a = net.attrs(n);
    a.avail = 0.99;
    a.end = n >= 2;
    net.set_attrs(n, a);
  }
  Model m = make_model(std::move(net), 2, 10e6, 0.999);
  for (int k = 0; k < 3; ++k) {
    const auto f = add_flow(m, "a" + std::to_string(k), 2, 3, 0.5e6, {0, 1}, 0.99999);
    m.flows[f].avail_class = 1;
    bind_on(m, f, {0, 1}, 0.999);
  }
  const auto f = add_flow(m, "b", 2, 3, 0.5e6, {1}, 0.9);
  m.flows[f].avail_class = 0;
  bind_on(m, f, {0}, 0.999);
  EstimateInputs in;
  in.class_requirements = {0.9, 0.99999};
  in.backup_nodes = {0, 1};
  const auto d = estimate_demand(m, in);
  ASSERT_EQ(d.classes.size(), 2u);
  EXPECT_EQ(d.h(0), 0);
  // worst primary 0.97814: two chains leave 1.05e-5 downtime, so three
  const int h = *scan(0.99999, 0.999 * 0.999 * 0.99 * 0.99, 0.99, 0.999, 2, 10);
  EXPECT_EQ(h, 3);
  EXPECT_EQ(d.h(1), h);
  EXPECT_EQ(d.count(0, 1), h);
  EXPECT_EQ(d.count(1, 1), h);
  EXPECT_EQ(d.count(1, 0), 0);
  EXPECT_EQ(d.z_total, (std::vector<int>{h, h}));
  EXPECT_EQ(d.total(), 2 * h);
  EXPECT_NEAR(d.classes[1].worst_primary, 0.999 * 0.999 * 0.99 * 0.99, 1e-12);
}
