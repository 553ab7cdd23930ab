#include <gtest/gtest.h>

#include <algorithm>

#include "coshare/error.hpp"
#include "coshare/oracle.hpp"
#include "coshare/structure.hpp"
#include "support.hpp"

using namespace coshare;
using namespace coshare::testing;

namespace {

bool has(const std::vector<NodeId>& v, NodeId x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Hand evaluation of the path and node dependency on a 4-node path a-b-c-d
// (indices 0..3). Expected DI(i|n) listed row by row.
constexpr double kPathDi[4][4] = {
    // n:  a    b    c    d
    {0.0, 1.0, 0.5, 0.0},  // i = a
    {0.0, 0.0, 0.5, 0.0},  // i = b: remove c -> d lost (1), a kept (0)
    {0.0, 0.5, 0.0, 0.0},  // i = c
    {0.0, 0.5, 1.0, 0.0},  // i = d
};

}  // namespace

TEST(PathDependency, PathGraphDisconnection) {
  const auto net = path_graph(4);
  EXPECT_EQ(path_dependency(net, 0, 2, 1), 1.0);
}

TEST(PathDependency, CycleDetourCosts) {
  // a-b-c-d-a: removing b leaves a-d-c at the same length 2
  EXPECT_EQ(path_dependency(cycle_graph(4), 0, 2, 1), 0.0);
  EXPECT_EQ(path_dependency(cycle_graph(4), 0, 1, 3), 0.0);
  // 5-cycle, a -> c without b: 2 hops become 3
  EXPECT_NEAR(path_dependency(cycle_graph(5), 0, 2, 1), 1.0 / 2 - 1.0 / 3, 1e-15);
}

TEST(PathDependency, MeshIsZero) {
  const auto net = full_mesh(5);
  for (NodeId i = 0; i < 5; ++i) {
    for (NodeId j = 0; j < 5; ++j) {
      for (NodeId n = 0; n < 5; ++n) {
        if (i != j && j != n && i != n) EXPECT_EQ(path_dependency(net, i, j, n), 0.0);
      }
    }
  }
}

TEST(PathDependency, RequiresDistinctNodes) {
  const auto net = path_graph(4);
  EXPECT_THROW(path_dependency(net, 0, 0, 1), ValidationError);
  EXPECT_THROW(path_dependency(net, 0, 1, 1), ValidationError);
}

TEST(NodeDependency, PathGraphHandValues) {
  const auto net = path_graph(4);
  for (NodeId i = 0; i < 4; ++i) {
    for (NodeId n = 0; n < 4; ++n) {
      if (i == n) continue;
      EXPECT_EQ(node_dependency(net, i, n), kPathDi[i][n]) << "i=" << i << " n=" << n;
    }
  }
}

TEST(NodeDependency, MeshAllZero) {
  const auto di = compute_di_table(full_mesh(6), 1);
  for (NodeId i = 0; i < 6; ++i) {
    for (NodeId n = 0; n < 6; ++n) EXPECT_EQ(di(i, n), 0.0);
  }
}

TEST(NodeDependency, NeedsThreeNodes) {
  EXPECT_THROW(node_dependency(path_graph(2), 0, 1), ValidationError);
  EXPECT_THROW(node_dependency(path_graph(4), 2, 2), ValidationError);
}

TEST(DiTable, MatchesNodeDependencyAndSkipsEndNodes) {
  auto net = path_graph(4);
  auto a = net.attrs(3);
  a.end = true;
  net.set_attrs(3, a);
  const auto di = compute_di_table(net, 2);
  for (NodeId i = 0; i < 4; ++i) {
    for (NodeId n = 0; n < 4; ++n) {
      if (i == n) continue;
      EXPECT_EQ(di(i, n), n == 3 ? 0.0 : kPathDi[i][n]);
    }
  }
}

TEST(DiTable, ThreadCountDoesNotChangeResult) {
  Stream rng(3, "di-threads");
  const auto net = random_connected(30, 30, rng);
  EXPECT_EQ(compute_di_table(net, 1), compute_di_table(net, 4));
}

TEST(CriticalSet, PathGraph) {
  const auto di = compute_di_table(path_graph(4), 1);
  // DI(a|c) is exactly 0.5 and the inequality is strict
  EXPECT_EQ(critical_set(di, 0, 0.5), (std::vector<NodeId>{1}));
  EXPECT_EQ(critical_set(di, 0, 0.99), (std::vector<NodeId>{1}));
  EXPECT_EQ(critical_set(di, 0, 0.4), (std::vector<NodeId>{1, 2}));
}

TEST(CriticalSet, MeshEmpty) {
  const auto di = compute_di_table(full_mesh(5), 1);
  for (double t : {0.01, 0.5, 0.9}) {
    for (NodeId n = 0; n < 5; ++n) EXPECT_TRUE(critical_set(di, n, t).empty());
  }
}

TEST(CorrelatedSet, StarReverseDirection) {
  const auto net = star_graph(3);
  const auto di = compute_di_table(net, 1);
  const auto bx = correlated_set(di, 1, 0.5);
  EXPECT_TRUE(has(bx, 0));
  const auto bh = correlated_set(di, 0, 0.5);
  EXPECT_EQ(bh, (std::vector<NodeId>{1, 2, 3}));
}

TEST(CorrelatedSet, MeshEmpty) {
  const auto di = compute_di_table(full_mesh(5), 1);
  for (NodeId n = 0; n < 5; ++n) EXPECT_TRUE(correlated_set(di, n, 0.5).empty());
}

TEST(CorrelatedSet, PathSecondLevel) {
  const auto di = compute_di_table(path_graph(4), 1);
  // C(d) = {c}; C(c) = {b} only once the threshold drops below DI(c|b) = 0.5
  EXPECT_EQ(correlated_set(di, 3, 0.5), (std::vector<NodeId>{2}));
  EXPECT_EQ(correlated_set(di, 3, 0.4), (std::vector<NodeId>{1, 2}));
}

TEST(CorrelatedSet, CascadeDepth) {
  // chain of critical memberships along a long path
  const auto di = compute_di_table(path_graph(8), 1);
  const auto two = correlated_set(di, 7, 0.3, 2);
  const auto deep = correlated_set(di, 7, 0.3, 6);
  EXPECT_TRUE(std::includes(deep.begin(), deep.end(), two.begin(), two.end()));
  EXPECT_FALSE(has(deep, 7));
}

TEST(DependencyProfile, ValidatesThreshold) {
  const auto di = compute_di_table(path_graph(4), 1);
  EXPECT_THROW(DependencyProfile(di, StructureOptions{0.0, 2}), ConfigError);
  EXPECT_THROW(DependencyProfile(di, StructureOptions{1.0, 2}), ConfigError);
  const DependencyProfile p(di, StructureOptions{0.5, 2});
  EXPECT_EQ(p.critical(0), critical_set(di, 0, 0.5));
  EXPECT_EQ(p.with_threshold(0.4).critical(0), critical_set(di, 0, 0.4));
  EXPECT_TRUE(p.is_correlated(3, 2));
}

TEST(IndependentDi, PathAndMesh) {
  const auto path = path_graph(4);
  EXPECT_EQ(independent_di_recompute(path), compute_di_table(path, 1));
  const auto mesh = full_mesh(5);
  const auto di = independent_di_recompute(mesh);
  for (NodeId i = 0; i < 5; ++i) {
    for (NodeId n = 0; n < 5; ++n) EXPECT_EQ(di(i, n), 0.0);
  }
}

// Bounds, threshold monotonicity, first-level memberships.
TEST(StructureProperty, InvariantsOnRandomGraphs) {
  Stream rng(29, "structure-property");
  for (int trial = 0; trial < 150; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(3, 10));
    const auto net = random_connected(n, static_cast<std::size_t>(rng.integer(0, 6)), rng);
    const auto di = compute_di_table(net, 1);
    const double t1 = rng.uniform(0.05, 0.9);
    const double t2 = rng.uniform(t1, 0.95);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId m = 0; m < n; ++m) {
        ASSERT_GE(di(i, m), 0.0);
        ASSERT_LE(di(i, m), 1.0);
      }
      // isolating i by removing its only neighbour gives DI = 1
      if (net.neighbors(i).size() == 1) ASSERT_EQ(di(i, net.neighbors(i)[0]), 1.0);
    }
    for (NodeId m = 0; m < n; ++m) {
      const auto c1 = critical_set(di, m, t1);
      const auto c2 = critical_set(di, m, t2);
      ASSERT_TRUE(std::includes(c1.begin(), c1.end(), c2.begin(), c2.end()));
      const auto b = correlated_set(di, m, t1);
      ASSERT_TRUE(std::includes(b.begin(), b.end(), c1.begin(), c1.end()));
      ASSERT_FALSE(has(b, m));
      for (NodeId i = 0; i < n; ++i) {
        if (i != m && has(critical_set(di, i, t1), m)) ASSERT_TRUE(has(b, i));
      }
      for (NodeId i : c1) ASSERT_EQ(di(m, i) > t1, true);
    }
  }
}
