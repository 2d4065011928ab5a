#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace rideshare;

TEST(AccessibleRegion, EllipseMembership) {
  const AccessibleRegion r{{0, 0}, {6, 0}, 8.0};
  EXPECT_TRUE(r.contains({3, 0}));
  EXPECT_FALSE(r.contains({3, 4}));
  EXPECT_TRUE(r.contains({7, 0}));
  EXPECT_FALSE(r.contains({7.01, 0}));
}

TEST(AccessibleRegion, DegenerateEllipseIsTheSegment) {
  const AccessibleRegion r{{0, 0}, {6, 0}, 6.0};
  EXPECT_TRUE(r.contains({0, 0}));
  EXPECT_TRUE(r.contains({2.5, 0}));
  EXPECT_TRUE(r.contains({6, 0}));
  EXPECT_FALSE(r.contains({3, 0.01}));
  EXPECT_FALSE(r.contains({-0.01, 0}));
}

TEST(ReachablePickup, CircleMembership) {
  const ReachablePickupRegion c{{1, 1}, 5.0};
  EXPECT_TRUE(c.contains({4, 5}));
  EXPECT_FALSE(c.contains({4, 5.1}));
}

// Two drivers on parallel roads, one request near each: only the first
// driver can reach its request.
TEST(CandidateRequests, TwoDriverConfiguration) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 2.0);
  b.driver({0, 20}, {10, 20}, 2.0);
  b.passenger({3, 1}, {7, 1}, 3.0, 5.0);
  b.passenger({5, 8}, {6, 9}, 3.0, 5.0);
  const Instance inst = b.build();
  const PDNetwork pd = build_pd_network(inst);
  const EngineConfig cfg;
  EXPECT_EQ(candidate_requests(inst, pd, 0, cfg), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(candidate_requests(inst, pd, 1, cfg).empty());
  const std::vector<std::vector<std::size_t>> all{{0}, {}};
  EXPECT_DOUBLE_EQ(prune_strength(all, 2), 75.0);
}

TEST(CandidateRequests, SameTripIsKept) {
  testkit::Builder b;
  b.driver({0, 0}, {5, 5}, 1.0);
  b.passenger({0, 0}, {5, 5}, 1.0, 1.0);
  const Instance inst = b.build();
  const PDNetwork pd = build_pd_network(inst);
  EXPECT_EQ(candidate_requests(inst, pd, 0, EngineConfig{}).size(), 1u);
}

TEST(CandidateRequests, ZeroWaitAwayFromDriverIsDropped) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 5.0);
  b.passenger({1, 0}, {5, 0}, 5.0, 0.0);
  const Instance inst = b.build();
  const PDNetwork pd = build_pd_network(inst);
  EXPECT_TRUE(candidate_requests(inst, pd, 0, EngineConfig{}).empty());
  EngineConfig off;
  off.prune = false;
  EXPECT_EQ(candidate_requests(inst, pd, 0, off).size(), 1u);
}

TEST(PruneStrength, Arithmetic) {
  std::vector<std::vector<std::size_t>> one(1);
  for (std::size_t j = 0; j < 35; ++j) one[0].push_back(j);
  EXPECT_DOUBLE_EQ(prune_strength(one, 100), 65.0);
  EXPECT_DOUBLE_EQ(prune_strength({}, 100), 0.0);
}

// Every request a driver can serve alone survives pruning.
TEST(CandidateRequests, NeverDropsAServableRequest) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GridScenarioParams p = default_preset();
    p.seed = seed;
    p.drivers = 3;
    p.passengers = 12;
    p.excess_pct = 10.0 + 10.0 * static_cast<double>(seed % 20);
    p.departure_spread_min = static_cast<double>(seed % 3) * 5.0;
    const Instance inst = generate_grid(p);
    const PDNetwork pd = build_pd_network(inst);
    const EngineConfig cfg;
    for (std::size_t v = 0; v < inst.drivers.size(); ++v) {
      const auto cand = candidate_requests(inst, pd, v, cfg);
      for (std::size_t j = 0; j < inst.passengers.size(); ++j) {
        const auto ref = oracle::brute_force_vrp(inst, pd, v, {j});
        if (ref.feasible)
          EXPECT_TRUE(std::binary_search(cand.begin(), cand.end(), j)) << "seed " << seed << " v" << v << " r" << j;
      }
    }
  }
}

TEST(CandidateRequests, ShrinkingLimitsNeverAddsRequests) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GridScenarioParams p = default_preset();
    p.seed = seed;
    p.drivers = 4;
    p.passengers = 20;
    p.excess_pct = 100.0;
    const Instance wide = generate_grid(p);
    p.excess_pct = 40.0;
    const Instance narrow = generate_grid(p);
    const PDNetwork pw = build_pd_network(wide);
    const PDNetwork pn = build_pd_network(narrow);
    for (std::size_t v = 0; v < wide.drivers.size(); ++v) {
      const auto a = candidate_requests(wide, pw, v, EngineConfig{});
      const auto b = candidate_requests(narrow, pn, v, EngineConfig{});
      EXPECT_TRUE(std::includes(a.begin(), a.end(), b.begin(), b.end())) << "seed " << seed;
    }
  }
}

// Without coordinates the exact time checks stand in for the geometry.
TEST(CandidateRequests, GraphWithoutCoordinatesUsesTimeChecks) {
  auto net = std::make_shared<RoadNetwork>();
  for (int i = 0; i < 5; ++i) net->add_node(i);
  for (int i = 0; i < 4; ++i) {
    net->add_link(i, i + 1, 2.0, 2.0);
    net->add_link(i + 1, i, 2.0, 2.0);
  }
  Instance inst;
  inst.network = net;
  inst.drivers.push_back({"v1", 0, 4, 0.0, 2, 1.0});
  inst.passengers.push_back({"r1", 1, 3, 0.0, 1.0, 2.0, 1});  // on the way
  inst.passengers.push_back({"r2", 3, 1, 0.0, 1.0, 9.0, 1});  // backwards
  inst.passengers.push_back({"r3", 4, 4, 0.0, 1.0, 1.0, 1});  // pickup too late
  const PDNetwork pd = build_pd_network(inst);
  EXPECT_FALSE(pd.has_coordinates());
  EXPECT_EQ(candidate_requests(inst, pd, 0, EngineConfig{}), (std::vector<std::size_t>{0}));
}
