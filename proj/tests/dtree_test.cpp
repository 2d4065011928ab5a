#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace rideshare;

TEST(TimeWindows, Passenger) {
  Passenger p;
  p.departure = 10;
  p.max_wait = 5;
  p.max_excess = 4;
  const auto w = time_windows(p, 20);
  EXPECT_DOUBLE_EQ(w.pickup.earliest, 10);
  EXPECT_DOUBLE_EQ(w.pickup.latest, 15);
  EXPECT_DOUBLE_EQ(w.dropoff.earliest, 30);
  EXPECT_DOUBLE_EQ(w.dropoff.latest, 39);
}

TEST(TimeWindows, Degenerate) {
  Passenger p;
  p.departure = 7;
  p.max_wait = 0;
  p.max_excess = 0;
  const auto w = time_windows(p, 12);
  EXPECT_DOUBLE_EQ(w.pickup.earliest, 7);
  EXPECT_DOUBLE_EQ(w.pickup.latest, 7);
  EXPECT_DOUBLE_EQ(w.dropoff.earliest, 19);
  EXPECT_DOUBLE_EQ(w.dropoff.latest, 19);
}

TEST(TimeWindows, DriverDestination) {
  Driver d;
  d.departure = 100;
  d.max_excess = 6;
  const auto w = time_windows(d, 15);
  EXPECT_DOUBLE_EQ(w.earliest, 115);
  EXPECT_DOUBLE_EQ(w.latest, 121);
}

namespace {

struct Fixture {
  Instance inst;
  PDNetwork pd;
  RoutingContext ctx;
  explicit Fixture(Instance i) : inst(std::move(i)), pd(build_pd_network(inst)), ctx(inst, pd) {}
};

// Driver 0 -> 10 on the x axis at 60 km/h (1 km per minute).
// r1: 2 -> 8, Delta 3, Omega 9. r2: 5 -> 7, Delta 12, Omega 12.
Instance walkthrough() {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 8.0, 2);
  b.passenger({2, 0}, {8, 0}, 3.0, 9.0);
  b.passenger({5, 0}, {7, 0}, 12.0, 12.0);
  return b.build();
}

}  // namespace

TEST(DynamicTree, NewTreeIsTheDirectTrip) {
  testkit::Builder b;
  b.driver({0, 0}, {9, 12}, 5.0, 1, 100.0);
  Fixture f(b.build());
  const auto t = DynamicTree::for_driver(f.ctx, 0);
  EXPECT_EQ(t.node_count(), 2u);
  EXPECT_EQ(t.schedule_count(), 1u);
  const auto s = t.best_schedule();
  ASSERT_TRUE(s);
  ASSERT_EQ(s->stops.size(), 2u);
  EXPECT_DOUBLE_EQ(s->stops[0].arrival, 100.0);
  EXPECT_DOUBLE_EQ(s->stops[1].arrival, 115.0);
  EXPECT_DOUBLE_EQ(s->driver_excess, 0.0);
  EXPECT_EQ(s->stops[0].load, 0);
}

TEST(DynamicTree, ZeroDetourInsertion) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 0.0);
  b.passenger({2, 0}, {6, 0}, 2.0, 2.0);
  Fixture f(b.build());
  const auto res = DynamicTree::for_driver(f.ctx, 0).insert_request(0);
  ASSERT_TRUE(res);
  const auto s = res.tree->best_schedule();
  ASSERT_TRUE(s);
  EXPECT_EQ(testkit::stop_nodes(*s), (std::vector<PdIndex>{0, 2, 3, 1}));
  EXPECT_DOUBLE_EQ(s->driver_excess, 0.0);
  EXPECT_DOUBLE_EQ(s->distance, 10.0);
  ASSERT_EQ(s->passengers.size(), 1u);
  EXPECT_DOUBLE_EQ(s->passengers[0].wait, 2.0);
  EXPECT_DOUBLE_EQ(s->passengers[0].excess, 2.0);
}

TEST(DynamicTree, ZeroWaitPickupAwayIsTimeInfeasible) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 20.0);
  b.passenger({1, 0}, {5, 0}, 20.0, 0.0);
  Fixture f(b.build());
  const auto res = DynamicTree::for_driver(f.ctx, 0).insert_request(0);
  EXPECT_FALSE(res);
  EXPECT_EQ(res.cause, Infeasibility::TimeWindow);
}

TEST(DynamicTree, PassengerLargerThanCarIsCapacityInfeasible) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 20.0, 2);
  b.passenger({1, 0}, {5, 0}, 20.0, 20.0, 0.0, 3);
  Fixture f(b.build());
  const auto res = DynamicTree::for_driver(f.ctx, 0).insert_request(0);
  EXPECT_FALSE(res);
  EXPECT_EQ(res.cause, Infeasibility::Capacity);
}

TEST(DynamicTree, WalkthroughKeepsThreeSchedules) {
  Fixture f(walkthrough());
  const auto t0 = DynamicTree::for_driver(f.ctx, 0);
  const auto r1 = t0.insert_request(0);
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1.tree->schedule_count(), 1u);
  const auto r2 = r1.tree->insert_request(1);
  ASSERT_TRUE(r2);
  const DynamicTree& t = *r2.tree;

  // Nothing survives with o_2 ahead of o_1: r1 would miss its deadline.
  std::vector<std::vector<PdIndex>> paths;
  t.for_each_schedule([&](const std::vector<const TreeNode*>& path) {
    std::vector<PdIndex> p;
    for (const auto* n : path) p.push_back(n->stop);
    paths.push_back(p);
  });
  const PdIndex ov = 0, dv = 1, o1 = 2, d1 = 3, o2 = 4, d2 = 5;
  std::sort(paths.begin(), paths.end());
  const std::vector<std::vector<PdIndex>> expect{
      {ov, o1, d1, o2, d2, dv}, {ov, o1, o2, d1, d2, dv}, {ov, o1, o2, d2, d1, dv}};
  EXPECT_EQ(paths, expect);
  EXPECT_EQ(t.schedule_count(), 3u);
  EXPECT_EQ(t.root().children.size(), 1u);
  EXPECT_EQ(t.node_count(), 13u);

  const auto best = t.best_schedule();
  ASSERT_TRUE(best);
  EXPECT_EQ(testkit::stop_nodes(*best), (std::vector<PdIndex>{ov, o1, o2, d2, d1, dv}));
  EXPECT_DOUBLE_EQ(best->distance, 10.0);

  // Inputs are untouched.
  EXPECT_EQ(t0.node_count(), 2u);
  EXPECT_EQ(r1.tree->node_count(), 4u);

  const auto dump = t.dump();
  EXPECT_EQ(dump["stop"], ov);
  EXPECT_EQ(dump["children"][0]["stop"], o1);
  EXPECT_EQ(dump["children"][0]["t"], 2.0);
  EXPECT_EQ(dump["children"][0]["Q"], 1);
}

TEST(DynamicTree, AdvanceRoot) {
  Fixture f(walkthrough());
  const auto t = *DynamicTree::for_driver(f.ctx, 0).insert_request(0).tree->insert_request(1).tree;
  EXPECT_THROW(t.advance_root(4), UnknownStop);
  const auto a = t.advance_root(2);
  EXPECT_EQ(a.root().stop, 2u);
  EXPECT_EQ(a.schedule_count(), 3u);
  const auto b = a.advance_root(4);
  EXPECT_EQ(b.root().stop, 4u);
  EXPECT_DOUBLE_EQ(b.root().arrival, 5.0);
  EXPECT_EQ(b.schedule_count(), 2u);

  const auto best = t.best_schedule();
  DynamicTree walk = t;
  for (std::size_t k = 1; k < best->stops.size(); ++k) walk = walk.advance_root(best->stops[k].node);
  EXPECT_EQ(walk.root().stop, 1u);
  EXPECT_EQ(walk.node_count(), 1u);

  testkit::Builder bb;
  bb.driver({0, 0}, {1, 0}, 0.0);
  Fixture g(bb.build());
  const auto direct = DynamicTree::for_driver(g.ctx, 0).advance_root(1);
  EXPECT_EQ(direct.node_count(), 1u);
}

TEST(DynamicTree, TiesGoToTheSmallestStopSequence) {
  // Two identical requests on the driver's line; both orders cost the same.
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 0.0, 2);
  b.passenger({2, 0}, {8, 0}, 5.0, 5.0);
  b.passenger({2, 0}, {8, 0}, 5.0, 5.0);
  Fixture f(b.build());
  const auto t = *DynamicTree::for_driver(f.ctx, 0).insert_request(1).tree->insert_request(0).tree;
  EXPECT_EQ(t.schedule_count(), 4u);
  const auto s = t.best_schedule();
  EXPECT_EQ(testkit::stop_nodes(*s), (std::vector<PdIndex>{0, 2, 4, 3, 5, 1}));
}

namespace {

std::size_t orders_bound(std::size_t m) {
  double v = 1.0;
  for (std::size_t k = 1; k <= 2 * m; ++k) v *= static_cast<double>(k);
  return static_cast<std::size_t>(v / std::pow(2.0, static_cast<double>(m)));
}

// Rechecks one tree path against the model definitions.
void expect_path_valid(const Fixture& f, const std::vector<const TreeNode*>& path, std::size_t driver) {
  const Driver& v = f.inst.drivers[driver];
  ASSERT_EQ(path.front()->stop, f.pd.driver_origin(driver));
  ASSERT_EQ(path.back()->stop, f.pd.driver_destination(driver));
  EXPECT_DOUBLE_EQ(path.front()->arrival, v.departure);
  EXPECT_EQ(path.front()->load, 0);
  std::vector<double> picked(f.inst.passengers.size(), -1.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const PdNode& n = f.pd.node(path[k]->stop);
    EXPECT_DOUBLE_EQ(path[k]->arrival, path[k - 1]->arrival + f.pd.time(path[k - 1]->stop, path[k]->stop));
    int q = 0;
    if (n.kind == StopKind::Pickup) q = f.inst.passengers[n.owner].party;
    if (n.kind == StopKind::Dropoff) q = -f.inst.passengers[n.owner].party;
    EXPECT_EQ(path[k]->load, path[k - 1]->load + q);
    EXPECT_GE(path[k]->load, std::max(0, q));
    EXPECT_LE(path[k]->load, std::min(v.capacity, v.capacity + q));
    if (n.kind == StopKind::Pickup) {
      const auto& r = f.inst.passengers[n.owner];
      EXPECT_GE(path[k]->arrival, r.departure - 1e-9);
      EXPECT_LE(path[k]->arrival, r.departure + r.max_wait + 1e-9);
      picked[n.owner] = path[k]->arrival;
    }
    if (n.kind == StopKind::Dropoff) {
      const auto& r = f.inst.passengers[n.owner];
      EXPECT_GE(picked[n.owner], 0.0) << "drop-off before pickup";
      EXPECT_LE(path[k]->arrival - r.departure - f.pd.passenger_direct(n.owner).time, r.max_excess + 1e-9);
    }
  }
  EXPECT_LE(path.back()->arrival - v.departure - f.pd.driver_direct(driver).time, v.max_excess + 1e-9);
}

}  // namespace

// One driver, 2-4 requests: the tree's best schedule is the exhaustive
// optimum, every path is valid, and the tree stays within the order bound.
TEST(DynamicTree, AgreesWithExhaustiveOrders) {
  std::size_t feasible_sets = 0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    GridScenarioParams p = seed % 2 ? grid_preset() : default_preset();
    p.seed = seed;
    p.drivers = 1;
    p.passengers = 2 + seed % 3;
    p.capacity = 1 + static_cast<int>(seed % 3);
    p.max_excess_min = 90.0;
    p.max_wait_min = 45.0;
    if (p.excess_pct) p.excess_pct = 300.0;
    Fixture f(generate_grid(p));
    std::vector<std::size_t> reqs(f.inst.passengers.size());
    std::iota(reqs.begin(), reqs.end(), 0);
    const auto ref = oracle::brute_force_vrp(f.inst, f.pd, 0, reqs);

    std::optional<DynamicTree> t = DynamicTree::for_driver(f.ctx, 0);
    std::size_t k = 0;
    for (; k < reqs.size(); ++k) {
      auto next = t->insert_request(reqs[k]);
      if (!next) break;
      t = std::move(next.tree);
      EXPECT_LE(t->schedule_count(), orders_bound(k + 1));
      t->for_each_schedule([&](const auto& path) { expect_path_valid(f, path, 0); });
    }
    const bool all_in = k == reqs.size();
    if (!all_in) {
      EXPECT_FALSE(ref.feasible) << "seed " << seed;
      continue;
    }
    ASSERT_TRUE(ref.feasible) << "seed " << seed;
    ++feasible_sets;
    const auto best = t->best_schedule();
    ASSERT_TRUE(best);
    EXPECT_NEAR(best->distance, ref.objective, 1e-9) << "seed " << seed;
    EXPECT_EQ(t->schedule_count(), ref.orders_feasible) << "seed " << seed;
  }
  EXPECT_GT(feasible_sets, 20u);
}

TEST(DynamicTree, InsertionOrderDoesNotChangeTheOptimum) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GridScenarioParams p = default_preset();
    p.seed = seed;
    p.drivers = 1;
    p.passengers = 3;
    p.capacity = 2;
    p.excess_pct = 80.0;
    Fixture f(generate_grid(p));
    std::vector<std::size_t> order{0, 1, 2};
    std::optional<double> first;
    bool first_feasible = false;
    bool seen = false;
    do {
      std::optional<DynamicTree> t = DynamicTree::for_driver(f.ctx, 0);
      for (std::size_t r : order) {
        if (!t) break;
        auto res = t->insert_request(r);
        t = res ? std::move(res.tree) : std::nullopt;
      }
      const bool feasible = t.has_value();
      if (!seen) {
        seen = true;
        first_feasible = feasible;
        if (feasible) first = t->best_schedule()->distance;
      } else {
        EXPECT_EQ(feasible, first_feasible) << "seed " << seed;
        if (feasible && first) EXPECT_NEAR(t->best_schedule()->distance, *first, 1e-9) << "seed " << seed;
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(DynamicTree, CapacityBlockedPickupRetriesAfterDropoff) {
  // Capacity 1: r2 can only ride after r1 leaves.
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 0.0, 1);
  b.passenger({1, 0}, {4, 0}, 5.0, 5.0);
  b.passenger({5, 0}, {9, 0}, 9.0, 9.0);
  Fixture f(b.build());
  const auto t = DynamicTree::for_driver(f.ctx, 0).insert_request(0).tree->insert_request(1);
  ASSERT_TRUE(t);
  EXPECT_EQ(t.tree->schedule_count(), 1u);
  EXPECT_EQ(testkit::stop_nodes(*t.tree->best_schedule()), (std::vector<PdIndex>{0, 2, 3, 4, 5, 1}));
}

TEST(DynamicTree, OverlappingRidesExceedOneSeat) {
  testkit::Builder b;
  b.driver({0, 0}, {10, 0}, 1.0, 1);
  b.passenger({1, 0}, {6, 0}, 1.0, 5.0);
  b.passenger({2, 0}, {7, 0}, 3.0, 5.0);
  Fixture f(b.build());
  EXPECT_FALSE(DynamicTree::for_driver(f.ctx, 0).insert_request(0).tree->insert_request(1));
}
