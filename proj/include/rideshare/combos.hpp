#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <memory>
#include <thread>
#include <vector>

#include "rideshare/dtree.hpp"
#include "rideshare/model.hpp"

namespace rideshare {

/// A request set one driver can serve together, priced by its best schedule.
struct Combination {
  std::size_t driver = 0;
  std::vector<std::size_t> requests;  // ascending passenger indices
  std::shared_ptr<const DynamicTree> tree;
  Schedule schedule;
  double gamma = 0.0;  // net km versus everyone driving alone
};

struct ComboStats {
  std::size_t validations = 0;  // insert_request calls
  std::size_t feasible = 0;
};

/// route km - l(o_v, d_v) - sum of l(o_r, d_r) over the served requests.
inline double net_cost(const PDNetwork& pd, std::size_t driver, const std::vector<std::size_t>& requests,
                       double route_km) {
  double g = route_km - pd.driver_direct(driver).distance;
  for (std::size_t r : requests) g -= pd.passenger_direct(r).distance;
  return g;
}

/// Feasible combinations of sizes 1..m for one driver, built level by level.
/// A size-k set is tried only if all of its (k-1)-subsets are feasible; it is
/// validated by inserting its largest request into the tree of the
/// lexicographically smallest subset. Output is sorted by (size, requests).
inline std::vector<Combination> generate_combinations(const RoutingContext& ctx, std::size_t driver,
                                                      const std::vector<std::size_t>& candidates,
                                                      const EngineConfig& config, ComboStats* stats = nullptr) {
  std::vector<Combination> out;
  const Instance& inst = ctx.instance();
  const PDNetwork& pd = ctx.pd();
  if (pd.driver_rejected(driver)) return out;
  const int capacity = inst.drivers[driver].capacity;

  std::vector<std::size_t> pool;
  for (std::size_t r : candidates)
    if (inst.passengers[r].party <= capacity) pool.push_back(r);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  ComboStats local;
  auto record = [&](std::vector<std::size_t> reqs, const DynamicTree& parent, std::vector<Combination>& level) {
    ++local.validations;
    InsertOutcome res = parent.insert_request(reqs.back());
    if (!res) return;
    auto best = res.tree->best_schedule();
    if (!best) return;
    Combination c;
    c.driver = driver;
    c.requests = std::move(reqs);
    c.gamma = net_cost(pd, driver, c.requests, best->distance);
    c.schedule = std::move(*best);
    c.tree = std::make_shared<const DynamicTree>(std::move(*res.tree));
    level.push_back(std::move(c));
  };

  const DynamicTree base = DynamicTree::for_driver(ctx, driver);
  std::vector<Combination> level;
  for (std::size_t r : pool) record({r}, base, level);

  for (int k = 2; k <= config.max_combo_size && level.size() >= 2; ++k) {
    std::map<std::vector<std::size_t>, std::size_t> known;
    for (std::size_t i = 0; i < level.size(); ++i) known.emplace(level[i].requests, i);
    std::vector<Combination> next;
    for (std::size_t a = 0; a < level.size(); ++a) {
      const auto& ra = level[a].requests;
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& rb = level[b].requests;
        if (!std::equal(ra.begin(), ra.end() - 1, rb.begin())) break;
        std::vector<std::size_t> uni = ra;
        uni.push_back(rb.back());
        bool closed = true;
        for (std::size_t drop = 0; drop + 2 < uni.size() && closed; ++drop) {
          std::vector<std::size_t> sub;
          for (std::size_t t = 0; t < uni.size(); ++t)
            if (t != drop) sub.push_back(uni[t]);
          closed = known.count(sub) != 0;
        }
        if (closed) record(std::move(uni), *level[a].tree, next);
      }
    }
    for (auto& c : level) out.push_back(std::move(c));
    level = std::move(next);
  }
  for (auto& c : level) out.push_back(std::move(c));

  local.feasible = out.size();
  if (stats) {
    stats->validations += local.validations;
    stats->feasible += local.feasible;
  }
  return out;
}

/// Runs `task(i)` for i in [0, n) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t n, int threads, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Per-driver generation on the configured worker count, merged in driver order.
inline std::vector<Combination> generate_all_combinations(const RoutingContext& ctx,
                                                          const std::vector<std::vector<std::size_t>>& candidates,
                                                          const EngineConfig& config, ComboStats* stats = nullptr) {
  std::vector<std::vector<Combination>> per_driver(candidates.size());
  std::vector<ComboStats> per_stats(candidates.size());
  parallel_for(candidates.size(), config.threads, [&](std::size_t i) {
    per_driver[i] = generate_combinations(ctx, i, candidates[i], config, &per_stats[i]);
  });
  std::vector<Combination> all;
  for (std::size_t i = 0; i < per_driver.size(); ++i) {
    for (auto& c : per_driver[i]) all.push_back(std::move(c));
    if (stats) {
      stats->validations += per_stats[i].validations;
      stats->feasible += per_stats[i].feasible;
    }
  }
  return all;
}

}  // namespace rideshare
