#pragma once

#include <chrono>
#include <memory>
#include <vector>

#include "rideshare/assign.hpp"
#include "rideshare/combos.hpp"
#include "rideshare/dtree.hpp"
#include "rideshare/model.hpp"
#include "rideshare/pd_network.hpp"
#include "rideshare/pruning.hpp"

namespace rideshare {

struct StageTimes {
  double prep_ms = 0.0;   // passenger-driver network and pruning
  double combo_ms = 0.0;  // combination generation
  double ilp_ms = 0.0;    // assignment
  double total_ms = 0.0;
};

/// Everything one batch run produces.
struct BatchOutput {
  std::shared_ptr<const PDNetwork> pd;
  std::vector<std::vector<std::size_t>> candidates;
  std::size_t combinations = 0;
  ComboStats combo_stats;
  std::size_t search_nodes = 0;
  MatchResult result;
  Metrics metrics;
  StageTimes times;
};

/// Pruning, then combination generation, then exact assignment.
inline BatchOutput match(const Instance& instance, const EngineConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  config.validate();
  instance.validate();
  BatchOutput out;
  const auto t0 = clock::now();
  auto pd = std::make_shared<const PDNetwork>(build_pd_network(instance));
  out.pd = pd;
  out.candidates.resize(instance.drivers.size());
  parallel_for(instance.drivers.size(), config.threads,
               [&](std::size_t v) { out.candidates[v] = candidate_requests(instance, *pd, v, config); });
  const auto t1 = clock::now();

  RoutingContext ctx(instance, *pd, config.eps);
  const auto combos = generate_all_combinations(ctx, out.candidates, config, &out.combo_stats);
  out.combinations = combos.size();
  const auto t2 = clock::now();

  const AssignmentProblem problem = build_problem(combos, instance, *pd);
  const AssignmentSolution sol = solve_assignment(problem);
  out.search_nodes = sol.nodes;
  out.result = assemble_result(problem, sol, combos);
  const auto t3 = clock::now();

  out.metrics = metrics(out.result, instance, out.candidates);
  out.times = {ms(t0, t1), ms(t1, t2), ms(t2, t3), ms(t0, t3)};
  return out;
}

}  // namespace rideshare
