#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "rideshare/combos.hpp"
#include "rideshare/pd_network.hpp"
#include "rideshare/pruning.hpp"

namespace rideshare {

/// Combination-to-driver set packing: min Gamma.X with every request and
/// every driver covered at most once. Column j is combination j.
struct AssignmentProblem {
  std::size_t drivers = 0;
  std::size_t passengers = 0;
  std::vector<double> gamma;
  std::vector<std::size_t> column_driver;
  std::vector<std::vector<std::size_t>> column_requests;
  double baseline_km = 0.0;  // B: every accepted participant drives alone

  std::size_t size() const { return gamma.size(); }

  int phi(std::size_t request, std::size_t column) const {
    const auto& rs = column_requests[column];
    return std::binary_search(rs.begin(), rs.end(), request) ? 1 : 0;
  }
  int psi(std::size_t driver, std::size_t column) const { return column_driver[column] == driver ? 1 : 0; }

  /// B + Gamma.X
  double objective(const std::vector<char>& x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j]) z += gamma[j];
    return baseline_km + z;
  }

  bool feasible(const std::vector<char>& x) const {
    std::vector<int> dcount(drivers, 0), rcount(passengers, 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!x[j]) continue;
      if (++dcount[column_driver[j]] > 1) return false;
      for (std::size_t r : column_requests[j])
        if (++rcount[r] > 1) return false;
    }
    return true;
  }
};

inline double baseline_km(const Instance& instance, const PDNetwork& pd) {
  double b = 0.0;
  for (std::size_t i = 0; i < instance.drivers.size(); ++i)
    if (!pd.driver_rejected(i)) b += pd.driver_direct(i).distance;
  for (std::size_t j = 0; j < instance.passengers.size(); ++j)
    if (!pd.passenger_rejected(j)) b += pd.passenger_direct(j).distance;
  return b;
}

inline AssignmentProblem build_problem(const std::vector<Combination>& combos, const Instance& instance,
                                       const PDNetwork& pd) {
  AssignmentProblem p;
  p.drivers = instance.drivers.size();
  p.passengers = instance.passengers.size();
  p.baseline_km = baseline_km(instance, pd);
  for (const auto& c : combos) {
    p.gamma.push_back(c.gamma);
    p.column_driver.push_back(c.driver);
    p.column_requests.push_back(c.requests);
  }
  return p;
}

struct AssignmentSolution {
  std::vector<char> x;
  double gamma_x = 0.0;
  std::size_t nodes = 0;
};

namespace detail {

/// Exact branch and bound on one connected block of columns. Columns are
/// visited most-negative first; the bound is the tighter of a per-driver
/// relaxation and a cost-splitting relaxation over drivers and requests.
class PackingSearch {
 public:
  PackingSearch(const AssignmentProblem& p, std::vector<std::size_t> cols) : p_(p), cols_(std::move(cols)) {
    for (std::size_t c : cols_) {
      ids_.push_back(p_.column_driver[c]);
      for (std::size_t r : p_.column_requests[c]) ids_.push_back(p_.drivers + r);
    }
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    for (std::size_t c : cols_) {
      const std::size_t first = elements_.size();
      elements_.push_back(local(p_.column_driver[c]));
      for (std::size_t r : p_.column_requests[c]) elements_.push_back(local(p_.drivers + r));
      spans_.push_back({first, elements_.size()});
    }
    used_.assign(ids_.size(), 0);
    min_driver_.assign(ids_.size(), 0.0);
    min_share_.assign(ids_.size(), 0.0);
    chosen_.assign(cols_.size(), 0);
  }

  void run(std::size_t& nodes) {
    greedy();
    dfs(0, 0.0);
    nodes += nodes_;
  }

  const std::vector<char>& best() const { return best_x_; }
  const std::vector<std::size_t>& columns() const { return cols_; }

 private:
  std::size_t local(std::size_t global) const {
    return static_cast<std::size_t>(std::lower_bound(ids_.begin(), ids_.end(), global) - ids_.begin());
  }

  bool fits(std::size_t j) const {
    for (std::size_t e = spans_[j].first; e < spans_[j].second; ++e)
      if (used_[elements_[e]]) return false;
    return true;
  }

  void mark(std::size_t j, char v) {
    for (std::size_t e = spans_[j].first; e < spans_[j].second; ++e) used_[elements_[e]] = v;
  }

  void greedy() {
    double z = 0.0;
    std::vector<char> x(cols_.size(), 0);
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (!fits(j)) continue;
      mark(j, 1);
      x[j] = 1;
      z += p_.gamma[cols_[j]];
    }
    for (std::size_t j = 0; j < cols_.size(); ++j)
      if (x[j]) mark(j, 0);
    best_ = z;
    best_x_ = std::move(x);
  }

  double bound(std::size_t from) {
    std::fill(min_driver_.begin(), min_driver_.end(), 0.0);
    std::fill(min_share_.begin(), min_share_.end(), 0.0);
    for (std::size_t j = from; j < cols_.size(); ++j) {
      if (!fits(j)) continue;
      const double g = p_.gamma[cols_[j]];
      const std::size_t first = spans_[j].first;
      const std::size_t width = spans_[j].second - first;
      const double share = g / static_cast<double>(width);
      min_driver_[elements_[first]] = std::min(min_driver_[elements_[first]], g);
      for (std::size_t e = first; e < spans_[j].second; ++e)
        min_share_[elements_[e]] = std::min(min_share_[elements_[e]], share);
    }
    double by_driver = 0.0;
    double by_share = 0.0;
    for (std::size_t e = 0; e < ids_.size(); ++e) {
      by_driver += min_driver_[e];
      by_share += min_share_[e];
    }
    return std::max(by_driver, by_share);
  }

  void dfs(std::size_t j, double z) {
    ++nodes_;
    while (j < cols_.size() && !fits(j)) ++j;
    if (j == cols_.size()) {
      if (z < best_ - 1e-12) {
        best_ = z;
        best_x_ = chosen_;
      }
      return;
    }
    if (z + bound(j) >= best_ - 1e-12) return;
    mark(j, 1);
    chosen_[j] = 1;
    dfs(j + 1, z + p_.gamma[cols_[j]]);
    chosen_[j] = 0;
    mark(j, 0);
    dfs(j + 1, z);
  }

  const AssignmentProblem& p_;
  std::vector<std::size_t> cols_;
  std::vector<std::size_t> ids_;
  std::vector<std::size_t> elements_;
  std::vector<std::pair<std::size_t, std::size_t>> spans_;
  std::vector<char> used_;
  std::vector<double> min_driver_;
  std::vector<double> min_share_;
  std::vector<char> chosen_;
  std::vector<char> best_x_;
  double best_ = 0.0;
  std::size_t nodes_ = 0;
};

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Exact optimum of the set packing. Columns with gamma >= 0 are dropped up
/// front (X = 0 is always feasible), the rest split into independent blocks
/// that share no driver or request, and each block is searched exactly.
inline AssignmentSolution solve_assignment(const AssignmentProblem& p) {
  AssignmentSolution sol;
  sol.x.assign(p.size(), 0);
  std::vector<std::size_t> useful;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p.gamma[j] < 0.0) useful.push_back(j);
  std::stable_sort(useful.begin(), useful.end(), [&](std::size_t a, std::size_t b) {
    if (p.gamma[a] != p.gamma[b]) return p.gamma[a] < p.gamma[b];
    if (p.column_driver[a] != p.column_driver[b]) return p.column_driver[a] < p.column_driver[b];
    return p.column_requests[a] < p.column_requests[b];
  });

  detail::DisjointSets sets(p.drivers + p.passengers);
  for (std::size_t j : useful)
    for (std::size_t r : p.column_requests[j]) sets.unite(p.column_driver[j], p.drivers + r);
  std::vector<std::vector<std::size_t>> blocks(p.drivers + p.passengers);
  for (std::size_t j : useful) blocks[sets.find(p.column_driver[j])].push_back(j);

  for (auto& block : blocks) {
    if (block.empty()) continue;
    detail::PackingSearch search(p, std::move(block));
    search.run(sol.nodes);
    const auto& x = search.best();
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k]) sol.x[search.columns()[k]] = 1;
  }
  for (std::size_t j = 0; j < p.size(); ++j)
    if (sol.x[j]) sol.gamma_x += p.gamma[j];
  return sol;
}

struct SelectedRoute {
  std::size_t driver = 0;
  std::vector<std::size_t> requests;
  double gamma = 0.0;
  Schedule schedule;
};

struct MatchResult {
  std::vector<SelectedRoute> selected;  // ascending driver index
  std::vector<std::size_t> unmatched_drivers;
  std::vector<std::size_t> unmatched_passengers;
  double baseline_km = 0.0;
  double gamma_x = 0.0;
  double objective_km = 0.0;  // baseline + Gamma.X
};

inline MatchResult assemble_result(const AssignmentProblem& p, const AssignmentSolution& sol,
                                   const std::vector<Combination>& combos) {
  MatchResult m;
  m.baseline_km = p.baseline_km;
  std::vector<char> driver_used(p.drivers, 0), passenger_used(p.passengers, 0);
  for (std::size_t j = 0; j < sol.x.size(); ++j) {
    if (!sol.x[j]) continue;
    const auto& c = combos[j];
    m.selected.push_back({c.driver, c.requests, c.gamma, c.schedule});
    driver_used[c.driver] = 1;
    for (std::size_t r : c.requests) passenger_used[r] = 1;
  }
  std::sort(m.selected.begin(), m.selected.end(),
            [](const SelectedRoute& a, const SelectedRoute& b) { return a.driver < b.driver; });
  for (const auto& s : m.selected) m.gamma_x += s.gamma;
  for (std::size_t i = 0; i < p.drivers; ++i)
    if (!driver_used[i]) m.unmatched_drivers.push_back(i);
  for (std::size_t j = 0; j < p.passengers; ++j)
    if (!passenger_used[j]) m.unmatched_passengers.push_back(j);
  m.objective_km = m.baseline_km + m.gamma_x;
  return m;
}

/// Total km with every route spelled out: matched drivers drive their
/// schedule, unmatched drivers and passengers drive their direct path.
inline double direct_objective(const MatchResult& m, const Instance& instance, const PDNetwork& pd) {
  double z = 0.0;
  std::vector<char> served(instance.passengers.size(), 0);
  std::vector<char> routed(instance.drivers.size(), 0);
  for (const auto& s : m.selected) {
    routed[s.driver] = 1;
    const auto& st = s.schedule.stops;
    for (std::size_t k = 1; k < st.size(); ++k) z += pd.distance(st[k - 1].node, st[k].node);
    for (const auto& st_k : st)
      if (pd.node(st_k.node).kind == StopKind::Dropoff) served[pd.node(st_k.node).owner] = 1;
  }
  for (std::size_t i = 0; i < instance.drivers.size(); ++i)
    if (!routed[i] && !pd.driver_rejected(i)) z += pd.driver_direct(i).distance;
  for (std::size_t j = 0; j < instance.passengers.size(); ++j)
    if (!served[j] && !pd.passenger_rejected(j)) z += pd.passenger_direct(j).distance;
  return z;
}

struct Metrics {
  std::size_t matched_drivers = 0;
  std::size_t matched_passengers = 0;
  double match_rate = 0.0;      // percent
  double prune_strength = 0.0;  // percent
  double total_delta_v = 0.0;
  double mean_delta_v = 0.0;
  double total_delta_r = 0.0;
  double mean_delta_r = 0.0;
  double total_omega_r = 0.0;
  double mean_omega_r = 0.0;
  double vkt_saved = 0.0;
  std::size_t trips_saved = 0;
};

inline double match_success_rate(std::size_t matched_drivers, std::size_t matched_passengers, std::size_t drivers,
                                  std::size_t passengers) {
  const std::size_t all = drivers + passengers;
  if (all == 0) return 0.0;
  return 100.0 * static_cast<double>(matched_drivers + matched_passengers) / static_cast<double>(all);
}

inline Metrics metrics(const MatchResult& m, const Instance& instance,
                       const std::vector<std::vector<std::size_t>>& candidates) {
  Metrics out;
  for (const auto& s : m.selected) {
    ++out.matched_drivers;
    out.matched_passengers += s.requests.size();
    out.trips_saved += s.requests.size();
    out.total_delta_v += s.schedule.driver_excess;
    for (const auto& svc : s.schedule.passengers) {
      out.total_delta_r += svc.excess;
      out.total_omega_r += svc.wait;
    }
  }
  out.match_rate = match_success_rate(out.matched_drivers, out.matched_passengers, instance.drivers.size(),
                                      instance.passengers.size());
  out.prune_strength = prune_strength(candidates, instance.passengers.size());
  if (out.matched_drivers) out.mean_delta_v = out.total_delta_v / static_cast<double>(out.matched_drivers);
  if (out.matched_passengers) {
    out.mean_delta_r = out.total_delta_r / static_cast<double>(out.matched_passengers);
    out.mean_omega_r = out.total_omega_r / static_cast<double>(out.matched_passengers);
  }
  out.vkt_saved = 0.0 - m.gamma_x;
  return out;
}

}  // namespace rideshare
