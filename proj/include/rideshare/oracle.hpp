#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "rideshare/model.hpp"
#include "rideshare/pd_network.hpp"

// Exhaustive references for small instances. Nothing here shares code with
// the dynamic tree: every constraint is re-evaluated from its definition.

namespace rideshare::oracle {

class SizeLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleReport {
  bool feasible = false;
  double objective = 0.0;          // route km of the best order
  std::vector<PdIndex> order;      // o_v, stops..., d_v
  std::size_t orders_examined = 0;  // precedence-valid interleavings
  std::size_t orders_feasible = 0;
};

namespace detail {

inline bool route_feasible(const Instance& inst, const PDNetwork& pd, std::size_t driver,
                           const std::vector<PdIndex>& route, double eps) {
  const Driver& v = inst.drivers[driver];
  std::map<std::size_t, double> pickup_at;
  double t = v.departure;  // t_v(o_v) = t_ED(v)
  int q = 0;               // Q_v(o_v) = 0
  for (std::size_t k = 1; k < route.size(); ++k) {
    const PdIndex a = route[k - 1];
    const PdIndex b = route[k];
    t += pd.time(a, b);
    const PdNode& nb = pd.node(b);
    int qb = 0;
    if (nb.kind == StopKind::Pickup) qb = inst.passengers[nb.owner].party;
    if (nb.kind == StopKind::Dropoff) qb = -inst.passengers[nb.owner].party;
    q += qb;
    if (q < std::max(0, qb) || q > std::min(v.capacity, v.capacity + qb)) return false;
    if (nb.kind == StopKind::Pickup) {
      const Passenger& r = inst.passengers[nb.owner];
      if (t < r.departure - eps) return false;
      if (t - r.departure > r.max_wait + eps) return false;
      pickup_at[nb.owner] = t;
    } else if (nb.kind == StopKind::Dropoff) {
      const Passenger& r = inst.passengers[nb.owner];
      auto it = pickup_at.find(nb.owner);
      if (it == pickup_at.end() || t < it->second) return false;
      const double excess = t - r.departure - pd.passenger_direct(nb.owner).time;
      if (excess > r.max_excess + eps) return false;
    } else if (nb.kind == StopKind::DriverDestination) {
      if (t - v.departure - pd.driver_direct(driver).time > v.max_excess + eps) return false;
    }
  }
  return true;
}

inline void enumerate(const Instance& inst, const PDNetwork& pd, std::size_t driver,
                      const std::vector<std::size_t>& requests, std::vector<int>& state, std::vector<PdIndex>& seq,
                      double eps, OracleReport& rep, double& best_time) {
  bool complete = true;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    if (state[k] == 2) continue;
    complete = false;
    const PdIndex stop = state[k] == 0 ? pd.pickup(requests[k]) : pd.dropoff(requests[k]);
    ++state[k];
    seq.push_back(stop);
    enumerate(inst, pd, driver, requests, state, seq, eps, rep, best_time);
    seq.pop_back();
    --state[k];
  }
  if (!complete) return;
  ++rep.orders_examined;
  std::vector<PdIndex> route;
  route.push_back(pd.driver_origin(driver));
  route.insert(route.end(), seq.begin(), seq.end());
  route.push_back(pd.driver_destination(driver));
  if (!route_feasible(inst, pd, driver, route, eps)) return;
  ++rep.orders_feasible;
  double km = 0.0;
  double minutes = 0.0;
  for (std::size_t k = 1; k < route.size(); ++k) {
    km += pd.distance(route[k - 1], route[k]);
    minutes += pd.time(route[k - 1], route[k]);
  }
  if (!rep.feasible || std::tie(km, minutes, route) < std::tie(rep.objective, best_time, rep.order)) {
    rep.feasible = true;
    rep.objective = km;
    best_time = minutes;
    rep.order = std::move(route);
  }
}

}  // namespace detail

/// Every pickup-before-drop-off interleaving of `requests` for one driver,
/// (2m)!/2^m of them, each checked in full. Requires m <= 5.
inline OracleReport brute_force_vrp(const Instance& inst, const PDNetwork& pd, std::size_t driver,
                                    const std::vector<std::size_t>& requests, double eps = 1e-9) {
  if (requests.size() > 5) throw SizeLimit("brute_force_vrp supports at most 5 requests");
  OracleReport rep;
  if (pd.driver_rejected(driver)) return rep;
  std::vector<int> state(requests.size(), 0);
  std::vector<PdIndex> seq;
  double best_time = 0.0;
  detail::enumerate(inst, pd, driver, requests, state, seq, eps, rep, best_time);
  return rep;
}

struct MatchingOracle {
  double objective = 0.0;
  std::vector<std::vector<std::size_t>> assignment;  // per driver, ascending
};

/// Global optimum by enumerating every assignment of passengers to drivers
/// (or to nobody), at most m per driver, each driver priced exactly.
inline MatchingOracle brute_force_matching(const Instance& inst, const PDNetwork& pd, int m, double eps = 1e-9) {
  const std::size_t nv = inst.drivers.size();
  const std::size_t nr = inst.passengers.size();
  if (nv > 3 || nr > 6) throw SizeLimit("brute_force_matching supports at most 3 drivers and 6 passengers");

  std::map<std::pair<std::size_t, unsigned>, std::optional<double>> memo;
  auto price = [&](std::size_t v, unsigned mask) -> std::optional<double> {
    auto key = std::make_pair(v, mask);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<std::size_t> reqs;
    for (std::size_t j = 0; j < nr; ++j)
      if (mask & (1u << j)) reqs.push_back(j);
    std::optional<double> cost;
    if (reqs.empty()) {
      cost = pd.driver_direct(v).distance;
    } else {
      const auto rep = brute_force_vrp(inst, pd, v, reqs, eps);
      if (rep.feasible) cost = rep.objective;
    }
    memo.emplace(key, cost);
    return cost;
  };

  MatchingOracle best;
  bool found = false;
  std::vector<int> owner(nr, -1);
  std::size_t combos = 1;
  for (std::size_t j = 0; j < nr; ++j) combos *= nv + 1;
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    bool ok = true;
    std::vector<unsigned> masks(nv, 0);
    for (std::size_t j = 0; j < nr; ++j) {
      const int o = static_cast<int>(c % (nv + 1)) - 1;
      c /= nv + 1;
      owner[j] = o;
      if (o >= 0) {
        if (pd.passenger_rejected(j) || pd.driver_rejected(static_cast<std::size_t>(o))) ok = false;
        masks[static_cast<std::size_t>(o)] |= 1u << j;
      }
    }
    if (!ok) continue;
    double z = 0.0;
    for (std::size_t v = 0; v < nv && ok; ++v) {
      if (pd.driver_rejected(v)) continue;
      if (std::popcount(masks[v]) > m) {
        ok = false;
        break;
      }
      const auto cost = price(v, masks[v]);
      if (!cost) ok = false;
      else z += *cost;
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < nr; ++j)
      if (owner[j] < 0 && !pd.passenger_rejected(j)) z += pd.passenger_direct(j).distance;
    if (!found || z < best.objective) {
      found = true;
      best.objective = z;
      best.assignment.assign(nv, {});
      for (std::size_t j = 0; j < nr; ++j)
        if (owner[j] >= 0) best.assignment[static_cast<std::size_t>(owner[j])].push_back(j);
    }
  }
  return best;
}

}  // namespace rideshare::oracle
