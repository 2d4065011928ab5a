#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "rideshare/model.hpp"
#include "rideshare/pd_network.hpp"

namespace rideshare {

/// Ellipse with the driver's origin and destination as foci: the set of
/// points p with |o - p| + |p - d| <= max_chain_km.
struct AccessibleRegion {
  Point origin;
  Point destination;
  double max_chain_km = 0.0;

  bool contains(const Point& p) const {
    const double chain = euclidean(origin, p) + euclidean(p, destination);
    return chain <= max_chain_km + 1e-9 * std::max(1.0, max_chain_km);
  }
};

/// Disc around a pickup point that a driver must start in to reach the
/// pickup before the passenger's waiting limit expires.
struct ReachablePickupRegion {
  Point center;
  double radius_km = 0.0;

  bool contains(const Point& p) const {
    return euclidean(center, p) <= radius_km + 1e-9 * std::max(1.0, radius_km);
  }
};

inline std::optional<double> pruning_speed_kmh(const Instance& instance, const EngineConfig& config) {
  if (config.prune_speed_kmh) return config.prune_speed_kmh;
  return instance.network->max_speed_kmh();
}

/// Chain length bound v_max * (tau + Delta): the driver's whole trip takes at
/// most tau + Delta minutes, so its straight-line stop chain fits inside.
inline AccessibleRegion accessible_region(const Instance& instance, const PDNetwork& pd, std::size_t driver,
                                          double speed_kmh) {
  const auto& d = instance.drivers[driver];
  const double budget_min = pd.driver_direct(driver).time + d.max_excess;
  return {*pd.node(pd.driver_origin(driver)).where, *pd.node(pd.driver_destination(driver)).where,
          speed_kmh * budget_min / 60.0};
}

/// Radius v_max * (latest pickup - driver departure); equals v_max * Omega
/// when both leave at the same time. Empty when the driver departs too late.
inline std::optional<ReachablePickupRegion> reachable_pickup_region(const Instance& instance, const PDNetwork& pd,
                                                                    std::size_t passenger, std::size_t driver,
                                                                    double speed_kmh) {
  const auto& p = instance.passengers[passenger];
  const double slack = p.departure + p.max_wait - instance.drivers[driver].departure;
  if (slack < 0.0) return std::nullopt;
  return ReachablePickupRegion{*pd.node(pd.pickup(passenger)).where, speed_kmh * slack / 60.0};
}

/// Candidate request set R_v of one driver. Geometric when coordinates and a
/// speed bound exist; otherwise necessary pairwise travel-time checks.
/// Never removes a request the driver could serve.
inline std::vector<std::size_t> candidate_requests(const Instance& instance, const PDNetwork& pd, std::size_t driver,
                                                   const EngineConfig& config) {
  std::vector<std::size_t> out;
  if (pd.driver_rejected(driver)) return out;
  const auto& d = instance.drivers[driver];
  if (!config.prune) {
    for (std::size_t j = 0; j < instance.passengers.size(); ++j)
      if (!pd.passenger_rejected(j)) out.push_back(j);
    return out;
  }
  const auto speed = pruning_speed_kmh(instance, config);
  const bool geometric = speed && pd.has_coordinates();
  const PdIndex ov = pd.driver_origin(driver);
  const PdIndex dv = pd.driver_destination(driver);
  const double budget = pd.driver_direct(driver).time + d.max_excess;

  std::optional<AccessibleRegion> region;
  if (geometric) region = accessible_region(instance, pd, driver, *speed);
  for (std::size_t j = 0; j < instance.passengers.size(); ++j) {
    if (pd.passenger_rejected(j)) continue;
    const auto& p = instance.passengers[j];
    const PdIndex oj = pd.pickup(j);
    const PdIndex dj = pd.dropoff(j);
    bool keep = false;
    if (geometric) {
      const auto circle = reachable_pickup_region(instance, pd, j, driver, *speed);
      keep = region->contains(*pd.node(oj).where) && region->contains(*pd.node(dj).where) && circle &&
             circle->contains(*pd.node(ov).where);
    } else {
      const double reach = d.departure + pd.time(ov, oj);
      const double detour = pd.time(ov, oj) + pd.time(oj, dj) + pd.time(dj, dv);
      keep = reach <= p.departure + p.max_wait + config.eps && detour <= budget + config.eps;
    }
    if (keep) out.push_back(j);
  }
  return out;
}

/// Mean share (percent) of passenger requests removed per driver.
inline double prune_strength(const std::vector<std::vector<std::size_t>>& candidates, std::size_t passenger_count) {
  if (candidates.empty() || passenger_count == 0) return 0.0;
  double sum = 0.0;
  for (const auto& c : candidates) sum += 1.0 - static_cast<double>(c.size()) / static_cast<double>(passenger_count);
  return 100.0 * sum / static_cast<double>(candidates.size());
}

}  // namespace rideshare
