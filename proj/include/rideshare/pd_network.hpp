#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rideshare/model.hpp"
#include "rideshare/network.hpp"

namespace rideshare {

using PdIndex = std::uint32_t;

enum class StopKind : std::uint8_t { DriverOrigin, DriverDestination, Pickup, Dropoff };

inline const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::DriverOrigin: return "driver_origin";
    case StopKind::DriverDestination: return "driver_destination";
    case StopKind::Pickup: return "pickup";
    case StopKind::Dropoff: return "dropoff";
  }
  return "?";
}

/// A participant-owned copy of a physical node. Two participants at the same
/// physical node always get distinct pd-nodes.
struct PdNode {
  StopKind kind = StopKind::DriverOrigin;
  std::size_t owner = 0;  // driver or passenger index, by kind
  NodeId node = 0;
  std::optional<Point> where;

  bool is_driver_node() const { return kind == StopKind::DriverOrigin || kind == StopKind::DriverDestination; }
};

struct Rejection {
  bool driver = false;
  std::size_t index = 0;
  std::string id;
  std::string reason;
};

/// Passenger-driver network: the complete graph over duplicated participant
/// nodes. Layout: driver i owns {2i, 2i+1}; passenger j owns {2|V|+2j, 2|V|+2j+1}.
class PDNetwork {
 public:
  std::size_t size() const { return nodes_.size(); }
  std::size_t driver_count() const { return drivers_; }
  std::size_t passenger_count() const { return passengers_; }
  const PdNode& node(PdIndex i) const { return nodes_[i]; }
  const std::vector<PdNode>& nodes() const { return nodes_; }

  PdIndex driver_origin(std::size_t i) const { return static_cast<PdIndex>(2 * i); }
  PdIndex driver_destination(std::size_t i) const { return static_cast<PdIndex>(2 * i + 1); }
  PdIndex pickup(std::size_t j) const { return static_cast<PdIndex>(2 * drivers_ + 2 * j); }
  PdIndex dropoff(std::size_t j) const { return static_cast<PdIndex>(2 * drivers_ + 2 * j + 1); }

  /// Shortest-path travel time (minutes) between pd-nodes.
  double time(PdIndex a, PdIndex b) const { return cost(a, b).time; }
  /// Length (km) of the time-optimal path between pd-nodes.
  double distance(PdIndex a, PdIndex b) const { return cost(a, b).distance; }

  PathCost cost(PdIndex a, PdIndex b) const {
    if (a == b) return {0.0, 0.0};
    if (speed_kmh_) {
      const double km = euclidean(*nodes_[a].where, *nodes_[b].where);
      return {km / *speed_kmh_ * 60.0, km};
    }
    return matrix_[slot_[a] * locations_ + slot_[b]];
  }

  /// tau(o_i, d_i) of driver i.
  PathCost driver_direct(std::size_t i) const { return cost(driver_origin(i), driver_destination(i)); }
  /// tau(o_j, d_j) of passenger j.
  PathCost passenger_direct(std::size_t j) const { return cost(pickup(j), dropoff(j)); }

  const std::vector<Rejection>& rejected() const { return rejected_; }
  bool driver_rejected(std::size_t i) const { return driver_rejected_[i] != 0; }
  bool passenger_rejected(std::size_t j) const { return passenger_rejected_[j] != 0; }

  bool has_coordinates() const {
    for (const auto& n : nodes_)
      if (!n.where) return false;
    return true;
  }

  /// Number of distinct physical locations backing the travel matrix.
  std::size_t location_count() const { return locations_; }

 private:
  friend PDNetwork build_pd_network(const Instance& instance);

  std::size_t drivers_ = 0;
  std::size_t passengers_ = 0;
  std::vector<PdNode> nodes_;
  std::optional<double> speed_kmh_;
  std::size_t locations_ = 0;
  std::vector<std::size_t> slot_;
  std::vector<PathCost> matrix_;
  std::vector<Rejection> rejected_;
  std::vector<char> driver_rejected_;
  std::vector<char> passenger_rejected_;
};

/// Builds the passenger-driver network. Shortest paths are computed once,
/// only between the physical nodes participants actually use. A participant
/// whose own origin cannot reach its destination is rejected, not the batch.
inline PDNetwork build_pd_network(const Instance& instance) {
  if (!instance.network) throw InvalidInput("instance has no network");
  const RoadNetwork& net = *instance.network;
  PDNetwork pd;
  pd.drivers_ = instance.drivers.size();
  pd.passengers_ = instance.passengers.size();
  pd.nodes_.reserve(2 * (pd.drivers_ + pd.passengers_));
  auto add = [&](StopKind kind, std::size_t owner, NodeId node) {
    if (!net.has_node(node)) throw InvalidInput("participant references unknown node " + std::to_string(node));
    pd.nodes_.push_back({kind, owner, node, net.coordinates(node)});
  };
  for (std::size_t i = 0; i < instance.drivers.size(); ++i) {
    add(StopKind::DriverOrigin, i, instance.drivers[i].origin);
    add(StopKind::DriverDestination, i, instance.drivers[i].destination);
  }
  for (std::size_t j = 0; j < instance.passengers.size(); ++j) {
    add(StopKind::Pickup, j, instance.passengers[j].origin);
    add(StopKind::Dropoff, j, instance.passengers[j].destination);
  }

  if (net.is_euclidean()) {
    pd.speed_kmh_ = net.euclidean_speed_kmh();
    pd.locations_ = pd.nodes_.size();
  } else {
    std::map<NodeId, std::size_t> slots;
    for (const auto& n : pd.nodes_) slots.emplace(n.node, 0);
    std::vector<NodeId> order;
    for (auto& [id, slot] : slots) {
      slot = order.size();
      order.push_back(id);
    }
    pd.locations_ = order.size();
    pd.slot_.reserve(pd.nodes_.size());
    for (const auto& n : pd.nodes_) pd.slot_.push_back(slots.at(n.node));
    pd.matrix_.assign(pd.locations_ * pd.locations_, PathCost{kInfinity, kInfinity});
    for (std::size_t a = 0; a < order.size(); ++a) {
      const auto all = net.shortest_paths_from(order[a]);
      for (std::size_t b = 0; b < order.size(); ++b) pd.matrix_[a * pd.locations_ + b] = all[net.dense(order[b])];
    }
  }

  pd.driver_rejected_.assign(pd.drivers_, 0);
  pd.passenger_rejected_.assign(pd.passengers_, 0);
  for (std::size_t i = 0; i < pd.drivers_; ++i) {
    if (!pd.driver_direct(i).reachable()) {
      pd.driver_rejected_[i] = 1;
      pd.rejected_.push_back({true, i, instance.drivers[i].id, NoPath(instance.drivers[i].origin, instance.drivers[i].destination).what()});
    }
  }
  for (std::size_t j = 0; j < pd.passengers_; ++j) {
    if (!pd.passenger_direct(j).reachable()) {
      pd.passenger_rejected_[j] = 1;
      pd.rejected_.push_back({false, j, instance.passengers[j].id,
                              NoPath(instance.passengers[j].origin, instance.passengers[j].destination).what()});
    }
  }
  return pd;
}

/// Fills level-of-service limits from shortest-path times:
/// Delta_k = excess_pct * tau(o_k, d_k) for every participant and
/// Omega_j = wait_pct * Delta_j for every passenger. Fractions, not percent.
/// With `only_unset`, limits already present in the instance are kept.
inline Instance default_constraints(Instance instance, const PDNetwork& pd, double excess_frac, double wait_frac,
                                    bool only_unset = false) {
  if (!(excess_frac >= 0.0) || !(wait_frac >= 0.0)) throw InvalidInput("constraint percentages must be >= 0");
  for (std::size_t i = 0; i < instance.drivers.size(); ++i) {
    auto& d = instance.drivers[i];
    const double tau = pd.driver_rejected(i) ? 0.0 : pd.driver_direct(i).time;
    if (!only_unset || std::isnan(d.max_excess)) d.max_excess = excess_frac * tau;
  }
  for (std::size_t j = 0; j < instance.passengers.size(); ++j) {
    auto& p = instance.passengers[j];
    const double tau = pd.passenger_rejected(j) ? 0.0 : pd.passenger_direct(j).time;
    if (!only_unset || std::isnan(p.max_excess)) p.max_excess = excess_frac * tau;
    if (!only_unset || std::isnan(p.max_wait)) p.max_wait = wait_frac * p.max_excess;
  }
  return instance;
}

}  // namespace rideshare
