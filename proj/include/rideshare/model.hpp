#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rideshare/network.hpp"

namespace rideshare {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Driver {
  std::string id;
  NodeId origin = 0;
  NodeId destination = 0;
  double departure = 0.0;  // t_ED, minutes; the driver leaves exactly then
  int capacity = 1;
  double max_excess = kUnset;  // Delta, minutes
};

struct Passenger {
  std::string id;
  NodeId origin = 0;
  NodeId destination = 0;
  double departure = 0.0;      // earliest pickup, minutes
  double max_excess = kUnset;  // Delta, minutes (includes waiting)
  double max_wait = kUnset;    // Omega, minutes
  int party = 1;               // seats taken on pickup, released on drop-off
};

/// One matching batch.
struct Instance {
  std::string batch = "batch";
  std::shared_ptr<const RoadNetwork> network;
  std::vector<Driver> drivers;
  std::vector<Passenger> passengers;
  std::uint64_t seed = 0;

  /// Throws InvalidInput on the first violated invariant. Unset Delta/Omega
  /// values are allowed only when `allow_unset` is true.
  void validate(bool allow_unset = false) const {
    if (!network) throw InvalidInput("instance has no network");
    std::set<std::string> ids;
    auto check_node = [&](NodeId n, const std::string& who) {
      if (!network->has_node(n)) throw InvalidInput(who + " references unknown node " + std::to_string(n));
    };
    auto check_limit = [&](double v, const std::string& what, const std::string& who) {
      if (std::isnan(v)) {
        if (!allow_unset) throw InvalidInput(who + ": " + what + " is not set");
      } else if (v < 0.0) {
        throw InvalidInput(who + ": " + what + " must be >= 0");
      }
    };
    for (const auto& d : drivers) {
      if (!ids.insert(d.id).second) throw InvalidInput("duplicate participant id " + d.id);
      check_node(d.origin, d.id);
      check_node(d.destination, d.id);
      if (d.capacity < 1) throw InvalidInput(d.id + ": capacity must be >= 1");
      check_limit(d.max_excess, "max excess time", d.id);
      if (!std::isfinite(d.departure)) throw InvalidInput(d.id + ": departure must be finite");
    }
    for (const auto& p : passengers) {
      if (!ids.insert(p.id).second) throw InvalidInput("duplicate participant id " + p.id);
      check_node(p.origin, p.id);
      check_node(p.destination, p.id);
      if (p.party < 1) throw InvalidInput(p.id + ": party size must be >= 1");
      check_limit(p.max_excess, "max excess time", p.id);
      check_limit(p.max_wait, "max waiting time", p.id);
      if (!std::isfinite(p.departure)) throw InvalidInput(p.id + ": departure must be finite");
    }
  }
};

struct EngineConfig {
  int max_combo_size = 4;                 // m
  std::optional<double> prune_speed_kmh;  // v_max; derived from the network when empty
  bool prune = true;
  double eps = 1e-9;  // minutes
  int threads = 1;

  void validate() const {
    if (max_combo_size < 1) throw InvalidInput("max combination size must be >= 1");
    if (prune_speed_kmh && !(*prune_speed_kmh > 0.0)) throw InvalidInput("pruning speed must be positive");
    if (!(eps >= 0.0)) throw InvalidInput("tolerance must be >= 0");
    if (threads < 1) throw InvalidInput("thread count must be >= 1");
  }
};

}  // namespace rideshare
