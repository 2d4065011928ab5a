#pragma once

#include <memory>
#include <vector>

#include "rideshare/rideshare.hpp"

namespace testkit {

using namespace rideshare;

/// Small Euclidean instances written point by point.
struct Builder {
  std::shared_ptr<RoadNetwork> net;
  Instance inst;
  NodeId next = 0;

  explicit Builder(double speed_kmh = 60.0) : net(std::make_shared<RoadNetwork>(RoadNetwork::euclidean(speed_kmh))) {}

  NodeId at(double x, double y) {
    net->add_node(next, Point{x, y});
    return next++;
  }

  Driver& driver(Point o, Point d, double delta, int cap = 1, double t = 0.0) {
    Driver v;
    v.id = "v" + std::to_string(inst.drivers.size() + 1);
    v.origin = at(o.x, o.y);
    v.destination = at(d.x, d.y);
    v.max_excess = delta;
    v.capacity = cap;
    v.departure = t;
    inst.drivers.push_back(v);
    return inst.drivers.back();
  }

  Passenger& passenger(Point o, Point d, double delta, double omega, double t = 0.0, int q = 1) {
    Passenger r;
    r.id = "r" + std::to_string(inst.passengers.size() + 1);
    r.origin = at(o.x, o.y);
    r.destination = at(d.x, d.y);
    r.max_excess = delta;
    r.max_wait = omega;
    r.departure = t;
    r.party = q;
    inst.passengers.push_back(r);
    return inst.passengers.back();
  }

  Instance build() {
    inst.network = net;
    return inst;
  }
};

inline Instance grid(std::uint64_t seed, std::size_t drivers, std::size_t passengers, bool common_depot = true) {
  GridScenarioParams p = common_depot ? grid_preset() : default_preset();
  p.seed = seed;
  p.drivers = drivers;
  p.passengers = passengers;
  return generate_grid(p);
}

inline double route_km(const PDNetwork& pd, const std::vector<PdIndex>& order) {
  double km = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) km += pd.distance(order[k - 1], order[k]);
  return km;
}

inline std::vector<PdIndex> stop_nodes(const Schedule& s) {
  std::vector<PdIndex> out;
  for (const auto& st : s.stops) out.push_back(st.node);
  return out;
}

}  // namespace testkit
