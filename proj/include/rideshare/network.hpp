#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rideshare {

using NodeId = std::int64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Planar coordinate in kilometres.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double euclidean(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPath : public std::runtime_error {
 public:
  NoPath(NodeId from, NodeId to)
      : std::runtime_error("no path from node " + std::to_string(from) + " to node " + std::to_string(to)),
        from_(from),
        to_(to) {}
  NodeId from() const { return from_; }
  NodeId to() const { return to_; }

 private:
  NodeId from_;
  NodeId to_;
};

/// Travel time (minutes) and length (km) of a path.
struct PathCost {
  double time = 0.0;
  double distance = 0.0;

  bool reachable() const { return std::isfinite(time); }
  friend bool operator==(const PathCost&, const PathCost&) = default;
};

struct Link {
  NodeId from = 0;
  NodeId to = 0;
  double tt_min = 0.0;
  double len_km = 0.0;
};

/// Physical road network. Either an explicit directed link graph, or an
/// implicit complete Euclidean graph where every pair of nodes is joined by a
/// straight segment travelled at a fixed speed (grid scenarios).
class RoadNetwork {
 public:
  RoadNetwork() = default;

  static RoadNetwork euclidean(double speed_kmh) {
    if (!(speed_kmh > 0.0)) throw InvalidInput("euclidean speed must be positive");
    RoadNetwork net;
    net.euclid_speed_kmh_ = speed_kmh;
    return net;
  }

  void add_node(NodeId id, std::optional<Point> where = std::nullopt) {
    if (index_.count(id)) throw InvalidInput("duplicate node id " + std::to_string(id));
    if (is_euclidean() && !where) throw InvalidInput("euclidean network node needs coordinates");
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
    coords_.push_back(where);
    adjacency_.emplace_back();
  }

  void add_link(NodeId from, NodeId to, double tt_min, double len_km) {
    if (is_euclidean()) throw InvalidInput("euclidean network takes no explicit links");
    if (!has_node(from) || !has_node(to)) throw InvalidInput("link endpoint is not a declared node");
    if (!(tt_min >= 0.0) || !(len_km >= 0.0)) throw InvalidInput("link travel time and length must be >= 0");
    adjacency_[index_.at(from)].push_back(links_.size());
    links_.push_back({from, to, tt_min, len_km});
  }

  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  std::size_t node_count() const { return ids_.size(); }
  const std::vector<NodeId>& node_ids() const { return ids_; }
  const std::vector<Link>& links() const { return links_; }
  bool is_euclidean() const { return euclid_speed_kmh_.has_value(); }
  std::optional<double> euclidean_speed_kmh() const { return euclid_speed_kmh_; }

  std::optional<Point> coordinates(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return coords_[it->second];
  }

  bool all_nodes_have_coordinates() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const auto& c) { return c.has_value(); });
  }

  /// Upper bound on straight-line speed (km/h) over any path: a path of
  /// travel time T never spans more than speed * T in the plane. Empty when
  /// coordinates are missing or a zero-time link spans a positive distance.
  std::optional<double> max_speed_kmh() const {
    if (is_euclidean()) return euclid_speed_kmh_;
    if (!all_nodes_have_coordinates()) return std::nullopt;
    double best = 0.0;
    for (const auto& l : links_) {
      const double span = std::max(l.len_km, rideshare::euclidean(*coordinates(l.from), *coordinates(l.to)));
      if (span == 0.0) continue;
      if (l.tt_min == 0.0) return std::nullopt;
      best = std::max(best, span / l.tt_min * 60.0);
    }
    return best > 0.0 ? std::optional<double>(best) : std::nullopt;
  }

  /// Minimum-time costs from `source` to every node, indexed like node_ids().
  /// Equal-time labels prefer the shorter distance.
  std::vector<PathCost> shortest_paths_from(NodeId source) const {
    const std::size_t n = ids_.size();
    std::vector<PathCost> best(n, PathCost{kInfinity, kInfinity});
    const std::size_t s = dense(source);
    if (is_euclidean()) {
      for (std::size_t i = 0; i < n; ++i) best[i] = straight(s, i);
      return best;
    }
    using Label = std::tuple<double, double, std::size_t>;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> open;
    best[s] = {0.0, 0.0};
    open.emplace(0.0, 0.0, s);
    std::vector<char> settled(n, 0);
    while (!open.empty()) {
      auto [t, d, u] = open.top();
      open.pop();
      if (settled[u]) continue;
      settled[u] = 1;
      for (std::size_t li : adjacency_[u]) {
        const Link& l = links_[li];
        const std::size_t v = index_.at(l.to);
        const PathCost cand{t + l.tt_min, d + l.len_km};
        if (std::tie(cand.time, cand.distance) < std::tie(best[v].time, best[v].distance)) {
          best[v] = cand;
          open.emplace(cand.time, cand.distance, v);
        }
      }
    }
    return best;
  }

  /// Minimum-travel-time path from a to b; distance is that path's length.
  PathCost shortest_path(NodeId a, NodeId b) const {
    if (!has_node(a) || !has_node(b)) throw InvalidInput("shortest_path on undeclared node");
    PathCost c = is_euclidean() ? straight(dense(a), dense(b)) : shortest_paths_from(a)[dense(b)];
    if (!c.reachable()) throw NoPath(a, b);
    return c;
  }

  std::size_t dense(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InvalidInput("unknown node id " + std::to_string(id));
    return it->second;
  }

 private:
  PathCost straight(std::size_t a, std::size_t b) const {
    const double km = rideshare::euclidean(*coords_[a], *coords_[b]);
    return {km / *euclid_speed_kmh_ * 60.0, km};
  }

  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<NodeId> ids_;
  std::vector<std::optional<Point>> coords_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Link> links_;
  std::optional<double> euclid_speed_kmh_;
};

}  // namespace rideshare
