#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "rideshare/model.hpp"
#include "rideshare/pd_network.hpp"

namespace rideshare {

class UnknownStop : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Earliest and latest arrival at a stop.
struct TimeWindow {
  double earliest = 0.0;
  double latest = 0.0;
};

struct RequestWindows {
  TimeWindow pickup;
  TimeWindow dropoff;
};

/// Pickup: [t_ED, t_ED + Omega]. Drop-off: [t_ED + tau, t_ED + Omega + tau + Delta].
inline RequestWindows time_windows(const Passenger& p, double tau) {
  return {{p.departure, p.departure + p.max_wait},
          {p.departure + tau, p.departure + p.max_wait + tau + p.max_excess}};
}

/// Driver destination window; a driver has no waiting allowance.
inline TimeWindow time_windows(const Driver& d, double tau) {
  return {d.departure + tau, d.departure + tau + d.max_excess};
}

/// What a schedule must satisfy at a stop. `deadline` is the binding upper
/// bound: for drop-offs it is t_ED + tau + Delta, since excess time already
/// includes the wait; `window.latest` is the looser linearization bound.
struct StopRule {
  TimeWindow window;
  double deadline = 0.0;
  bool enforce_earliest = false;
  int load_delta = 0;
};

/// Per-batch routing data shared read-only by every tree of the batch.
class RoutingContext {
 public:
  RoutingContext(const Instance& instance, const PDNetwork& pd, double eps = 1e-9)
      : instance_(&instance), pd_(&pd), eps_(eps), rules_(pd.size()) {
    for (std::size_t i = 0; i < instance.drivers.size(); ++i) {
      const auto& d = instance.drivers[i];
      const double tau = pd.driver_direct(i).time;
      rules_[pd.driver_origin(i)] = {{d.departure, d.departure}, d.departure, false, 0};
      const TimeWindow w = time_windows(d, tau);
      rules_[pd.driver_destination(i)] = {w, w.latest, false, 0};
    }
    for (std::size_t j = 0; j < instance.passengers.size(); ++j) {
      const auto& p = instance.passengers[j];
      const double tau = pd.passenger_direct(j).time;
      const RequestWindows w = time_windows(p, tau);
      rules_[pd.pickup(j)] = {w.pickup, w.pickup.latest, true, p.party};
      rules_[pd.dropoff(j)] = {w.dropoff, p.departure + tau + p.max_excess, false, -p.party};
    }
  }

  const Instance& instance() const { return *instance_; }
  const PDNetwork& pd() const { return *pd_; }
  double eps() const { return eps_; }
  const StopRule& rule(PdIndex n) const { return rules_[n]; }

 private:
  const Instance* instance_;
  const PDNetwork* pd_;
  double eps_;
  std::vector<StopRule> rules_;
};

/// One stop of a candidate schedule: arrival time t_v and occupancy Q_v
/// after serving the stop.
struct TreeNode {
  PdIndex stop = 0;
  double arrival = 0.0;
  int load = 0;
  std::vector<TreeNode> children;
};

enum class Infeasibility { None, TimeWindow, Capacity, NoDestinationLeaf };

inline const char* to_string(Infeasibility c) {
  switch (c) {
    case Infeasibility::None: return "none";
    case Infeasibility::TimeWindow: return "time_window";
    case Infeasibility::Capacity: return "capacity";
    case Infeasibility::NoDestinationLeaf: return "no_destination_leaf";
  }
  return "?";
}

struct ScheduleStop {
  PdIndex node = 0;
  double arrival = 0.0;
  int load = 0;
};

struct PassengerService {
  std::size_t passenger = 0;
  double pickup_time = 0.0;
  double dropoff_time = 0.0;
  double wait = 0.0;    // omega
  double excess = 0.0;  // delta, waiting included
};

struct Schedule {
  std::size_t driver = 0;
  std::vector<ScheduleStop> stops;
  double distance = 0.0;  // km
  double duration = 0.0;  // minutes, first stop to last
  double driver_excess = 0.0;
  std::vector<PassengerService> passengers;
};

struct InsertOutcome;

/// All feasible stop sequences of one driver for a fixed request set, as a
/// tree rooted at the driver's current location. Every root-to-leaf path ends
/// at the driver's destination. Trees are values: insertion returns a new tree.
class DynamicTree {
 public:
  /// Root o_v at t_ED with a single child d_v.
  static DynamicTree for_driver(const RoutingContext& ctx, std::size_t driver) {
    const PDNetwork& pd = ctx.pd();
    const auto& d = ctx.instance().drivers.at(driver);
    if (pd.driver_rejected(driver)) throw NoPath(d.origin, d.destination);
    DynamicTree t(ctx, driver);
    t.root_.stop = pd.driver_origin(driver);
    t.root_.arrival = d.departure;
    t.root_.load = 0;
    const PdIndex dest = pd.driver_destination(driver);
    t.root_.children.push_back({dest, d.departure + pd.time(t.root_.stop, dest), 0, {}});
    return t;
  }

  /// Inserts the pickup/drop-off pair of `passenger` at every feasible
  /// position. The pickup is placed first and the drop-off only below it.
  /// Pickup positions past a deadline violation are never tried (arrival
  /// times only grow down a path); a capacity-blocked pickup is retried
  /// deeper, after drop-offs.
  InsertOutcome insert_request(std::size_t passenger) const;

  /// Minimum-distance complete schedule; ties go to the shorter duration,
  /// then the lexicographically smaller stop sequence.
  std::optional<Schedule> best_schedule() const {
    std::vector<const TreeNode*> best_path;
    double best_distance = kInfinity;
    std::vector<PdIndex> best_seq;
    for_each_schedule([&](const std::vector<const TreeNode*>& p) {
      double dist = 0.0;
      for (std::size_t k = 1; k < p.size(); ++k) dist += ctx_->pd().distance(p[k - 1]->stop, p[k]->stop);
      std::vector<PdIndex> seq;
      seq.reserve(p.size());
      for (const auto* n : p) seq.push_back(n->stop);
      const double dur = p.back()->arrival - p.front()->arrival;
      const double best_dur = best_path.empty() ? kInfinity : best_path.back()->arrival - best_path.front()->arrival;
      if (best_path.empty() || std::tie(dist, dur, seq) < std::tie(best_distance, best_dur, best_seq)) {
        best_distance = dist;
        best_path = p;
        best_seq = std::move(seq);
      }
    });
    if (best_path.empty()) return std::nullopt;
    return make_schedule(best_path);
  }

  /// The driver reached `reached` (a child of the root); it becomes the new
  /// root and every sibling branch is dropped.
  DynamicTree advance_root(PdIndex reached) const {
    for (const auto& c : root_.children) {
      if (c.stop != reached) continue;
      DynamicTree out(*ctx_, driver_);
      out.requests_ = requests_;
      out.root_ = c;
      return out;
    }
    throw UnknownStop("stop " + std::to_string(reached) + " is not a child of the root");
  }

  /// Calls f(path) for every root-to-destination path.
  template <class F>
  void for_each_schedule(F&& f) const {
    std::vector<const TreeNode*> path;
    walk(root_, path, f);
  }

  std::size_t schedule_count() const {
    std::size_t n = 0;
    count(root_, n, true);
    return n;
  }

  std::size_t node_count() const {
    std::size_t n = 0;
    count(root_, n, false);
    return n;
  }

  const TreeNode& root() const { return root_; }
  std::size_t driver() const { return driver_; }
  const std::vector<std::size_t>& requests() const { return requests_; }
  const RoutingContext& context() const { return *ctx_; }

  Schedule make_schedule(const std::vector<const TreeNode*>& path) const {
    const PDNetwork& pd = ctx_->pd();
    const Instance& inst = ctx_->instance();
    Schedule s;
    s.driver = driver_;
    for (std::size_t k = 0; k < path.size(); ++k) {
      s.stops.push_back({path[k]->stop, path[k]->arrival, path[k]->load});
      if (k > 0) s.distance += pd.distance(path[k - 1]->stop, path[k]->stop);
    }
    s.duration = path.back()->arrival - path.front()->arrival;
    const auto& d = inst.drivers[driver_];
    s.driver_excess = path.back()->arrival - d.departure - pd.driver_direct(driver_).time;
    for (std::size_t r : requests_) {
      const auto& p = inst.passengers[r];
      PassengerService svc{r, kInfinity, kInfinity, 0.0, 0.0};
      for (const auto* n : path) {
        if (n->stop == pd.pickup(r)) svc.pickup_time = n->arrival;
        if (n->stop == pd.dropoff(r)) svc.dropoff_time = n->arrival;
      }
      if (!std::isfinite(svc.pickup_time) || !std::isfinite(svc.dropoff_time)) continue;
      svc.wait = svc.pickup_time - p.departure;
      svc.excess = svc.dropoff_time - p.departure - pd.passenger_direct(r).time;
      s.passengers.push_back(svc);
    }
    return s;
  }

  /// Nested JSON dump: stop, owner id, kind, t, Q, children.
  nlohmann::json dump() const { return dump_node(root_); }

 private:
  DynamicTree(const RoutingContext& ctx, std::size_t driver) : ctx_(&ctx), driver_(driver) {}

  enum class Check { Ok, Late, Early, Capacity };

  struct Inserter {
    const RoutingContext& ctx;
    PdIndex pickup;
    PdIndex dropoff;
    int cap = 0;
    std::size_t time_failures = 0;
    std::size_t capacity_failures = 0;

    Check check(PdIndex stop, double t, int load, int cap) {
      const StopRule& r = ctx.rule(stop);
      if (t > r.deadline + ctx.eps()) {
        ++time_failures;
        return Check::Late;
      }
      if (r.enforce_earliest && t < r.window.earliest - ctx.eps()) {
        ++time_failures;
        return Check::Early;
      }
      if (load > cap || load < 0) {
        ++capacity_failures;
        return Check::Capacity;
      }
      return Check::Ok;
    }

    TreeNode at(PdIndex stop, const TreeNode& parent) const {
      return {stop, parent.arrival + ctx.pd().time(parent.stop, stop), parent.load + ctx.rule(stop).load_delta, {}};
    }

    // `copy` mirrors `old` (unchanged time and load); the pickup is not yet placed.
    bool before(const TreeNode& old, TreeNode& copy) {
      if (old.children.empty()) return false;
      bool any = false;
      TreeNode p = at(pickup, copy);
      switch (check(pickup, p.arrival, p.load, cap)) {
        case Check::Late:
          return false;  // every deeper pickup position arrives later still
        case Check::Ok:
          if (onboard(old.children, p)) {
            copy.children.push_back(std::move(p));
            any = true;
          }
          break;
        case Check::Early:
        case Check::Capacity:
          break;
      }
      for (const auto& c : old.children) {
        TreeNode cc{c.stop, c.arrival, c.load, {}};
        if (before(c, cc)) {
          copy.children.push_back(std::move(cc));
          any = true;
        }
      }
      return any;
    }

    // `cur` is the inserted pickup or a shifted copy carrying the new
    // passenger; `rest` are the old stops still to visit.
    bool onboard(const std::vector<TreeNode>& rest, TreeNode& cur) {
      TreeNode d = at(dropoff, cur);
      const Check cd = check(dropoff, d.arrival, d.load, cap);
      if (cd == Check::Late) return false;  // the drop-off only gets later below
      bool any = false;
      if (cd == Check::Ok && done(rest, d)) {
        cur.children.push_back(std::move(d));
        any = true;
      }
      for (const auto& c : rest) {
        if (c.children.empty()) continue;  // destination must stay last
        TreeNode cc = at(c.stop, cur);
        if (check(c.stop, cc.arrival, cc.load, cap) != Check::Ok) continue;
        if (onboard(c.children, cc)) {
          cur.children.push_back(std::move(cc));
          any = true;
        }
      }
      return any;
    }

    // Both new stops placed: re-time the remaining old stops.
    bool done(const std::vector<TreeNode>& rest, TreeNode& cur) {
      bool any = false;
      for (const auto& c : rest) {
        TreeNode cc = at(c.stop, cur);
        if (check(c.stop, cc.arrival, cc.load, cap) != Check::Ok) continue;
        if (c.children.empty() || done(c.children, cc)) {
          cur.children.push_back(std::move(cc));
          any = true;
        }
      }
      return any;
    }
  };

  template <class F>
  static void walk(const TreeNode& n, std::vector<const TreeNode*>& path, F& f) {
    path.push_back(&n);
    if (n.children.empty()) {
      f(path);
    } else {
      for (const auto& c : n.children) walk(c, path, f);
    }
    path.pop_back();
  }

  static void count(const TreeNode& n, std::size_t& acc, bool leaves_only) {
    if (!leaves_only || n.children.empty()) ++acc;
    for (const auto& c : n.children) count(c, acc, leaves_only);
  }

  nlohmann::json dump_node(const TreeNode& n) const {
    const PdNode& pn = ctx_->pd().node(n.stop);
    const bool driver = pn.is_driver_node();
    nlohmann::json j;
    j["stop"] = n.stop;
    j["kind"] = to_string(pn.kind);
    j["owner"] = driver ? ctx_->instance().drivers[pn.owner].id : ctx_->instance().passengers[pn.owner].id;
    j["t"] = n.arrival;
    j["Q"] = n.load;
    j["children"] = nlohmann::json::array();
    for (const auto& c : n.children) j["children"].push_back(dump_node(c));
    return j;
  }

  const RoutingContext* ctx_;
  std::size_t driver_ = 0;
  std::vector<std::size_t> requests_;
  TreeNode root_;
};

struct InsertOutcome {
  std::optional<DynamicTree> tree;
  Infeasibility cause = Infeasibility::None;

  explicit operator bool() const { return tree.has_value(); }
};

inline InsertOutcome DynamicTree::insert_request(std::size_t passenger) const {
  const PDNetwork& pd = ctx_->pd();
  Inserter ins{*ctx_, pd.pickup(passenger), pd.dropoff(passenger), ctx_->instance().drivers[driver_].capacity};
  DynamicTree out(*ctx_, driver_);
  out.requests_ = requests_;
  out.requests_.push_back(passenger);
  out.root_ = {root_.stop, root_.arrival, root_.load, {}};
  if (!ins.before(root_, out.root_)) {
    Infeasibility cause = Infeasibility::NoDestinationLeaf;
    if (ins.time_failures > 0) cause = Infeasibility::TimeWindow;
    else if (ins.capacity_failures > 0) cause = Infeasibility::Capacity;
    return {std::nullopt, cause};
  }
  return {std::move(out), Infeasibility::None};
}

}  // namespace rideshare
