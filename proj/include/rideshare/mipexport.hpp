#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rideshare/assign.hpp"
#include "rideshare/dtree.hpp"
#include "rideshare/pd_network.hpp"
#include "rideshare/pruning.hpp"

namespace rideshare {

struct MipVariable {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool binary = false;
};

struct MipTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct MipRow {
  std::string name;
  int equation = 0;  // constraint family, numbered as in the formulation
  std::vector<MipTerm> terms;
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
};

/// Arc (a, b) of one driver with its linearization constants.
struct MipArc {
  std::size_t driver = 0;
  PdIndex from = 0;
  PdIndex to = 0;
  std::size_t x = 0;
  double tt = 0.0;
  double length = 0.0;
  double m1 = 0.0;  // tt + LT(a) - ET(b), driver windows
  double m2 = 0.0;  // tt + LT(b) - ET(a)
  double w = 0.0;   // min(c, c + q_a)
};

/// Linearized routing-and-assignment model over per-driver node sets
/// {o_v, d_v} plus the pickup/drop-off nodes of the driver's candidates.
struct MipModel {
  std::vector<MipVariable> variables;
  std::vector<MipTerm> objective;
  std::vector<MipRow> rows;
  std::vector<MipArc> arcs;
  std::map<std::tuple<std::size_t, PdIndex, PdIndex>, std::size_t> x_index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> z_index;
  std::map<std::pair<std::size_t, PdIndex>, std::size_t> t_index;
  std::map<std::pair<std::size_t, PdIndex>, std::size_t> q_index;
  std::vector<std::vector<PdIndex>> driver_nodes;
  std::size_t constant = 0;  // fixed at 1, carries the unmatched-passenger constant

  std::size_t x_count() const { return x_index.size(); }
  std::size_t z_count() const { return z_index.size(); }
  std::size_t t_count() const { return t_index.size(); }
  std::size_t q_count() const { return q_index.size(); }

  std::string to_lp() const;
};

/// Arrival bounds for one driver's copy of its nodes: the declared window
/// cut by the deadline, by reachability from o_v, and by the time still
/// needed to reach d_v (and, for a pickup, its own drop-off).
using DriverWindows = std::map<PdIndex, TimeWindow>;

/// With `tighten` off these are the declared windows.
inline DriverWindows driver_windows(const PDNetwork& pd, const RoutingContext& ctx, std::size_t v,
                                    const std::vector<std::size_t>& requests, bool tighten = true) {
  const PdIndex ov = pd.driver_origin(v);
  const PdIndex dv = pd.driver_destination(v);
  const double start = ctx.rule(ov).window.earliest;
  const double finish = ctx.rule(dv).deadline;
  DriverWindows w;
  auto bound = [&](PdIndex n) {
    const StopRule& r = ctx.rule(n);
    if (!tighten) return r.window;
    TimeWindow t{std::max(r.window.earliest, start + pd.time(ov, n)),
                 std::min({r.window.latest, r.deadline, finish - pd.time(n, dv)})};
    return t;
  };
  w[ov] = ctx.rule(ov).window;
  w[dv] = bound(dv);
  for (std::size_t j : requests) {
    const PdIndex o = pd.pickup(j), d = pd.dropoff(j);
    TimeWindow a = bound(o), b = bound(d);
    if (tighten) {
      b.earliest = std::max(b.earliest, a.earliest + pd.time(o, d));
      a.latest = std::min(a.latest, b.latest - pd.time(o, d));
    }
    w[o] = a;
    w[d] = b;
  }
  return w;
}

inline bool window_open(const TimeWindow& w, double eps) { return w.earliest <= w.latest + eps; }

/// Whether a driver can ever use arc (a, b) given its windows `w`: precedence
/// within one request, seats, and whether a, b and the partner stops of
/// their requests still fit in time.
inline bool arc_usable(const PDNetwork& pd, const RoutingContext& ctx, int capacity, const DriverWindows& w,
                       PdIndex a, PdIndex b) {
  const PdNode& na = pd.node(a);
  const PdNode& nb = pd.node(b);
  if (na.kind == StopKind::Dropoff && nb.kind == StopKind::Pickup && na.owner == nb.owner) return false;
  if (na.kind == StopKind::DriverOrigin && nb.kind == StopKind::Dropoff) return false;
  if (na.kind == StopKind::Pickup && nb.kind == StopKind::DriverDestination) return false;
  const int qa = ctx.rule(a).load_delta;
  const int qb = ctx.rule(b).load_delta;
  if (qa > 0 && qb > 0 && qa + qb > capacity) return false;
  if (qa > 0 && qb < 0 && na.owner != nb.owner && qa - qb > capacity) return false;
  const double eps = ctx.eps();
  const double at_b = w.at(a).earliest + pd.time(a, b);
  if (at_b > w.at(b).latest + eps) return false;
  if (na.kind == StopKind::Pickup && !(nb.kind == StopKind::Dropoff && nb.owner == na.owner)) {
    const PdIndex d = pd.dropoff(na.owner);
    if (at_b + pd.time(b, d) > w.at(d).latest + eps) return false;
  }
  if (nb.kind == StopKind::Dropoff && !(na.kind == StopKind::Pickup && na.owner == nb.owner)) {
    const PdIndex o = pd.pickup(nb.owner);
    if (w.at(o).earliest + pd.time(o, a) + pd.time(a, b) > w.at(b).latest + eps) return false;
  }
  return true;
}

/// `max_requests` adds a per-driver row limiting the served request count.
/// `tighten` selects driver windows over the declared ones.
inline MipModel build_mip(const Instance& inst, const PDNetwork& pd, const RoutingContext& ctx,
                          const std::vector<std::vector<std::size_t>>& candidates,
                          std::optional<int> max_requests = std::nullopt, bool tighten = true) {
  MipModel m;
  auto var = [&](std::string name, double lb, double ub, bool binary) {
    m.variables.push_back({std::move(name), lb, ub, binary});
    return m.variables.size() - 1;
  };
  auto suffix = [](std::size_t v) { return "v" + std::to_string(v); };
  auto load_delta = [&](PdIndex n) { return ctx.rule(n).load_delta; };

  m.constant = var("one", 1.0, 1.0, false);
  double constant = 0.0;
  for (std::size_t j = 0; j < inst.passengers.size(); ++j)
    if (!pd.passenger_rejected(j)) constant += pd.passenger_direct(j).distance;
  std::map<std::size_t, double> obj;
  obj[m.constant] += constant;

  m.driver_nodes.assign(inst.drivers.size(), {});
  std::map<PdIndex, std::vector<std::size_t>> inflow_any;  // eq 9
  for (std::size_t v = 0; v < inst.drivers.size(); ++v) {
    if (pd.driver_rejected(v)) continue;
    const Driver& drv = inst.drivers[v];
    const PdIndex ov = pd.driver_origin(v);
    const PdIndex dv = pd.driver_destination(v);
    auto& nodes = m.driver_nodes[v];
    nodes.push_back(ov);
    std::vector<std::size_t> reqs;
    for (std::size_t j : candidates[v])
      if (!pd.passenger_rejected(j)) reqs.push_back(j);
    std::sort(reqs.begin(), reqs.end());
    DriverWindows win = driver_windows(pd, ctx, v, reqs, tighten);
    std::erase_if(reqs, [&](std::size_t j) {
      return !window_open(win[pd.pickup(j)], ctx.eps()) || !window_open(win[pd.dropoff(j)], ctx.eps());
    });
    for (auto& [n, w] : win) w.latest = std::max(w.latest, w.earliest);
    for (std::size_t j : reqs) {
      nodes.push_back(pd.pickup(j));
      nodes.push_back(pd.dropoff(j));
    }
    nodes.push_back(dv);

    for (PdIndex n : nodes) {
      const std::string tag = suffix(v) + "_" + std::to_string(n);
      m.t_index[{v, n}] = var("t_" + tag, win[n].earliest, win[n].latest, false);
      const int q = load_delta(n);
      const double qub = n == ov ? 0.0 : std::min(drv.capacity, drv.capacity + q);
      m.q_index[{v, n}] = var("Q_" + tag, std::max(0, q), qub, false);
    }
    for (std::size_t j : reqs) m.z_index[{v, j}] = var("z_" + suffix(v) + "_" + std::to_string(j), 0, 1, true);

    for (PdIndex a : nodes) {
      for (PdIndex b : nodes) {
        if (a == b || a == dv || b == ov) continue;
        if (!arc_usable(pd, ctx, drv.capacity, win, a, b)) continue;
        MipArc arc;
        arc.driver = v;
        arc.from = a;
        arc.to = b;
        arc.tt = pd.time(a, b);
        arc.length = pd.distance(a, b);
        arc.m1 = arc.tt + win[a].latest - win[b].earliest;
        arc.m2 = arc.tt + win[b].latest - win[a].earliest;
        arc.w = std::min(drv.capacity, drv.capacity + load_delta(a));
        arc.x = var("x_" + suffix(v) + "_" + std::to_string(a) + "_" + std::to_string(b), 0, 1, true);
        m.x_index[{v, a, b}] = arc.x;
        obj[arc.x] += arc.length;
        if (pd.node(b).kind == StopKind::Dropoff) obj[arc.x] -= pd.passenger_direct(pd.node(b).owner).distance;
        if (!pd.node(b).is_driver_node()) inflow_any[b].push_back(arc.x);
        m.arcs.push_back(arc);
      }
    }
  }
  for (const auto& [v, c] : obj) m.objective.push_back({v, c});

  auto row = [&](std::string name, int eq, std::vector<MipTerm> terms, RowSense s, double rhs) {
    m.rows.push_back({std::move(name), eq, std::move(terms), s, rhs});
  };

  const auto reqs_of = [&](std::size_t v) { return (m.driver_nodes[v].size() - 2) / 2; };
  for (std::size_t v = 0; v < inst.drivers.size(); ++v) {
    if (pd.driver_rejected(v)) continue;
    const Driver& drv = inst.drivers[v];
    const PdIndex ov = pd.driver_origin(v);
    const PdIndex dv = pd.driver_destination(v);
    const auto& nodes = m.driver_nodes[v];
    const std::string sv = suffix(v);
    std::vector<MipTerm> out_o, in_d;
    for (PdIndex n : nodes) {
      if (auto it = m.x_index.find({v, ov, n}); it != m.x_index.end()) out_o.push_back({it->second, 1.0});
      if (auto it = m.x_index.find({v, n, dv}); it != m.x_index.end()) in_d.push_back({it->second, 1.0});
    }
    row("c10o_" + sv, 10, out_o, RowSense::Equal, 1.0);
    row("c10d_" + sv, 10, in_d, RowSense::Equal, 1.0);

    for (PdIndex b : nodes) {
      if (pd.node(b).is_driver_node()) continue;
      const std::size_t j = pd.node(b).owner;
      const std::size_t z = m.z_index.at({v, j});
      std::vector<MipTerm> in{{z, -1.0}}, out{{z, -1.0}};
      for (PdIndex a : nodes) {
        if (auto it = m.x_index.find({v, a, b}); it != m.x_index.end()) in.push_back({it->second, 1.0});
        if (auto it = m.x_index.find({v, b, a}); it != m.x_index.end()) out.push_back({it->second, 1.0});
      }
      row("c8in_" + sv + "_" + std::to_string(b), 8, in, RowSense::Equal, 0.0);
      row("c8out_" + sv + "_" + std::to_string(b), 8, out, RowSense::Equal, 0.0);
    }

    if (max_requests && reqs_of(v) > static_cast<std::size_t>(*max_requests)) {
      std::vector<MipTerm> zs;
      for (PdIndex b : nodes)
        if (pd.node(b).kind == StopKind::Pickup) zs.push_back({m.z_index.at({v, pd.node(b).owner}), 1.0});
      row("cm_" + sv, 0, zs, RowSense::LessEqual, *max_requests);
    }

    const auto tv = [&](PdIndex n) { return m.t_index.at({v, n}); };
    const auto lo = [&](PdIndex n) { return m.variables[tv(n)].lb; };
    const auto hi = [&](PdIndex n) { return m.variables[tv(n)].ub; };
    const auto qv = [&](PdIndex n) { return m.q_index.at({v, n}); };
    row("c11_" + sv + "_drv", 11, {{tv(dv), 1.0}, {tv(ov), -1.0}}, RowSense::GreaterEqual, 0.0);
    row("c14_" + sv + "_drv", 14, {{tv(dv), 1.0}}, RowSense::LessEqual,
        drv.departure + pd.driver_direct(v).time + drv.max_excess);
    for (PdIndex b : nodes) {
      if (pd.node(b).kind != StopKind::Pickup) continue;
      const std::size_t j = pd.node(b).owner;
      const Passenger& p = inst.passengers[j];
      const PdIndex d = pd.dropoff(j);
      const std::size_t z = m.z_index.at({v, j});
      const std::string sj = sv + "_r" + std::to_string(j);
      const double big11 = std::max(0.0, hi(b) - lo(d));
      row("c11_" + sj, 11, {{tv(d), 1.0}, {tv(b), -1.0}, {z, -big11}}, RowSense::GreaterEqual, -big11);
      row("c12_" + sj, 12, {{tv(b), 1.0}}, RowSense::GreaterEqual, p.departure);
      row("c13_" + sj, 13, {{tv(b), 1.0}}, RowSense::LessEqual, p.departure + p.max_wait);
      const double deadline = p.departure + pd.passenger_direct(j).time + p.max_excess;
      const double big14 = std::max(0.0, hi(d) - deadline);
      row("c14_" + sj, 14, {{tv(d), 1.0}, {z, big14}}, RowSense::LessEqual, deadline + big14);
    }
    for (const auto& arc : m.arcs) {
      if (arc.driver != v) continue;
      const std::string sa = sv + "_" + std::to_string(arc.from) + "_" + std::to_string(arc.to);
      row("c16_" + sa, 16, {{tv(arc.to), 1.0}, {tv(arc.from), -1.0}, {arc.x, -arc.m1}}, RowSense::GreaterEqual,
          arc.tt - arc.m1);
      row("c17_" + sa, 17, {{tv(arc.to), 1.0}, {tv(arc.from), -1.0}, {arc.x, arc.m2}}, RowSense::LessEqual,
          arc.tt + arc.m2);
      row("c22_" + sa, 22, {{qv(arc.to), 1.0}, {qv(arc.from), -1.0}, {arc.x, -arc.w}}, RowSense::GreaterEqual,
          load_delta(arc.to) - arc.w);
    }
  }
  for (const auto& [b, xs] : inflow_any) {
    std::vector<MipTerm> terms;
    for (std::size_t x : xs) terms.push_back({x, 1.0});
    row("c9_" + std::to_string(b), 9, terms, RowSense::LessEqual, 1.0);
  }
  return m;
}

namespace detail {

inline std::string lp_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void lp_terms(std::ostringstream& os, const std::vector<MipTerm>& terms, const std::vector<MipVariable>& vars) {
  if (terms.empty()) {
    os << " 0 " << vars.front().name;
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].coef;
    if (k > 0 && k % 6 == 0) os << "\n   ";
    os << (c < 0 ? " - " : " + ") << lp_number(std::fabs(c)) << ' ' << vars[terms[k].var].name;
  }
}

}  // namespace detail

/// CPLEX-LP text: objective, constraint rows, bounds, binaries.
inline std::string MipModel::to_lp() const {
  std::ostringstream os;
  os << "\\ ride-sharing matching model\n";
  os << "Minimize\n obj:";
  detail::lp_terms(os, objective, variables);
  os << "\nSubject To\n";
  for (const auto& r : rows) {
    os << ' ' << r.name << ':';
    detail::lp_terms(os, r.terms, variables);
    os << (r.sense == RowSense::LessEqual ? " <= " : r.sense == RowSense::GreaterEqual ? " >= " : " = ")
       << detail::lp_number(r.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : variables) {
    if (v.binary) continue;
    if (v.lb == v.ub) os << ' ' << v.name << " = " << detail::lp_number(v.lb) << '\n';
    else os << ' ' << detail::lp_number(v.lb) << " <= " << v.name << " <= " << detail::lp_number(v.ub) << '\n';
  }
  os << "Binaries\n";
  std::size_t k = 0;
  for (const auto& v : variables) {
    if (!v.binary) continue;
    os << ' ' << v.name;
    if (++k % 8 == 0) os << '\n';
  }
  os << "\nEnd\n";
  return os.str();
}

/// Candidate sets used for export: the pruned sets, or every passenger
/// for every driver when `full_model` is set.
inline std::vector<std::vector<std::size_t>> model_candidates(const Instance& inst, const PDNetwork& pd,
                                                              const EngineConfig& config, bool full_model) {
  EngineConfig c = config;
  if (full_model) c.prune = false;
  std::vector<std::vector<std::size_t>> out(inst.drivers.size());
  for (std::size_t v = 0; v < inst.drivers.size(); ++v) out[v] = candidate_requests(inst, pd, v, c);
  return out;
}

inline std::string export_mip(const Instance& inst, const PDNetwork& pd, const EngineConfig& config,
                              bool full_model) {
  RoutingContext ctx(inst, pd, config.eps);
  return build_mip(inst, pd, ctx, model_candidates(inst, pd, config, full_model), config.max_combo_size).to_lp();
}

struct VerifyReport {
  bool pass = true;
  std::size_t rows_checked = 0;
  std::vector<std::string> violations;
};

/// Plugs a match result into the model: x from consecutive stops, z from the
/// served requests, t and Q from the schedules (window start and lowest load
/// for unvisited nodes). Checks bounds, every linear row, and the
/// nonlinear arrival (5) and occupancy (6) definitions along each route.
inline VerifyReport verify_solution(const Instance& inst, const PDNetwork& pd, const MatchResult& result,
                                    const EngineConfig& config, bool full_model = false) {
  VerifyReport rep;
  RoutingContext ctx(inst, pd, config.eps);
  auto cands = model_candidates(inst, pd, config, full_model);
  for (const auto& s : result.selected)
    for (std::size_t r : s.requests)
      if (!std::binary_search(cands[s.driver].begin(), cands[s.driver].end(), r)) {
        cands[s.driver].push_back(r);
        std::sort(cands[s.driver].begin(), cands[s.driver].end());
      }
  const MipModel m = build_mip(inst, pd, ctx, cands, config.max_combo_size);
  const double eps = config.eps;
  auto fail = [&](std::string what) {
    rep.pass = false;
    rep.violations.push_back(std::move(what));
  };

  std::vector<double> val(m.variables.size(), 0.0);
  for (std::size_t i = 0; i < m.variables.size(); ++i) val[i] = m.variables[i].binary ? 0.0 : m.variables[i].lb;

  std::vector<std::vector<ScheduleStop>> routes(inst.drivers.size());
  for (std::size_t v = 0; v < inst.drivers.size(); ++v) {
    if (pd.driver_rejected(v)) continue;
    const PdIndex ov = pd.driver_origin(v);
    const PdIndex dv = pd.driver_destination(v);
    routes[v] = {{ov, inst.drivers[v].departure, 0}, {dv, inst.drivers[v].departure + pd.time(ov, dv), 0}};
  }
  for (const auto& s : result.selected) {
    routes[s.driver] = s.schedule.stops;
    for (std::size_t r : s.requests) {
      auto it = m.z_index.find({s.driver, r});
      if (it == m.z_index.end()) fail("z: request " + std::to_string(r) + " not in driver model");
      else val[it->second] = 1.0;
    }
  }
  for (std::size_t v = 0; v < routes.size(); ++v) {
    const auto& st = routes[v];
    if (st.empty()) continue;
    for (std::size_t k = 0; k < st.size(); ++k) {
      auto t = m.t_index.find({v, st[k].node});
      auto q = m.q_index.find({v, st[k].node});
      if (t == m.t_index.end() || q == m.q_index.end()) {
        fail("route of driver " + std::to_string(v) + " visits node " + std::to_string(st[k].node) +
             " outside its model");
        continue;
      }
      val[t->second] = st[k].arrival;
      val[q->second] = st[k].load;
      if (k == 0) continue;
      auto x = m.x_index.find({v, st[k - 1].node, st[k].node});
      if (x == m.x_index.end()) fail("arc missing from model");
      else val[x->second] += 1.0;
      const double expect_t = st[k - 1].arrival + pd.time(st[k - 1].node, st[k].node);
      if (std::fabs(st[k].arrival - expect_t) > eps)
        fail("c5_v" + std::to_string(v) + "_" + std::to_string(st[k].node) + ": arrival " +
             detail::lp_number(st[k].arrival) + " != " + detail::lp_number(expect_t));
      if (st[k].load != st[k - 1].load + ctx.rule(st[k].node).load_delta)
        fail("c6_v" + std::to_string(v) + "_" + std::to_string(st[k].node) + ": occupancy mismatch");
    }
    if (st.front().node != pd.driver_origin(v) || st.back().node != pd.driver_destination(v))
      fail("route of driver " + std::to_string(v) + " does not run origin to destination");
  }
  for (std::size_t j = 0; j < inst.passengers.size(); ++j) {
    ++rep.rows_checked;
    if (ctx.rule(pd.pickup(j)).load_delta + ctx.rule(pd.dropoff(j)).load_delta != 0)
      fail("c7_r" + std::to_string(j) + ": load not conserved");
  }

  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    const auto& v = m.variables[i];
    ++rep.rows_checked;
    if (val[i] < v.lb - eps || val[i] > v.ub + eps)
      fail("bound_" + v.name + ": " + detail::lp_number(val[i]) + " outside [" + detail::lp_number(v.lb) + ", " +
           detail::lp_number(v.ub) + "]");
  }
  for (const auto& r : m.rows) {
    ++rep.rows_checked;
    double lhs = 0.0;
    for (const auto& t : r.terms) lhs += t.coef * val[t.var];
    const double tol = eps * std::max(1.0, std::fabs(r.rhs));
    const bool ok = r.sense == RowSense::LessEqual      ? lhs <= r.rhs + tol
                    : r.sense == RowSense::GreaterEqual ? lhs >= r.rhs - tol
                                                        : std::fabs(lhs - r.rhs) <= tol;
    if (!ok) fail(r.name + ": lhs " + detail::lp_number(lhs) + " vs rhs " + detail::lp_number(r.rhs));
  }
  return rep;
}

}  // namespace rideshare
