#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rideshare/model.hpp"
#include "rideshare/network.hpp"
#include "rideshare/pipeline.hpp"

namespace rideshare {

/// Random grid batch on an implicit Euclidean network.
struct GridScenarioParams {
  std::uint64_t seed = 1;
  std::size_t drivers = 4;
  std::size_t passengers = 10;
  double half_width_km = 10.0;
  Point depot{0.0, 0.0};
  int capacity = 3;
  double max_excess_min = 30.0;  // Delta for everyone, unless excess_pct is set
  double max_wait_min = 15.0;    // Omega
  double speed_kmh = 60.0;
  bool common_depot = true;  // drivers start and end at the depot; else scattered ODs
  double departure_spread_min = 0.0;
  std::optional<double> excess_pct;  // Delta = pct% of the direct trip time
  double wait_pct = 50.0;            // with excess_pct: Omega = pct% of Delta

  void validate() const {
    if (!(half_width_km > 0.0)) throw InvalidInput("box half-width must be > 0");
    if (!(speed_kmh > 0.0)) throw InvalidInput("speed must be > 0");
    if (capacity < 1) throw InvalidInput("capacity must be >= 1");
    if (max_excess_min < 0.0 || max_wait_min < 0.0 || departure_spread_min < 0.0)
      throw InvalidInput("time limits must be >= 0");
    if (excess_pct && *excess_pct < 0.0) throw InvalidInput("excess pct must be >= 0");
    if (wait_pct < 0.0) throw InvalidInput("wait pct must be >= 0");
  }
};

/// The paper-style grid: common depot, fixed limits.
inline GridScenarioParams grid_preset() { return {}; }

/// Scattered driver ODs with percentage limits (capacity 4, 20% excess,
/// wait 50% of excess).
inline GridScenarioParams default_preset() {
  GridScenarioParams p;
  p.common_depot = false;
  p.capacity = 4;
  p.excess_pct = 20.0;
  p.wait_pct = 50.0;
  return p;
}

namespace detail {

/// Uniform in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

inline Instance generate_grid(const GridScenarioParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  const double w = params.half_width_km;
  auto coord = [&] { return -w + 2.0 * w * detail::unit(rng); };
  auto point = [&] {
    const double x = coord();
    const double y = coord();
    return Point{x, y};
  };

  auto net = std::make_shared<RoadNetwork>(RoadNetwork::euclidean(params.speed_kmh));
  NodeId next = 0;
  auto node = [&](Point p) {
    net->add_node(next, p);
    return next++;
  };
  Instance inst;
  inst.seed = params.seed;
  inst.batch = "grid-" + std::to_string(params.seed);

  std::optional<NodeId> depot;
  if (params.common_depot) depot = node(params.depot);
  for (std::size_t i = 0; i < params.drivers; ++i) {
    Driver d;
    d.id = "v" + std::to_string(i + 1);
    if (depot) {
      d.origin = d.destination = *depot;
    } else {
      d.origin = node(point());
      d.destination = node(point());
    }
    d.capacity = params.capacity;
    inst.drivers.push_back(d);
  }
  for (std::size_t j = 0; j < params.passengers; ++j) {
    Passenger p;
    p.id = "r" + std::to_string(j + 1);
    p.origin = node(point());
    p.destination = node(point());
    if (params.departure_spread_min > 0.0) p.departure = params.departure_spread_min * detail::unit(rng);
    inst.passengers.push_back(p);
  }
  const double speed = params.speed_kmh;
  auto direct = [&](NodeId a, NodeId b) {
    return euclidean(*net->coordinates(a), *net->coordinates(b)) / speed * 60.0;
  };
  for (auto& d : inst.drivers)
    d.max_excess = params.excess_pct ? *params.excess_pct / 100.0 * direct(d.origin, d.destination)
                                     : params.max_excess_min;
  for (auto& p : inst.passengers) {
    p.max_excess = params.excess_pct ? *params.excess_pct / 100.0 * direct(p.origin, p.destination)
                                     : params.max_excess_min;
    p.max_wait = params.excess_pct ? params.wait_pct / 100.0 * p.max_excess : params.max_wait_min;
  }
  inst.network = std::move(net);
  return inst;
}

enum class SweepAxis { DriverRatio, ExcessPct, Capacity, Size };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::DriverRatio: return "driver_ratio";
    case SweepAxis::ExcessPct: return "excess_pct";
    case SweepAxis::Capacity: return "capacity";
    case SweepAxis::Size: return "size";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "driver_ratio") return SweepAxis::DriverRatio;
  if (s == "excess_pct") return SweepAxis::ExcessPct;
  if (s == "capacity") return SweepAxis::Capacity;
  if (s == "size") return SweepAxis::Size;
  throw InvalidInput("unknown sweep axis " + s);
}

/// Values are strings in the axis' own notation: "1:5" for driver ratio
/// (drivers:passengers, total participants kept), "20" for excess pct,
/// "3" for capacity, "4-10" for size (drivers-passengers).
struct SweepSpec {
  SweepAxis axis = SweepAxis::ExcessPct;
  std::vector<std::string> values;
  std::size_t replications = 1;
  bool prune_only = false;  // skip combinations and assignment
  int threads = 1;          // replications in flight

  void validate() const {
    if (replications < 1) throw InvalidInput("replications must be >= 1");
    if (values.empty()) throw InvalidInput("sweep needs at least one axis value");
  }
};

struct SweepRow {
  std::string axis;
  std::string value;
  std::uint64_t seed = 0;
  StageTimes times;
  std::size_t n_combos = 0;
  double z_km = 0.0;
  double match_rate = 0.0;
  double prune_strength = 0.0;
  double mean_delta_v = 0.0;
  double mean_delta_r = 0.0;
  double mean_omega_r = 0.0;
};

inline GridScenarioParams apply_axis(GridScenarioParams p, SweepAxis axis, const std::string& value) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw InvalidInput("bad sweep value '" + value + "'");
    return v;
  };
  auto split = [&](char sep) {
    const auto at = value.find(sep);
    if (at == std::string::npos) throw InvalidInput("bad sweep value '" + value + "'");
    return std::make_pair(number(value.substr(0, at)), number(value.substr(at + 1)));
  };
  switch (axis) {
    case SweepAxis::DriverRatio: {
      const auto [a, b] = split(':');
      if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("driver ratio parts must be > 0");
      const double total = static_cast<double>(p.drivers + p.passengers);
      p.drivers = static_cast<std::size_t>(std::llround(total * a / (a + b)));
      p.passengers = static_cast<std::size_t>(total) - p.drivers;
      break;
    }
    case SweepAxis::ExcessPct: p.excess_pct = number(value); break;
    case SweepAxis::Capacity: p.capacity = static_cast<int>(number(value)); break;
    case SweepAxis::Size: {
      const auto [d, r] = split('-');
      p.drivers = static_cast<std::size_t>(d);
      p.passengers = static_cast<std::size_t>(r);
      break;
    }
  }
  return p;
}

/// One row per (value, replication). Replication k uses seed base.seed + k
/// at every axis value. Rows come back sorted by (value position, seed).
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const GridScenarioParams& base,
                                       const EngineConfig& config) {
  spec.validate();
  std::vector<SweepRow> rows(spec.values.size() * spec.replications);
  EngineConfig inner = config;
  inner.threads = 1;
  parallel_for(rows.size(), spec.threads, [&](std::size_t k) {
    const std::size_t vi = k / spec.replications;
    const std::size_t rep = k % spec.replications;
    GridScenarioParams p = apply_axis(base, spec.axis, spec.values[vi]);
    p.seed = base.seed + rep;
    const Instance inst = generate_grid(p);
    SweepRow& row = rows[k];
    row.axis = to_string(spec.axis);
    row.value = spec.values[vi];
    row.seed = p.seed;
    if (spec.prune_only) {
      const auto t0 = std::chrono::steady_clock::now();
      const PDNetwork pd = build_pd_network(inst);
      std::vector<std::vector<std::size_t>> cands(inst.drivers.size());
      for (std::size_t v = 0; v < inst.drivers.size(); ++v) cands[v] = candidate_requests(inst, pd, v, inner);
      row.times.prep_ms = row.times.total_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      row.prune_strength = prune_strength(cands, inst.passengers.size());
      row.z_km = baseline_km(inst, pd);
      return;
    }
    const BatchOutput out = match(inst, inner);
    row.times = out.times;
    row.n_combos = out.combinations;
    row.z_km = out.result.objective_km;
    row.match_rate = out.metrics.match_rate;
    row.prune_strength = out.metrics.prune_strength;
    row.mean_delta_v = out.metrics.mean_delta_v;
    row.mean_delta_r = out.metrics.mean_delta_r;
    row.mean_omega_r = out.metrics.mean_omega_r;
  });
  return rows;
}

inline constexpr const char* kSweepHeader =
    "axis,value,seed,prep_ms,combo_ms,ilp_ms,total_ms,n_combos,z_km,match_rate,prune_strength,mean_delta_v,"
    "mean_delta_r,mean_omega_r";

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_times = true) {
  std::ostringstream os;
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    auto t = [&](double v) { return with_times ? csv_number(v) : std::string("0"); };
    os << r.axis << ',' << r.value << ',' << r.seed << ',' << t(r.times.prep_ms) << ',' << t(r.times.combo_ms) << ','
       << t(r.times.ilp_ms) << ',' << t(r.times.total_ms) << ',' << r.n_combos << ',' << csv_number(r.z_km) << ','
       << csv_number(r.match_rate) << ',' << csv_number(r.prune_strength) << ',' << csv_number(r.mean_delta_v)
       << ',' << csv_number(r.mean_delta_r) << ',' << csv_number(r.mean_omega_r) << '\n';
  }
  return os.str();
}

}  // namespace rideshare
