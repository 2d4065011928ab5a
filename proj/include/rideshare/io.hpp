#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "rideshare/assign.hpp"
#include "rideshare/model.hpp"
#include "rideshare/network.hpp"
#include "rideshare/pd_network.hpp"
#include "rideshare/pipeline.hpp"

// JSON formats.
//
// Network:  {"nodes": [{"id", "x", "y"}], "links": [{"from", "to", "tt_min", "len_km"}]}
//           or {"type": "euclidean", "speed_kmh": 60, "nodes": [...]}
// Instance: {"batch", "seed", "network": <network object or file path>,
//            "drivers": [{"id", "o", "d", "t_ed", "cap", "delta"}],
//            "passengers": [{"id", "o", "d", "t_ed", "delta", "omega", "q"}]}
// "o"/"d" are node ids, or [x, y] on a Euclidean network. Missing
// "delta"/"omega" stay unset.

namespace rideshare {

using json = nlohmann::json;

/// Unreadable file or malformed document.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(what + ": " + e.what());
  }
}

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw IoError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError(where + ": bad value for \"" + key + "\"");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, where);
}

inline void read_nodes(RoadNetwork& net, const json& j) {
  if (!j.contains("nodes")) return;
  for (const auto& n : j.at("nodes")) {
    std::optional<Point> at;
    if (n.contains("x") && n.contains("y")) at = Point{field<double>(n, "x", "node"), field<double>(n, "y", "node")};
    net.add_node(field<NodeId>(n, "id", "node"), at);
  }
}

}  // namespace detail

inline RoadNetwork network_from_json(const json& j) {
  if (!j.is_object()) throw IoError("network must be an object");
  if (j.value("type", std::string()) == "euclidean") {
    RoadNetwork net = RoadNetwork::euclidean(detail::field<double>(j, "speed_kmh", "network"));
    detail::read_nodes(net, j);
    return net;
  }
  RoadNetwork net;
  detail::read_nodes(net, j);
  if (j.contains("links"))
    for (const auto& l : j.at("links"))
      net.add_link(detail::field<NodeId>(l, "from", "link"), detail::field<NodeId>(l, "to", "link"),
                   detail::field<double>(l, "tt_min", "link"), detail::field<double>(l, "len_km", "link"));
  return net;
}

inline json network_to_json(const RoadNetwork& net) {
  json j;
  json nodes = json::array();
  for (NodeId id : net.node_ids()) {
    json n{{"id", id}};
    if (auto p = net.coordinates(id)) {
      n["x"] = p->x;
      n["y"] = p->y;
    }
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  if (net.is_euclidean()) {
    j["type"] = "euclidean";
    j["speed_kmh"] = *net.euclidean_speed_kmh();
    return j;
  }
  json links = json::array();
  for (const auto& l : net.links())
    links.push_back({{"from", l.from}, {"to", l.to}, {"tt_min", l.tt_min}, {"len_km", l.len_km}});
  j["links"] = links;
  return j;
}

/// `base_dir` resolves a network given as a relative file path.
inline Instance instance_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw IoError("instance must be an object");
  Instance inst;
  inst.batch = detail::field_or<std::string>(j, "batch", "batch", "instance");
  inst.seed = detail::field_or<std::uint64_t>(j, "seed", 0, "instance");
  if (!j.contains("network")) throw IoError("instance: missing \"network\"");
  const json& nj = j.at("network");
  auto net = std::make_shared<RoadNetwork>(
      nj.is_string() ? network_from_json(parse_json(read_text(base_dir / nj.get<std::string>()), "network file"))
                     : network_from_json(nj));
  NodeId next = 0;
  for (NodeId id : net->node_ids()) next = std::max(next, id + 1);
  auto location = [&](const json& p, const char* key, const std::string& who) -> NodeId {
    if (!p.contains(key)) throw IoError(who + ": missing \"" + key + "\"");
    const json& v = p.at(key);
    if (v.is_number_integer()) return v.get<NodeId>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      if (!net->is_euclidean()) throw InvalidInput(who + ": coordinates need a euclidean network");
      net->add_node(next, Point{v[0].get<double>(), v[1].get<double>()});
      return next++;
    }
    throw IoError(who + ": \"" + key + "\" must be a node id or [x, y]");
  };
  for (const auto& d : j.value("drivers", json::array())) {
    Driver v;
    v.id = detail::field<std::string>(d, "id", "driver");
    v.origin = location(d, "o", v.id);
    v.destination = location(d, "d", v.id);
    v.departure = detail::field_or<double>(d, "t_ed", 0.0, v.id);
    v.capacity = detail::field_or<int>(d, "cap", 1, v.id);
    v.max_excess = detail::field_or<double>(d, "delta", kUnset, v.id);
    inst.drivers.push_back(v);
  }
  for (const auto& p : j.value("passengers", json::array())) {
    Passenger r;
    r.id = detail::field<std::string>(p, "id", "passenger");
    r.origin = location(p, "o", r.id);
    r.destination = location(p, "d", r.id);
    r.departure = detail::field_or<double>(p, "t_ed", 0.0, r.id);
    r.max_excess = detail::field_or<double>(p, "delta", kUnset, r.id);
    r.max_wait = detail::field_or<double>(p, "omega", kUnset, r.id);
    r.party = detail::field_or<int>(p, "q", 1, r.id);
    inst.passengers.push_back(r);
  }
  inst.network = std::move(net);
  return inst;
}

inline json instance_to_json(const Instance& inst) {
  auto limit = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json j;
  j["batch"] = inst.batch;
  j["seed"] = inst.seed;
  j["network"] = network_to_json(*inst.network);
  json ds = json::array();
  for (const auto& d : inst.drivers)
    ds.push_back({{"id", d.id},
                  {"o", d.origin},
                  {"d", d.destination},
                  {"t_ed", d.departure},
                  {"cap", d.capacity},
                  {"delta", limit(d.max_excess)}});
  json ps = json::array();
  for (const auto& p : inst.passengers)
    ps.push_back({{"id", p.id},
                  {"o", p.origin},
                  {"d", p.destination},
                  {"t_ed", p.departure},
                  {"delta", limit(p.max_excess)},
                  {"omega", limit(p.max_wait)},
                  {"q", p.party}});
  j["drivers"] = ds;
  j["passengers"] = ps;
  return j;
}

inline Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json(read_text(path), path.string()), path.parent_path());
}

inline json metrics_to_json(const Metrics& m) {
  return {{"matched_drivers", m.matched_drivers},
          {"matched_passengers", m.matched_passengers},
          {"match_rate", m.match_rate},
          {"prune_strength", m.prune_strength},
          {"total_delta_v", m.total_delta_v},
          {"mean_delta_v", m.mean_delta_v},
          {"total_delta_r", m.total_delta_r},
          {"mean_delta_r", m.mean_delta_r},
          {"total_omega_r", m.total_omega_r},
          {"mean_omega_r", m.mean_omega_r},
          {"vkt_saved", m.vkt_saved},
          {"trips_saved", m.trips_saved}};
}

inline std::string participant_id(const Instance& inst, const PdNode& n) {
  return n.is_driver_node() ? inst.drivers[n.owner].id : inst.passengers[n.owner].id;
}

/// Result document. Keys are sorted and no timings are included, so equal
/// results serialize to equal bytes.
inline json result_to_json(const MatchResult& m, const Metrics& metrics, const Instance& inst, const PDNetwork& pd) {
  json routes = json::array();
  for (const auto& s : m.selected) {
    json stops = json::array();
    for (const auto& st : s.schedule.stops) {
      const PdNode& n = pd.node(st.node);
      stops.push_back({{"kind", to_string(n.kind)},
                       {"participant", participant_id(inst, n)},
                       {"node", n.node},
                       {"t", st.arrival},
                       {"load", st.load}});
    }
    json served = json::array();
    for (const auto& svc : s.schedule.passengers)
      served.push_back({{"id", inst.passengers[svc.passenger].id},
                        {"pickup", svc.pickup_time},
                        {"dropoff", svc.dropoff_time},
                        {"wait", svc.wait},
                        {"excess", svc.excess}});
    json reqs = json::array();
    for (std::size_t r : s.requests) reqs.push_back(inst.passengers[r].id);
    routes.push_back({{"driver", inst.drivers[s.driver].id},
                      {"requests", reqs},
                      {"gamma_km", s.gamma},
                      {"distance_km", s.schedule.distance},
                      {"duration_min", s.schedule.duration},
                      {"driver_excess_min", s.schedule.driver_excess},
                      {"stops", stops},
                      {"passengers", served}});
  }
  json ud = json::array(), up = json::array(), rej = json::array();
  for (std::size_t i : m.unmatched_drivers) ud.push_back(inst.drivers[i].id);
  for (std::size_t j : m.unmatched_passengers) up.push_back(inst.passengers[j].id);
  for (const auto& r : pd.rejected()) rej.push_back({{"id", r.id}, {"reason", r.reason}});
  return {{"batch", inst.batch},
          {"objective_km", m.objective_km},
          {"baseline_km", m.baseline_km},
          {"gamma_x_km", m.gamma_x},
          {"routes", routes},
          {"unmatched_drivers", ud},
          {"unmatched_passengers", up},
          {"rejected", rej},
          {"metrics", metrics_to_json(metrics)}};
}

/// Rebuilds the routes of a result document against its instance. Stop
/// times and loads are taken as written, so edited files can be checked.
inline MatchResult result_from_json(const json& j, const Instance& inst, const PDNetwork& pd) {
  std::map<std::string, std::size_t> driver_of, passenger_of;
  for (std::size_t i = 0; i < inst.drivers.size(); ++i) driver_of[inst.drivers[i].id] = i;
  for (std::size_t k = 0; k < inst.passengers.size(); ++k) passenger_of[inst.passengers[k].id] = k;
  auto lookup = [](const std::map<std::string, std::size_t>& m, const std::string& id) {
    auto it = m.find(id);
    if (it == m.end()) throw IoError("result references unknown participant " + id);
    return it->second;
  };
  MatchResult m;
  m.baseline_km = detail::field<double>(j, "baseline_km", "result");
  m.gamma_x = detail::field<double>(j, "gamma_x_km", "result");
  m.objective_km = detail::field<double>(j, "objective_km", "result");
  std::vector<char> used_d(inst.drivers.size(), 0), used_p(inst.passengers.size(), 0);
  for (const auto& r : j.value("routes", json::array())) {
    SelectedRoute s;
    s.driver = lookup(driver_of, detail::field<std::string>(r, "driver", "route"));
    s.gamma = detail::field<double>(r, "gamma_km", "route");
    for (const auto& id : detail::field<std::vector<std::string>>(r, "requests", "route")) {
      s.requests.push_back(lookup(passenger_of, id));
      used_p[s.requests.back()] = 1;
    }
    std::sort(s.requests.begin(), s.requests.end());
    used_d[s.driver] = 1;
    s.schedule.driver = s.driver;
    for (const auto& st : r.at("stops")) {
      const auto kind = detail::field<std::string>(st, "kind", "stop");
      const auto who = detail::field<std::string>(st, "participant", "stop");
      PdIndex node = 0;
      if (kind == to_string(StopKind::DriverOrigin)) node = pd.driver_origin(lookup(driver_of, who));
      else if (kind == to_string(StopKind::DriverDestination)) node = pd.driver_destination(lookup(driver_of, who));
      else if (kind == to_string(StopKind::Pickup)) node = pd.pickup(lookup(passenger_of, who));
      else if (kind == to_string(StopKind::Dropoff)) node = pd.dropoff(lookup(passenger_of, who));
      else throw IoError("unknown stop kind " + kind);
      s.schedule.stops.push_back({node, detail::field<double>(st, "t", "stop"), detail::field<int>(st, "load", "stop")});
    }
    s.schedule.distance = detail::field<double>(r, "distance_km", "route");
    m.selected.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < inst.drivers.size(); ++i)
    if (!used_d[i]) m.unmatched_drivers.push_back(i);
  for (std::size_t k = 0; k < inst.passengers.size(); ++k)
    if (!used_p[k]) m.unmatched_passengers.push_back(k);
  return m;
}

}  // namespace rideshare
