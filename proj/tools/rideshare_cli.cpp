#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rideshare/rideshare.hpp"

namespace rs = rideshare;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kInvalidInput = 2;
constexpr int kCheckFailed = 3;

struct EngineFlags {
  int max_combo_size = 4;
  bool no_prune = false;
  int threads = 1;
  double excess_pct = 20.0;
  double wait_pct = 50.0;

  void add(CLI::App* app) {
    app->add_option("--max-combo-size", max_combo_size, "largest request set per driver")->capture_default_str();
    app->add_flag("--no-prune", no_prune, "skip geometric pruning");
    app->add_option("--threads", threads, "worker threads")->envname("RIDESHARE_THREADS")->capture_default_str();
    app->add_option("--excess-pct", excess_pct, "default max excess time, % of direct trip time")
        ->capture_default_str();
    app->add_option("--wait-pct", wait_pct, "default max wait, % of max excess time")->capture_default_str();
  }

  rs::EngineConfig config() const {
    rs::EngineConfig c;
    c.max_combo_size = max_combo_size;
    c.prune = !no_prune;
    c.threads = threads;
    return c;
  }
};

struct ScenarioFlags {
  std::string preset = "grid";
  std::uint64_t seed = 1;
  std::size_t drivers = 4;
  std::size_t passengers = 10;
  std::optional<int> capacity;
  std::optional<double> excess_pct;
  std::optional<double> wait_pct;
  double spread = 0.0;

  void add(CLI::App* app, bool with_limits) {
    app->add_option("--preset", preset, "grid (common depot) or default (scattered drivers)")
        ->check(CLI::IsMember({"grid", "default"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--drivers", drivers, "driver count")->capture_default_str();
    app->add_option("--passengers", passengers, "passenger count")->capture_default_str();
    app->add_option("--capacity", capacity, "seats per driver");
    if (with_limits) {
      app->add_option("--excess-pct", excess_pct, "max excess time, % of direct trip time");
      app->add_option("--wait-pct", wait_pct, "max wait, % of max excess time");
    }
    app->add_option("--spread", spread, "passenger departures drawn from [0, spread) minutes");
  }

  rs::GridScenarioParams params() const {
    rs::GridScenarioParams p = preset == "grid" ? rs::grid_preset() : rs::default_preset();
    p.seed = seed;
    p.drivers = drivers;
    p.passengers = passengers;
    p.departure_spread_min = spread;
    if (capacity) p.capacity = *capacity;
    if (excess_pct) p.excess_pct = *excess_pct;
    if (wait_pct) p.wait_pct = *wait_pct;
    return p;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else rs::write_text(path, text);
}

/// Loads an instance and fills unset limits from the percentage defaults.
rs::Instance prepare(const std::string& path, const EngineFlags& flags) {
  rs::Instance inst = rs::load_instance(path);
  inst.validate(true);
  const rs::PDNetwork pd = rs::build_pd_network(inst);
  inst = rs::default_constraints(inst, pd, flags.excess_pct / 100.0, flags.wait_pct / 100.0, true);
  inst.validate();
  return inst;
}

void warn_rejections(const rs::PDNetwork& pd) {
  for (const auto& r : pd.rejected()) std::cerr << "warning: " << r.id << " rejected: " << r.reason << '\n';
}

std::string metrics_csv(const rs::Instance& inst, const rs::BatchOutput& out) {
  rs::SweepRow row;
  row.axis = "match";
  row.value = inst.batch;
  row.seed = inst.seed;
  row.times = out.times;
  row.n_combos = out.combinations;
  row.z_km = out.result.objective_km;
  row.match_rate = out.metrics.match_rate;
  row.prune_strength = out.metrics.prune_strength;
  row.mean_delta_v = out.metrics.mean_delta_v;
  row.mean_delta_r = out.metrics.mean_delta_r;
  row.mean_omega_r = out.metrics.mean_omega_r;
  return rs::sweep_csv({row});
}

std::string plot_csv(const rs::Instance& inst, const rs::PDNetwork& pd, const rs::MatchResult& m) {
  std::ostringstream os;
  os << "driver,seq,kind,participant,x,y,t,load\n";
  for (const auto& s : m.selected) {
    for (std::size_t k = 0; k < s.schedule.stops.size(); ++k) {
      const auto& st = s.schedule.stops[k];
      const auto& n = pd.node(st.node);
      os << inst.drivers[s.driver].id << ',' << k << ',' << rs::to_string(n.kind) << ','
         << rs::participant_id(inst, n) << ',';
      if (n.where) os << rs::csv_number(n.where->x) << ',' << rs::csv_number(n.where->y);
      else os << ',';
      os << ',' << rs::csv_number(st.arrival) << ',' << st.load << '\n';
    }
  }
  return os.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch peer-to-peer ride-sharing matcher"};
  app.require_subcommand(1);

  // generate
  ScenarioFlags gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a seeded grid instance");
  gen.add(generate, true);
  generate->add_option("--out", gen_out, "output file (default stdout)");

  // match
  EngineFlags match_flags;
  std::string match_in, match_out, match_metrics, match_lp, match_plot;
  bool match_full = false;
  auto* match = app.add_subcommand("match", "solve one batch");
  match->add_option("--instance", match_in, "instance JSON")->required();
  match->add_option("--out", match_out, "result JSON (default stdout)");
  match->add_option("--metrics", match_metrics, "metrics CSV row");
  match->add_option("--export-lp", match_lp, "also write the routing model as an LP file");
  match->add_flag("--full-model", match_full, "LP export ignores pruning");
  match->add_option("--emit-plot-data", match_plot, "route stops CSV for plotting");
  match_flags.add(match);

  // oracle-check
  ScenarioFlags oc;
  EngineFlags oc_flags;
  std::size_t oc_seeds = 100;
  auto* oracle_check = app.add_subcommand("oracle-check", "compare the engine against exhaustive enumeration");
  oracle_check->add_option("--seeds", oc_seeds, "number of seeds")->capture_default_str();
  oc.drivers = 2;
  oc.passengers = 4;
  oc.add(oracle_check, false);
  oc_flags.add(oracle_check);

  // sweep
  ScenarioFlags sw;
  EngineFlags sw_flags;
  std::string sw_axis = "excess_pct", sw_values = "10,20,50,100,200,300", sw_out;
  std::size_t sw_reps = 1;
  bool sw_prune_only = false, sw_no_times = false;
  auto* sweep = app.add_subcommand("sweep", "replicated sensitivity sweep to CSV");
  sweep->add_option("--axis", sw_axis, "driver_ratio, excess_pct, capacity or size")->capture_default_str();
  sweep->add_option("--values", sw_values, "comma-separated axis values")->capture_default_str();
  sweep->add_option("--replications", sw_reps, "replications per value")->capture_default_str();
  sweep->add_flag("--prune-only", sw_prune_only, "stop after pruning");
  sweep->add_flag("--no-times", sw_no_times, "write zero timings (reproducible output)");
  sweep->add_option("--out", sw_out, "CSV file (default stdout)");
  sw.add(sweep, false);
  sw_flags.add(sweep);

  // export-lp
  EngineFlags lp_flags;
  std::string lp_in, lp_out;
  bool lp_full = false;
  auto* export_lp = app.add_subcommand("export-lp", "write the routing model in LP format");
  export_lp->add_option("--instance", lp_in, "instance JSON")->required();
  export_lp->add_option("--out", lp_out, "LP file (default stdout)");
  export_lp->add_flag("--full-model", lp_full, "every passenger for every driver");
  lp_flags.add(export_lp);

  // verify
  EngineFlags vf_flags;
  std::string vf_in, vf_result;
  bool vf_full = false;
  auto* verify = app.add_subcommand("verify", "check a result against every model constraint");
  verify->add_option("--instance", vf_in, "instance JSON")->required();
  verify->add_option("--result", vf_result, "result JSON")->required();
  verify->add_flag("--full-model", vf_full, "check against the unpruned model");
  vf_flags.add(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kIoError;
  }

  try {
    if (*generate) {
      const rs::Instance inst = rs::generate_grid(gen.params());
      emit(gen_out, rs::instance_to_json(inst).dump(2) + "\n");
      return kOk;
    }

    if (*match) {
      const rs::Instance inst = prepare(match_in, match_flags);
      const rs::EngineConfig cfg = match_flags.config();
      const rs::BatchOutput out = rs::match(inst, cfg);
      warn_rejections(*out.pd);
      emit(match_out, rs::result_to_json(out.result, out.metrics, inst, *out.pd).dump(2) + "\n");
      if (!match_metrics.empty()) rs::write_text(match_metrics, metrics_csv(inst, out));
      if (!match_lp.empty()) rs::write_text(match_lp, rs::export_mip(inst, *out.pd, cfg, match_full));
      if (!match_plot.empty()) rs::write_text(match_plot, plot_csv(inst, *out.pd, out.result));
      return kOk;
    }

    if (*oracle_check) {
      const rs::EngineConfig cfg = oc_flags.config();
      std::size_t passed = 0;
      for (std::size_t k = 0; k < oc_seeds; ++k) {
        rs::GridScenarioParams p = oc.params();
        p.seed = oc.seed + k;
        const rs::Instance inst = rs::generate_grid(p);
        const rs::BatchOutput out = rs::match(inst, cfg);
        const auto ref = rs::oracle::brute_force_matching(inst, *out.pd, cfg.max_combo_size, cfg.eps);
        const auto check = rs::verify_solution(inst, *out.pd, out.result, cfg);
        const bool ok = std::fabs(out.result.objective_km - ref.objective) <= 1e-9 && check.pass;
        std::printf("seed %llu: %s (engine %.9f, oracle %.9f)\n", static_cast<unsigned long long>(p.seed),
                    ok ? "pass" : "FAIL", out.result.objective_km, ref.objective);
        passed += ok ? 1 : 0;
      }
      std::printf("%zu/%zu pass\n", passed, oc_seeds);
      return passed == oc_seeds ? kOk : kCheckFailed;
    }

    if (*sweep) {
      rs::SweepSpec spec;
      spec.axis = rs::parse_axis(sw_axis);
      spec.values = split_list(sw_values);
      spec.replications = sw_reps;
      spec.prune_only = sw_prune_only;
      spec.threads = sw_flags.threads;
      rs::EngineConfig cfg = sw_flags.config();
      const auto rows = rs::run_sweep(spec, sw.params(), cfg);
      emit(sw_out, rs::sweep_csv(rows, !sw_no_times));
      return kOk;
    }

    if (*export_lp) {
      const rs::Instance inst = prepare(lp_in, lp_flags);
      const rs::PDNetwork pd = rs::build_pd_network(inst);
      warn_rejections(pd);
      emit(lp_out, rs::export_mip(inst, pd, lp_flags.config(), lp_full));
      return kOk;
    }

    if (*verify) {
      const rs::Instance inst = prepare(vf_in, vf_flags);
      const rs::PDNetwork pd = rs::build_pd_network(inst);
      const rs::MatchResult m =
          rs::result_from_json(rs::parse_json(rs::read_text(vf_result), vf_result), inst, pd);
      const auto rep = rs::verify_solution(inst, pd, m, vf_flags.config(), vf_full);
      for (const auto& v : rep.violations) std::cout << "violated " << v << '\n';
      std::cout << (rep.pass ? "pass" : "FAIL") << " (" << rep.rows_checked << " checks)\n";
      return rep.pass ? kOk : kCheckFailed;
    }
  } catch (const rs::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const rs::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const rs::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const rs::oracle::SizeLimit& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kOk;
}
