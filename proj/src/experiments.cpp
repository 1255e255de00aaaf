#include "coex/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "coex/analytic.hpp"
#include "coex/errors.hpp"
#include "coex/policy.hpp"

namespace coex {

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*v);
  } else {
    return std::to_string(*v);
  }
}

std::optional<double> gain(double with, double reference) {
  if (!(reference > 0.0)) return std::nullopt;
  return (with - reference) / reference;
}

Scenario wifi_only(const Scenario& sc) {
  Scenario alone = sc;
  alone.lbt_mode = LbtMode::kNone;
  alone.lbt_sync = false;
  alone.policy.reset();
  return alone;
}

}  // namespace

std::string node_rows_csv(const std::vector<NodeRow>& rows) {
  std::string out = kNodeCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.scenario_id + ',' + std::to_string(r.seed) + ',' + r.node_id + ',' + r.node_kind +
           ',' + format_number(r.goodput_mbps) + ',' + format_number(r.airtime_frac) + ',' +
           opt(r.takes) + ',' + opt(r.opportunities) + ',' + opt(r.collisions) + ',' +
           opt(r.gain_vs_legacy) + '\n';
  }
  return out;
}

std::vector<NodeRow> rows_for_run(const Scenario& sc, const RunMetrics& run, const RunMetrics* twin) {
  std::vector<NodeRow> rows;
  const std::size_t n = run.per_station_goodput.size();
  for (std::size_t i = 0; i < n; ++i) {
    NodeRow r;
    r.scenario_id = sc.id;
    r.seed = sc.seed;
    r.node_id = std::to_string(i);
    r.node_kind = "wifi";
    r.goodput_mbps = run.per_station_goodput[i];
    r.airtime_frac = run.per_station_airtime[i];
    r.collisions = run.per_station_collisions[i];
    if (twin) r.gain_vs_legacy = gain(r.goodput_mbps, twin->per_station_goodput[i]);
    rows.push_back(std::move(r));
  }
  if (sc.lbt_mode != LbtMode::kNone) {
    NodeRow r;
    r.scenario_id = sc.id;
    r.seed = sc.seed;
    r.node_id = "lbt";
    r.node_kind = std::string(to_string(sc.lbt_mode));
    r.goodput_mbps = run.lbt_goodput;
    r.airtime_frac = run.lbt_airtime;
    r.takes = run.lbt_takes;
    r.opportunities = run.lbt_opportunities;
    r.collisions = run.lbt_collisions;
    if (twin) r.gain_vs_legacy = gain(r.goodput_mbps, twin->lbt_goodput);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<NodeRow> simulate_rows(const Scenario& sc) {
  const RunMetrics run = run_scenario(sc);
  if (sc.lbt_mode == LbtMode::kNone) return rows_for_run(sc, run, nullptr);
  const RunMetrics twin =
      sc.lbt_mode == LbtMode::kWifiLegacy ? run : run_scenario(sc.legacy_twin());
  return rows_for_run(sc, run, &twin);
}

std::string analyze_csv(const Scenario& sc) {
  sc.validate();
  std::ostringstream out;
  out << "scenario_id,station,tau,p_cond,p_idle,p_succ,p_coll,t_slot_us,throughput_mbps,"
         "rho_bar,take_prob_pi,bursts_nu,lambda_opt,olaa_threshold_us\n";
  if (sc.stations.empty()) return out.str();

  const StationProfile newcomer = sc.twin_station();
  const PolicyDerivation d = derive_policy(sc.phy, sc.stations, newcomer, sc.lbt_t_lbt);
  const PolicyParams& p = d.params;
  const SlotStats& st = d.stats_actual;
  ArrayXd thr;
  if (d.homogeneous) {
    thr = ArrayXd::Constant(st.size(), wifi_throughput_saturated(st, sc.stations.front()));
  } else {
    thr = station_throughputs(st, sc.stations);
  }
  for (Eigen::Index i = 0; i < st.size(); ++i) {
    out << sc.id << ',' << i << ',' << format_number(d.state_actual.tau(i)) << ','
        << format_number(d.state_actual.p_cond(i)) << ',' << format_number(st.p_idle) << ','
        << format_number(st.p_succ(i)) << ',' << format_number(st.p_coll) << ','
        << format_number(st.t_slot) << ',' << format_number(thr(i)) << ','
        << format_number(p.rho_bar) << ',' << format_number(p.take_prob_pi) << ','
        << format_number(p.bursts_per_take_nu) << ',' << format_number(p.lambda_opt) << ','
        << format_number(p.olaa_threshold) << '\n';
  }
  return out.str();
}

std::vector<NodeRow> run_sweep(const SweepSpec& spec, std::optional<std::uint64_t> seed_override,
                               int jobs) {
  // Parse every cell up front so malformed cells fail before any simulation runs.
  std::vector<Scenario> cells;
  for (const auto& cell : spec.cells()) {
    Scenario sc = scenario_from_keys(cell.keys);
    sc.id += "@" + cell.label;
    if (seed_override) sc.seed = *seed_override;
    sc.validate();
    cells.push_back(std::move(sc));
  }

  const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t total = cells.size() * reps;
  std::vector<std::vector<NodeRow>> results(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      try {
        Scenario sc = cells[k / reps];
        sc.seed += k % reps;
        results[k] = simulate_rows(sc);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, 256);
  std::vector<std::jthread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<NodeRow> rows;
  for (auto& r : results) {
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return rows;
}

std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_path) {
  // Column numbers of the node CSV.
  auto column = [](const std::string& metric) {
    static const std::vector<std::string> names{"goodput_mbps", "airtime_frac", "takes",
                                                "opportunities", "collisions", "gain_vs_legacy"};
    return 5 + static_cast<int>(std::find(names.begin(), names.end(), metric) - names.begin());
  };
  std::ostringstream g;
  g << "# Plots sweep results from " << csv_path << "\n"
    << "set datafile separator ','\n"
    << "set key outside right\n"
    << "set grid\n"
    << "set terminal pngcairo size 900,600\n"
    << "# axis values are encoded in scenario_id as <id>@<path>=<v1>[;<path>=<v2>]\n"
    << "label(s) = s[strstrt(s, \"@\") + 1:]\n"
    << "after_eq(s) = s[strstrt(s, \"=\") + 1:]\n"
    << "head(s) = strstrt(s, \";\") ? s[1:strstrt(s, \";\") - 1] : s\n"
    << "x1(s) = real(head(after_eq(label(s))))\n"
    << "ends(s, t) = strlen(s) >= strlen(t) && s[strlen(s) - strlen(t) + 1:] eq t\n"
    << "set xlabel '" << spec.axis1.path << "'\n";

  std::vector<std::string> series;  // (filter suffix, title)
  if (spec.axis2) {
    for (const auto& v : spec.axis2->values) series.push_back(";" + spec.axis2->path + "=" + v);
  } else {
    series.push_back("");
  }
  for (const auto& metric : spec.outputs) {
    const int col = column(metric);
    g << "\nset output '" << csv_path << "." << metric << ".png'\n"
      << "set ylabel '" << metric << "'\n"
      << "plot ";
    bool first = true;
    for (const auto& s : series) {
      const std::string cell = s.empty() ? "1" : "ends(strcol(1), \"" + s + "\")";
      const std::string tag = s.empty() ? "" : " " + s.substr(1);
      for (const char* who : {"lbt", "wifi"}) {
        const std::string filter = std::string(who) == "lbt" ? "strcol(3) eq \"lbt\""
                                                             : "strcol(4) eq \"wifi\"";
        if (!first) g << ", \\\n     ";
        first = false;
        g << "'" << csv_path << "' every ::1 using (" << cell << " && " << filter
          << " ? x1(strcol(1)) : NaN):" << col << " smooth unique with linespoints title '"
          << who << tag << "'";
      }
    }
    g << "\n";
  }
  return g.str();
}

CompareReport compare_scenario(const Scenario& sc) {
  if (sc.lbt_mode == LbtMode::kNone || sc.lbt_mode == LbtMode::kWifiLegacy) {
    throw ConfigError("compare: nothing to compare, the scenario has no LBT contender");
  }
  const RunMetrics run = run_scenario(sc);
  const RunMetrics twin = run_scenario(sc.legacy_twin());
  const RunMetrics alone = run_scenario(wifi_only(sc));
  CompareReport r;
  r.scenario_id = sc.id;
  r.seed = sc.seed;
  r.mode = sc.lbt_mode;
  r.wifi_goodput = run.mean_wifi_goodput();
  r.wifi_goodput_twin = twin.mean_wifi_goodput();
  r.wifi_goodput_alone = alone.mean_wifi_goodput();
  r.lbt_goodput = run.lbt_goodput;
  r.twin_goodput = twin.lbt_goodput;
  r.lbt_collisions = run.lbt_collisions;
  return r;
}

std::string format_compare(const CompareReport& r) {
  std::ostringstream o;
  auto pct = [](double g) { return format_number(std::round(g * 1e4) / 1e2) + "%"; };
  o << "scenario            " << r.scenario_id << " (seed " << r.seed << ", " << to_string(r.mode)
    << ")\n"
    << "wifi goodput/node   " << format_number(r.wifi_goodput) << " Mb/s\n"
    << "  with wifi twin    " << format_number(r.wifi_goodput_twin) << " Mb/s\n"
    << "  wifi only         " << format_number(r.wifi_goodput_alone) << " Mb/s\n"
    << "wifi gain vs twin   " << pct(r.wifi_gain()) << "\n"
    << "lbt goodput         " << format_number(r.lbt_goodput) << " Mb/s\n"
    << "twin goodput        " << format_number(r.twin_goodput) << " Mb/s\n"
    << "lbt gain vs twin    " << pct(r.lbt_gain()) << "\n"
    << "lbt collisions      " << r.lbt_collisions << "\n"
    << "fairness            " << (r.fair() ? "PASS" : "FAIL") << "\n";
  return o.str();
}

}  // namespace coex
