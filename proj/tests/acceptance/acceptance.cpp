// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit status is the
// number of failed criteria (capped at 1).
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "coex/analytic.hpp"
#include "coex/experiments.hpp"
#include "coex/policy.hpp"
#include "coex/scenario_io.hpp"
#include "coex/simulator.hpp"

namespace {

using namespace coex;

constexpr int kSeeds = 5;

// Every run goes through here so criterion 12 can check conservation on all of them.
double g_worst_conservation = 0.0;
std::int64_t g_ps_mismatch = 0;
int g_runs = 0;

RunMetrics run(const Scenario& sc) {
  RunMetrics m = run_scenario(sc);
  const double total =
      m.total_wifi_airtime() + m.lbt_airtime + m.idle_fraction + m.collision_fraction;
  g_worst_conservation = std::max(g_worst_conservation, std::abs(total - 1.0));
  g_ps_mismatch += std::llabs(m.idle_ps + m.success_ps + m.collision_ps + m.lbt_hold_ps - m.window_ps);
  ++g_runs;
  return m;
}

Scenario scenario(const std::string& text) { return scenario_from_keys(parse_key_values(text)); }

std::string saturated(int n, const std::string& mode, double t_lbt_us, int f_agg, double seconds) {
  return "stations.count = " + std::to_string(n) + "\nstations.*.mpdu_bytes = 1500\nstations.*.f_agg = " +
         std::to_string(f_agg) + "\nlbt.mode = " + mode + "\nlbt.t_lbt_us = " + format_number(t_lbt_us) +
         "\nsim.duration_s = " + format_number(seconds) + "\nsim.warmup_s = 1\n";
}

struct Paired {
  double wifi = 0.0;       // mean per-WiFi goodput with the LBT node
  double wifi_twin = 0.0;  // same with the WiFi twin
  double lbt = 0.0;
  double twin = 0.0;
  double wifi_air = 0.0;   // total WiFi airtime
  double wifi_air_twin = 0.0;
  double lbt_air = 0.0;
  double station_air = 0.0;  // mean airtime of one WiFi station
  std::int64_t lbt_collisions = 0;
  double worst_seed_ratio = 1.0;  // per-seed wifi / wifi_twin farthest from 1

  double gain() const { return lbt / twin - 1.0; }
  double wifi_ratio() const { return wifi / wifi_twin; }
};

Paired paired(Scenario sc, int seeds = kSeeds) {
  Paired p;
  for (int s = 0; s < seeds; ++s) {
    sc.seed = 1000 + s;
    const auto m = run(sc);
    const auto t = run(sc.legacy_twin());
    p.wifi += m.mean_wifi_goodput() / seeds;
    p.wifi_twin += t.mean_wifi_goodput() / seeds;
    p.lbt += m.lbt_goodput / seeds;
    p.twin += t.lbt_goodput / seeds;
    p.wifi_air += m.total_wifi_airtime() / seeds;
    p.wifi_air_twin += t.total_wifi_airtime() / seeds;
    p.lbt_air += m.lbt_airtime / seeds;
    p.station_air += m.total_wifi_airtime() / m.per_station_airtime.size() / seeds;
    p.lbt_collisions += m.lbt_collisions;
    const double r = m.mean_wifi_goodput() / t.mean_wifi_goodput();
    if (std::abs(r - 1.0) > std::abs(p.worst_seed_ratio - 1.0)) p.worst_seed_ratio = r;
  }
  return p;
}

int g_failed = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string pct(double v) { return fmt(100.0 * v, 4) + "%"; }

void criterion1() {
  bool ok = true;
  std::string detail;
  for (int n : {2, 5, 10}) {
    Scenario sc = scenario(saturated(n, "none", 1000, 1, 101));
    const auto& st = sc.stations.front();
    const auto ss = slot_stats_homogeneous(solve_saturated_attempt_rate(n, st.dcf), sc.phy, st, n);
    // Counts pooled over seeds.
    double slots = 0.0, idle = 0.0, succ = 0.0, goodput = 0.0;
    for (int s = 0; s < kSeeds; ++s) {
      sc.seed = 21 + s;
      const auto m = run(sc);
      slots += static_cast<double>(m.idle_slots + m.busy_slots);
      idle += static_cast<double>(m.idle_slots);
      for (auto k : m.per_station_successes) succ += static_cast<double>(k);
      goodput += m.mean_wifi_goodput() / kSeeds;
    }
    const double e_idle = idle / slots / ss.p_idle - 1.0;
    const double e_succ = succ / slots / ss.p_succ_total - 1.0;
    const double e_s = goodput / wifi_throughput_saturated(ss, st) - 1.0;
    const double worst = std::max({std::abs(e_idle), std::abs(e_succ), std::abs(e_s)});
    ok = ok && worst <= 0.01;
    detail += " n=" + std::to_string(n) + " P_idle " + pct(e_idle) + " P_succ " + pct(e_succ) +
              " s " + pct(e_s) + ";";
  }
  report(1, ok, "simulation vs analytic model within 1%:" + detail);
}

void criterion2() {
  const auto st = solve_saturated_attempt_rate(1, DcfParams{16, 4, 4});
  const bool ok = st.tau(0) == 2.0 / 17.0 && st.residual <= 1e-10;
  report(2, ok, "n=1 tau = " + format_number(st.tau(0)) + " (2/17 = " + format_number(2.0 / 17.0) +
                    "), residual " + fmt(st.residual));
}

void criteria3and4() {
  const auto p = paired(scenario(saturated(5, "orla", 1000, 1, 101)));
  const bool fair = std::abs(p.worst_seed_ratio - 1.0) <= 0.02 && p.lbt_collisions == 0;
  report(3, fair, "ORLA n=5 per-WiFi goodput vs 6-WiFi baseline: mean " + fmt(p.wifi_ratio()) +
                      ", worst seed " + fmt(p.worst_seed_ratio) + " (band 0.98..1.02), LBT collisions " +
                      std::to_string(p.lbt_collisions));
  report(4, p.gain() >= 0.80, "ORLA n=5 LBT gain vs WiFi twin " + pct(p.gain()) + " (>= 80%)");
}

void criterion5() {
  const auto a = paired(scenario(saturated(5, "laa", 1000, 1, 21)));
  const auto b = paired(scenario(saturated(5, "laa", 10000, 1, 21)));
  const double ratio = a.lbt_air / a.station_air;
  const double loss = 1.0 - b.wifi_ratio();
  const bool ok = ratio >= 4.0 && loss >= 0.80 && loss <= 0.97 && b.gain() >= 8.0;
  report(5, ok, "LAA 1 ms airtime " + fmt(ratio) + "x a WiFi station (>= 4x); LAA 10 ms WiFi loss " +
                    pct(loss) + " (80..97%), LAA gain " + pct(b.gain()) + " (>= 800%)");
}

void criterion6() {
  Scenario laa = scenario(saturated(5, "laa", 1000, 10, 21));
  laa.lbt_sync = true;
  const auto sync = paired(laa);
  const auto olaa = paired(scenario(saturated(5, "olaa", 1000, 10, 21)));
  const bool ok = sync.lbt < sync.twin && olaa.lbt >= 1.5 * sync.lbt;
  report(6, ok, "15000 B bursts: sync LAA " + fmt(sync.lbt) + " Mb/s < twin " + fmt(sync.twin) +
                    " Mb/s; OLAA " + fmt(olaa.lbt) + " Mb/s = " + fmt(olaa.lbt / sync.lbt) +
                    "x sync LAA (>= 1.5x)");
}

void criterion7() {
  bool ok = true;
  std::string detail;
  const double t_lbt = 1000.0;
  const double p_idle = 0.6;
  for (double beta : {0.1, 0.5, 1.0, 5.0}) {
    const double t_slot = beta * (1.0 - p_idle) * t_lbt;
    const double lambda = solve_lambda_opt(p_idle, t_slot, t_lbt);
    const auto mc = monte_carlo_lambda(p_idle, t_slot, t_lbt, 50, 1000000, 77);
    const double err = mc.best_rate / lambda - 1.0;
    ok = ok && std::abs(err) <= 0.02;
    detail += " beta=" + fmt(beta) + " lambda " + fmt(lambda, 6) + " MC " + fmt(mc.best_rate, 6) +
              " at " + fmt(mc.best_threshold / t_lbt, 3) + " T_LBT;";
  }
  const double closed = 1.5 - std::sqrt(1.25);
  const double half = solve_lambda_opt(0.5, 250.0, t_lbt);
  ok = ok && std::abs(half - 0.38197) <= 1e-4 && std::abs(closed - 0.38197) <= 1e-4;
  report(7, ok, "lambda vs Monte Carlo grid argmax within 2%:" + detail + " beta=0.5 solver " +
                    fmt(half, 8));
}

void criterion8() {
  Scenario sc = scenario(saturated(5, "olaa", 1000, 1, 41));
  sc.seed = 5;
  const auto m = run(sc);
  const auto t = sample_t_res_distribution(m);
  const bool ok = t.samples >= 100000 && t.p_value > 0.01;
  report(8, ok, "T_res uniformity over " + std::to_string(t.samples) + " opportunities: KS D " +
                    fmt(t.statistic) + ", p = " + fmt(t.p_value) + " (> 0.01)");
}

void criterion9() {
  const auto p = paired(scenario(saturated(5, "orla", 1000, 1, 101) + "stations.*.relative_load = 0.5\n"));
  const bool ok = p.gain() >= 1.0 && std::abs(p.worst_seed_ratio - 1.0) <= 0.02;
  report(9, ok, "relative load 50%: ORLA gain " + pct(p.gain()) + " (>= 100%), per-WiFi goodput vs "
                    "+1 WiFi mean " + fmt(p.wifi_ratio()) + ", worst seed " + fmt(p.worst_seed_ratio) +
                    " (band 0.98..1.02)");
}

void criterion10() {
  const std::string rates =
      "stations.0.data_rate_mbps = 156\nstations.1.data_rate_mbps = 130\nstations.2.data_rate_mbps = 78\n"
      "stations.3.data_rate_mbps = 39\nstations.4.data_rate_mbps = 13\nlbt.rate_mbps = 130\n";
  const auto orla = paired(scenario(saturated(5, "orla", 1000, 1, 101) + rates));
  const auto olaa = paired(scenario(saturated(5, "olaa", 1000, 1, 101) + rates));
  const double air_orla = orla.wifi_air / orla.wifi_air_twin;
  const double air_olaa = olaa.wifi_air / olaa.wifi_air_twin;
  const bool ok = orla.gain() >= 1.5 && olaa.gain() >= 1.2 && std::abs(air_orla - 1.0) <= 0.02 &&
                  std::abs(air_olaa - 1.0) <= 0.02;
  report(10, ok, "multi-rate: ORLA gain " + pct(orla.gain()) + " (>= 150%), OLAA gain " +
                     pct(olaa.gain()) + " (>= 120%), WiFi airtime vs +1 WiFi " + fmt(air_orla) + " / " +
                     fmt(air_olaa) + " (band 0.98..1.02)");
}

void criterion11() {
  Scenario sc = scenario(saturated(5, "orla", 1000, 1, 41));
  sc.seed = 8;
  const auto m = run(sc);
  const double pi = sc.policy->take_prob_pi;
  const double n = static_cast<double>(m.lbt_opportunities);
  const double rate = m.lbt_takes / n;
  const double sigma = std::sqrt(pi * (1.0 - pi) / n);
  const bool ok = n >= 1e5 && std::abs(rate - pi) <= 3.0 * sigma;
  report(11, ok, "ORLA take fraction " + fmt(rate, 6) + " vs pi " + fmt(pi, 6) + " over " +
                     std::to_string(m.lbt_opportunities) + " opportunities (3 sigma = " +
                     fmt(3.0 * sigma, 3) + ")");
}

void criterion12() {
  bool identical = true;
  for (const std::string mode : {"none", "laa", "orla", "olaa"}) {
    const Scenario sc = scenario(saturated(5, mode, 1000, 1, 6));
    identical = identical && run(sc) == run(sc) &&
                node_rows_csv(simulate_rows(sc)) == node_rows_csv(simulate_rows(sc));
  }
  const bool ok = identical && g_worst_conservation <= 1e-9 && g_ps_mismatch == 0;
  report(12, ok, std::string("repeat runs ") + (identical ? "byte-identical" : "DIFFER") +
                     "; airtime + idle sums to 1 within " + fmt(g_worst_conservation, 3) + " over " +
                     std::to_string(g_runs) + " runs, picosecond ledger mismatch " +
                     std::to_string(g_ps_mismatch));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{criterion1, criterion2, criteria3and4, criterion5,
                                                  criterion6, criterion7, criterion8,    criterion9,
                                                  criterion10, criterion11, criterion12};
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++g_failed;
    }
  }
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
