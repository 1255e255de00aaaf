#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coex/scenario_io.hpp"
#include "coex/simulator.hpp"

namespace coex {

/// One CSV row per node. Empty optionals print as empty fields.
struct NodeRow {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::string node_id;    ///< station index, or "lbt"
  std::string node_kind;  ///< "wifi" or the LBT mode name
  double goodput_mbps = 0.0;
  double airtime_frac = 0.0;
  std::optional<std::int64_t> takes;
  std::optional<std::int64_t> opportunities;
  std::optional<std::int64_t> collisions;
  std::optional<double> gain_vs_legacy;

  bool operator==(const NodeRow&) const = default;
};

inline constexpr const char* kNodeCsvHeader =
    "scenario_id,seed,node_id,node_kind,goodput_mbps,airtime_frac,takes,opportunities,"
    "collisions,gain_vs_legacy";

/// Shortest round-trip decimal text of `v`.
std::string format_number(double v);

std::string node_rows_csv(const std::vector<NodeRow>& rows);

/// Rows of one run. Gains come from the wifi_legacy twin run on the same seed; they are
/// left empty in none mode and wherever the twin metric is zero.
std::vector<NodeRow> rows_for_run(const Scenario& scenario, const RunMetrics& run,
                                  const RunMetrics* twin);

/// Runs the scenario and, unless lbt mode is none, its wifi_legacy twin.
std::vector<NodeRow> simulate_rows(const Scenario& scenario);

/// Per-station analytic report with policy columns.
std::string analyze_csv(const Scenario& scenario);

/// Runs every (cell, repetition) of the sweep on `jobs` threads. Repetition r uses seed
/// base_seed + r. Rows come back in (cell, repetition, node) order.
std::vector<NodeRow> run_sweep(const SweepSpec& spec, std::optional<std::uint64_t> seed_override,
                               int jobs);

/// Gnuplot script that reads `csv_path` and plots the sweep outputs against axis 1.
std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_path);

struct CompareReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  LbtMode mode = LbtMode::kNone;
  double wifi_goodput = 0.0;         ///< per-WiFi mean with the LBT node
  double wifi_goodput_twin = 0.0;    ///< per-WiFi mean with the WiFi twin
  double wifi_goodput_alone = 0.0;   ///< per-WiFi mean without any extra node
  double lbt_goodput = 0.0;
  double twin_goodput = 0.0;
  std::int64_t lbt_collisions = 0;

  double wifi_gain() const { return wifi_goodput / wifi_goodput_twin - 1.0; }
  double lbt_gain() const { return lbt_goodput / twin_goodput - 1.0; }
  bool fair() const { return wifi_goodput >= 0.98 * wifi_goodput_twin; }
};

/// Paired-seed fairness comparison. Throws ConfigError in none mode.
CompareReport compare_scenario(const Scenario& scenario);
std::string format_compare(const CompareReport& report);

/// Command-line entry point. Returns the process exit code:
/// 0 ok, 1 usage/IO error, 2 parse or configuration error, 3 solver failure,
/// 4 simulation invariant violation.
int run_cli(int argc, char** argv);

}  // namespace coex
