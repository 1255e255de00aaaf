#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coex/policy.hpp"
#include "coex/types.hpp"

namespace coex {

enum class LbtMode { kNone, kWifiLegacy, kLaa, kOrla, kOlaa };

std::string_view to_string(LbtMode mode);
/// Throws ParseError for unknown names.
LbtMode parse_lbt_mode(std::string_view name);

struct Scenario {
  std::string id = "scenario";
  PhyProfile phy;
  StationList stations;
  LbtMode lbt_mode = LbtMode::kNone;
  double lbt_t_lbt = 1000.0;  ///< µs
  double lbt_rate = 130.0;    ///< Mb/s while holding the channel
  bool lbt_sync = false;      ///< laa only: align data to the T_LBT frame grid
  std::optional<DcfParams> lbt_dcf;     ///< laa and wifi_legacy
  std::optional<PolicyParams> policy;   ///< orla and olaa
  double sim_duration = 10.0;  ///< s
  double warmup = 1.0;         ///< s
  std::uint64_t seed = 1;
  bool drop_at_retry_limit = false;

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  /// Profile the LBT node has when it acts as one more WiFi station: station 0's frame
  /// settings at the LBT rate and contention parameters, always saturated.
  StationProfile twin_station() const;

  /// Same scenario with the LBT node replaced by its WiFi twin.
  Scenario legacy_twin() const;
};

struct RunMetrics {
  std::vector<double> per_station_goodput;  ///< Mb/s
  std::vector<double> per_station_airtime;  ///< fraction of the window
  std::vector<std::int64_t> per_station_successes;
  std::vector<std::int64_t> per_station_collisions;
  double lbt_goodput = 0.0;
  double lbt_airtime = 0.0;
  std::int64_t lbt_takes = 0;
  std::int64_t lbt_opportunities = 0;
  std::int64_t lbt_collisions = 0;  ///< collisions involving the LBT node
  std::int64_t wifi_collision_slots = 0;
  std::int64_t idle_slots = 0;
  std::int64_t busy_slots = 0;      ///< successes and collisions, LBT holds excluded
  std::int64_t lbt_holds = 0;
  double idle_fraction = 0.0;
  double collision_fraction = 0.0;
  double window_us = 0.0;
  double t_lbt = 0.0;
  std::vector<double> t_res_samples;  ///< µs, at every OLAA opportunity before thresholding

  // Exact time accounting in picoseconds.
  std::int64_t window_ps = 0;
  std::int64_t idle_ps = 0;
  std::int64_t success_ps = 0;
  std::int64_t collision_ps = 0;
  std::int64_t lbt_hold_ps = 0;

  bool operator==(const RunMetrics&) const = default;

  double mean_wifi_goodput() const;
  double total_wifi_airtime() const;
};

/// Runs one seeded slot-level simulation. Deterministic for a given Scenario.
/// Throws ConfigError before any event when the scenario is invalid and
/// InvariantViolation if time accounting or orthogonality breaks.
RunMetrics run_scenario(const Scenario& scenario);

struct MonteCarloLambda {
  double best_threshold = 0.0;  ///< µs
  double best_rate = 0.0;
};

/// Empirical goodput ratio of the threshold rule "take iff T_res < threshold" over
/// `draws` LIFS opportunities with geometric gaps (success 1 - P_idle, each slot T_slot)
/// and uniform T_res.
double monte_carlo_rate(double p_idle, double t_slot, double t_lbt, double threshold,
                        std::int64_t draws, std::uint64_t seed);

/// Grid search of monte_carlo_rate over `threshold_grid` thresholds spanning [0, T_LBT],
/// on common random numbers.
MonteCarloLambda monte_carlo_lambda(double p_idle, double t_slot, double t_lbt,
                                    int threshold_grid, std::int64_t draws, std::uint64_t seed);

struct UniformityTest {
  double statistic = 0.0;  ///< Kolmogorov-Smirnov D
  double p_value = 1.0;
  std::size_t samples = 0;
};

/// KS test of the recorded T_res samples against Uniform(0, T_LBT). Needs >= 1e4 samples.
UniformityTest sample_t_res_distribution(const RunMetrics& metrics);

}  // namespace coex
