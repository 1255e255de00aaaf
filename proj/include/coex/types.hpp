#pragma once

#include <cstdint>
#include <vector>

namespace coex {

/// PHY timing and overhead constants. Durations in µs, sizes in bits, rates in Mb/s
/// (so bits / rate is a duration in µs).
struct PhyProfile {
  double slot_sigma = 9.0;
  double difs = 34.0;
  double sifs = 16.0;
  double lifs = 20.0;
  double t_plcp = 40.0;
  double l_del = 32.0;
  double l_mac_oh = 288.0;
  double l_pad = 0.0;
  double l_ack = 256.0;
  double c_ctrl = 24.0;

  /// 802.11ac 5 GHz values used throughout the evaluation presets.
  static PhyProfile ieee80211ac() { return {}; }

  bool operator==(const PhyProfile&) const = default;

  /// Throws ConfigError unless SIFS < LIFS < DIFS, durations > 0 and sizes >= 0.
  void validate() const;
};

/// Binary exponential backoff configuration. CW_max = 2^max_backoff_stage * cw_min.
struct DcfParams {
  int cw_min = 16;
  int max_backoff_stage = 4;
  int retry_limit = 4;

  void validate() const;

  /// Contention window at backoff stage `stage` (stage is capped at max_backoff_stage).
  std::int64_t window(int stage) const;

  bool operator==(const DcfParams&) const = default;
};

struct StationProfile {
  DcfParams dcf;
  double data_rate_c = 130.0;  ///< Mb/s
  int f_agg = 1;               ///< packets aggregated per burst
  double payload_b = 12000.0;  ///< data bits per burst
  double arrival_prob_q = 1.0; ///< per uniform slot; 1 means saturated

  bool saturated() const { return arrival_prob_q >= 1.0; }
  void validate() const;

  bool operator==(const StationProfile&) const = default;
};

using StationList = std::vector<StationProfile>;

}  // namespace coex
