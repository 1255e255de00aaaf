#include "coex/types.hpp"

#include <cmath>
#include <string>

#include "coex/errors.hpp"

namespace coex {

void PhyProfile::validate() const {
  for (double d : {slot_sigma, difs, sifs, lifs, t_plcp, c_ctrl}) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw ConfigError("phy: durations and control rate must be positive and finite");
    }
  }
  for (double s : {l_del, l_mac_oh, l_pad, l_ack}) {
    if (!(s >= 0.0)) throw ConfigError("phy: sizes must be non-negative");
  }
  if (!(sifs < lifs && lifs < difs)) {
    throw ConfigError("phy: orthogonal access needs SIFS < LIFS < DIFS");
  }
}

void DcfParams::validate() const {
  if (cw_min < 1) throw ConfigError("dcf: cw_min must be >= 1");
  if (max_backoff_stage < 0 || max_backoff_stage > 20) {
    throw ConfigError("dcf: max_backoff_stage must be in [0, 20]");
  }
  if (retry_limit != max_backoff_stage) {
    throw ConfigError("dcf: retry_limit must equal max_backoff_stage");
  }
}

std::int64_t DcfParams::window(int stage) const {
  const int s = stage < max_backoff_stage ? stage : max_backoff_stage;
  return static_cast<std::int64_t>(cw_min) << s;
}

void StationProfile::validate() const {
  dcf.validate();
  if (!(arrival_prob_q > 0.0 && arrival_prob_q <= 1.0)) {
    throw ConfigError("station: arrival_prob_q must be in (0, 1]");
  }
  if (f_agg < 1) throw ConfigError("station: f_agg must be >= 1");
  if (!(payload_b > 0.0)) throw ConfigError("station: payload_b must be positive");
  if (!(data_rate_c > 0.0) || !std::isfinite(data_rate_c)) {
    throw ConfigError("station: data_rate_c must be positive");
  }
}

}  // namespace coex
