#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "coex/types.hpp"

namespace coex {

using Eigen::ArrayXd;

/// Per-station attempt rates and conditional collision probabilities at a fixed point.
struct SteadyState {
  ArrayXd tau;     ///< attempt probability per MAC slot, each in (0, 1)
  ArrayXd p_cond;  ///< conditional collision probability, each in [0, 1)
  double residual = 0.0;

  Eigen::Index size() const { return tau.size(); }
};

/// Steady-state MAC slot statistics. Durations in µs.
struct SlotStats {
  double p_idle = 1.0;
  double p_succ_total = 0.0;
  double p_coll = 0.0;
  double p_tx = 0.0;
  ArrayXd p_succ;  ///< probability that a slot holds a success of station i
  ArrayXd t_succ;  ///< T_s,i
  double t_coll = 0.0;
  double t_slot = 0.0;
  double sigma = 0.0;

  Eigen::Index size() const { return p_succ.size(); }
};

/// T_ACK = T_PLCP + L_ACK / C_ctrl.
double ack_duration(const PhyProfile& phy);

/// Duration of a successful exchange: preamble, aggregated burst, SIFS, ACK and DIFS.
double tx_duration(const PhyProfile& phy, const StationProfile& station);

/// Saturated attempt rate of the homogeneous BEB model (Bianchi), as a function of the
/// conditional collision probability. Written in the form without the removable
/// singularity at p = 1/2.
double saturated_tau(double p, const DcfParams& dcf);

/// Solves tau = saturated_tau(p), p = 1 - (1 - tau)^(n-1) by bisection on p.
/// Throws SolverError when the residual cannot be brought under 1e-10.
SteadyState solve_saturated_attempt_rate(int n, const DcfParams& dcf);

SlotStats slot_stats_homogeneous(const SteadyState& state, const PhyProfile& phy,
                                 const StationProfile& station, int n);

/// Per-station saturated throughput in Mb/s.
double wifi_throughput_saturated(const SlotStats& stats, const StationProfile& station);

/// rho * P_idle * T_LBT: LBT channel time added per average slot.
double lbt_airtime(double rho, const SlotStats& stats, double t_lbt);

/// Mean backoff length (slots) at retry j: (2^min(j, m) * CW_min - 1) / 2.
double mean_backoff_slots(int retry, const DcfParams& dcf);

/// Renewal-reward attempt rate of one station given its conditional collision probability.
double renewal_tau(double p, const StationProfile& station);

/// Joint per-station fixed point of the renewal-reward attempt rates and the
/// conditional collision probabilities. Damped iteration (0.5) from 2/(CW_min+1).
SteadyState solve_heterogeneous_attempt_rates(const StationList& stations, const PhyProfile& phy);

/// Slot statistics for independent per-station attempt rates. The collision duration is
/// the expected length of the longest frame involved in a collision.
SlotStats slot_stats_heterogeneous(const SteadyState& state, const StationList& stations,
                                   const PhyProfile& phy);

/// Share of channel time spent on successful frames of `members`.
double aggregate_wifi_airtime(const SlotStats& stats, std::span<const int> members);

/// Per-station throughput (Mb/s) for any SlotStats: p_succ,i * B_i / T_slot.
ArrayXd station_throughputs(const SlotStats& stats, const StationList& stations);

/// Arrival probability q that makes the renewal-reward per-station throughput equal to
/// `relative_load` times its saturated value, for `count` identical stations.
double arrival_prob_for_relative_load(double relative_load, const StationProfile& station,
                                      int count, const PhyProfile& phy);

}  // namespace coex
