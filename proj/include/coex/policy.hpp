#pragma once

#include <functional>
#include <span>

#include "coex/analytic.hpp"

namespace coex {

struct PolicyParams {
  double rho_bar = 0.0;
  double take_prob_pi = 0.0;
  double bursts_per_take_nu = 1.0;
  double lambda_opt = 0.0;
  double olaa_threshold = 0.0;  ///< µs
  double t_lbt = 1000.0;        ///< µs

  void validate() const;
};

/// Largest rho keeping a WiFi station's throughput with the LBT node at or above its
/// throughput with one more WiFi station (homogeneous, saturated). `t` is the WiFi
/// frame duration, `t_lbt` the LBT hold.
double rho_bar_homogeneous(const SlotStats& stats_n, const SlotStats& stats_n1, double t,
                           double t_lbt, double sigma);

/// Largest rho keeping the aggregate airtime of `members` with the LBT node at or above
/// their airtime with one more saturated WiFi station. Returns +inf when `members` is
/// empty.
double rho_bar_heterogeneous(const SlotStats& stats_actual, const SlotStats& stats_plus_one,
                             std::span<const int> members, double t_lbt);

/// pi(rho) = min{1, rho * P_idle / (1 - P_idle)}.
double take_probability(double rho, double p_idle);

/// nu = max{1, rho * P_idle / (1 - P_idle)}.
double bursts_per_take(double rho, double p_idle);

struct BurstSchedule {
  int full_bursts = 1;
  double last_fraction = 0.0;  ///< length of the trailing partial burst in units of T_LBT

  int burst_count() const { return full_bursts + (last_fraction > 0.0 ? 1 : 0); }
};

BurstSchedule burst_schedule(double nu);

/// Density of the residual time to the next frame boundary on [0, t_lbt].
using ResidualLaw = std::function<double(double t_res, double t_lbt)>;

double uniform_residual_density(double t_res, double t_lbt);

/// E[(Y - lambda * T_LBT)^+] with Y = T_LBT - T_res, by 200-point Gauss-Legendre.
double expected_excess_reward(double lambda, double t_lbt, const ResidualLaw& law);

/// Optimal long-run goodput ratio of the synchronous stopping problem:
/// E[(Y - lambda T_LBT)^+] = lambda T_slot / (1 - P_idle).
double solve_lambda_opt(double p_idle, double t_slot, double t_lbt,
                        const ResidualLaw& law = uniform_residual_density);

/// min(T_LBT (1 - lambda), pi T_LBT), clamped to [0, T_LBT].
double olaa_threshold(double lambda_opt, double take_prob_pi, double t_lbt);

inline bool orla_decide(double rand_u, double take_prob_pi) { return rand_u < take_prob_pi; }

inline bool olaa_decide(double t_res, double threshold) { return t_res < threshold; }

/// Policy parameters together with the model states they were computed from.
struct PolicyDerivation {
  PolicyParams params;
  bool homogeneous = false;
  SteadyState state_actual;
  SlotStats stats_actual;
  SlotStats stats_plus_one;
};

/// ORLA/OLAA parameters for an LBT node joining `background`, protecting it against the
/// alternative of `newcomer` joining as a saturated WiFi station. Uses the saturated
/// homogeneous model when every station (newcomer included) is the same saturated
/// profile, and the renewal-reward model otherwise. Throws DomainError for an empty
/// background (no LIFS opportunities exist).
PolicyDerivation derive_policy(const PhyProfile& phy, const StationList& background,
                               const StationProfile& newcomer, double t_lbt);

}  // namespace coex
