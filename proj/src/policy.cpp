#include "coex/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coex/errors.hpp"
#include "coex/quadrature.hpp"

namespace coex {

namespace {

const GaussLegendreRule& rule200() {
  static const GaussLegendreRule rule = gauss_legendre(200);
  return rule;
}

void check_idle(double p_idle, const char* who) {
  if (!(p_idle > 0.0 && p_idle < 1.0)) {
    throw DomainError(std::string(who) + ": P_idle must lie strictly inside (0, 1)");
  }
}

}  // namespace

void PolicyParams::validate() const {
  if (!(rho_bar >= 0.0)) throw ConfigError("policy: rho_bar must be >= 0");
  if (!(take_prob_pi >= 0.0 && take_prob_pi <= 1.0)) {
    throw ConfigError("policy: take probability must be in [0, 1]");
  }
  if (!(bursts_per_take_nu >= 1.0) || !std::isfinite(bursts_per_take_nu)) {
    throw ConfigError("policy: bursts per take must be finite and >= 1");
  }
  if (!(lambda_opt >= 0.0 && lambda_opt <= 1.0)) throw ConfigError("policy: lambda must be in [0, 1]");
  if (!(t_lbt > 0.0)) throw ConfigError("policy: t_lbt must be positive");
  if (!(olaa_threshold >= 0.0 && olaa_threshold <= t_lbt)) {
    throw ConfigError("policy: OLAA threshold must be in [0, t_lbt]");
  }
}

double rho_bar_homogeneous(const SlotStats& stats_n, const SlotStats& stats_n1, double t,
                           double t_lbt, double sigma) {
  if (!(t > sigma)) throw DomainError("rho_bar_homogeneous: frame duration must exceed sigma");
  if (!(t_lbt > 0.0)) throw DomainError("rho_bar_homogeneous: t_lbt must be positive");
  check_idle(stats_n.p_idle, "rho_bar_homogeneous");

  const double succ_n = stats_n.p_succ(0);
  const double succ_n1 = stats_n1.p_succ(0);
  const double bound = (stats_n1.p_tx / succ_n1) * (succ_n / stats_n.p_idle) -
                       stats_n.p_tx / stats_n.p_idle;
  return std::max(0.0, (t - sigma) / t_lbt * std::min(1.0, bound));
}

double rho_bar_heterogeneous(const SlotStats& stats_actual, const SlotStats& stats_plus_one,
                             std::span<const int> members, double t_lbt) {
  if (members.empty()) return std::numeric_limits<double>::infinity();
  if (!(t_lbt > 0.0)) throw DomainError("rho_bar_heterogeneous: t_lbt must be positive");
  if (!(stats_actual.p_idle > 0.0)) {
    throw DomainError("rho_bar_heterogeneous: no idle slots in the background system");
  }
  double busy_actual = 0.0;
  double busy_plus_one = 0.0;
  for (int i : members) {
    if (i < 0 || i >= stats_actual.size() || i >= stats_plus_one.size()) {
      throw DomainError("rho_bar_heterogeneous: member index out of range");
    }
    busy_actual += stats_actual.p_succ(i) * stats_actual.t_succ(i);
    busy_plus_one += stats_plus_one.p_succ(i) * stats_plus_one.t_succ(i);
  }
  if (!(busy_plus_one > 0.0)) {
    throw DomainError("rho_bar_heterogeneous: members hold no airtime with the newcomer");
  }
  const double slack =
      busy_actual / busy_plus_one * stats_plus_one.t_slot - stats_actual.t_slot;
  return std::max(0.0, slack / (stats_actual.p_idle * t_lbt));
}

double take_probability(double rho, double p_idle) {
  if (!(rho >= 0.0)) throw DomainError("take_probability: rho must be >= 0");
  check_idle(p_idle, "take_probability");
  if (std::isinf(rho)) return 1.0;
  return std::min(1.0, rho * p_idle / (1.0 - p_idle));
}

double bursts_per_take(double rho, double p_idle) {
  if (!(rho >= 0.0)) throw DomainError("bursts_per_take: rho must be >= 0");
  check_idle(p_idle, "bursts_per_take");
  const double nu = std::max(1.0, rho * p_idle / (1.0 - p_idle));
  if (!std::isfinite(nu)) throw DomainError("bursts_per_take: unbounded burst count");
  return nu;
}

BurstSchedule burst_schedule(double nu) {
  if (!(nu >= 1.0) || !std::isfinite(nu)) throw DomainError("burst_schedule: nu must be >= 1");
  BurstSchedule s;
  const double whole = std::floor(nu);
  s.full_bursts = static_cast<int>(whole);
  s.last_fraction = nu - whole;
  return s;
}

double uniform_residual_density(double /*t_res*/, double t_lbt) { return 1.0 / t_lbt; }

double expected_excess_reward(double lambda, double t_lbt, const ResidualLaw& law) {
  // (T - T_res - lambda T)^+ is positive only for T_res < (1 - lambda) T, so integrate
  // the smooth part and keep the kink at the interval end.
  const double cut = std::clamp(1.0 - lambda, 0.0, 1.0) * t_lbt;
  if (cut <= 0.0) return 0.0;
  return integrate(rule200(), 0.0, cut,
                   [&](double u) { return (cut - u) * law(u, t_lbt); });
}

double solve_lambda_opt(double p_idle, double t_slot, double t_lbt, const ResidualLaw& law) {
  check_idle(p_idle, "solve_lambda_opt");
  if (!(t_slot > 0.0) || !(t_lbt > 0.0)) {
    throw DomainError("solve_lambda_opt: durations must be positive");
  }
  const double wait = t_slot / (1.0 - p_idle);
  // h is strictly decreasing: h(0) = E[Y] >= 0 and h(1) = -wait < 0.
  auto h = [&](double lambda) { return expected_excess_reward(lambda, t_lbt, law) - lambda * wait; };

  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  const double residual = std::abs(h(lambda));
  if (!(residual <= 1e-8 * t_lbt)) {
    throw SolverError("lambda fixed point did not converge", residual);
  }
  return lambda;
}

double olaa_threshold(double lambda_opt, double take_prob_pi, double t_lbt) {
  const double thr = std::min(t_lbt * (1.0 - lambda_opt), take_prob_pi * t_lbt);
  return std::clamp(thr, 0.0, t_lbt);
}

PolicyDerivation derive_policy(const PhyProfile& phy, const StationList& background,
                               const StationProfile& newcomer, double t_lbt) {
  if (background.empty()) {
    throw DomainError("derive_policy: no WiFi stations, so no LIFS opportunities");
  }
  if (!(t_lbt > 0.0)) throw DomainError("derive_policy: t_lbt must be positive");
  phy.validate();
  newcomer.validate();

  PolicyDerivation out;
  const bool homogeneous =
      newcomer.saturated() &&
      std::all_of(background.begin(), background.end(),
                  [&](const StationProfile& s) { return s == newcomer; });
  out.homogeneous = homogeneous;
  const int n = static_cast<int>(background.size());

  if (homogeneous) {
    out.state_actual = solve_saturated_attempt_rate(n, newcomer.dcf);
    out.stats_actual = slot_stats_homogeneous(out.state_actual, phy, newcomer, n);
    const auto plus = solve_saturated_attempt_rate(n + 1, newcomer.dcf);
    out.stats_plus_one = slot_stats_homogeneous(plus, phy, newcomer, n + 1);
    out.params.rho_bar = rho_bar_homogeneous(out.stats_actual, out.stats_plus_one,
                                             tx_duration(phy, newcomer), t_lbt, phy.slot_sigma);
  } else {
    StationList plus_one = background;
    plus_one.push_back(newcomer);
    out.state_actual = solve_heterogeneous_attempt_rates(background, phy);
    out.stats_actual = slot_stats_heterogeneous(out.state_actual, background, phy);
    const auto plus = solve_heterogeneous_attempt_rates(plus_one, phy);
    out.stats_plus_one = slot_stats_heterogeneous(plus, plus_one, phy);
    std::vector<int> members(n);
    std::iota(members.begin(), members.end(), 0);
    out.params.rho_bar = rho_bar_heterogeneous(out.stats_actual, out.stats_plus_one, members, t_lbt);
  }

  const double p_idle = out.stats_actual.p_idle;
  out.params.t_lbt = t_lbt;
  out.params.take_prob_pi = take_probability(out.params.rho_bar, p_idle);
  out.params.bursts_per_take_nu = bursts_per_take(out.params.rho_bar, p_idle);
  out.params.lambda_opt = solve_lambda_opt(p_idle, out.stats_actual.t_slot, t_lbt);
  out.params.olaa_threshold =
      olaa_threshold(out.params.lambda_opt, out.params.take_prob_pi, t_lbt);
  return out;
}

}  // namespace coex
