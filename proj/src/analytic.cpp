#include "coex/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coex/errors.hpp"

namespace coex {

namespace {

constexpr double kSaturatedTol = 1e-10;
constexpr double kHeterogeneousTol = 1e-9;
constexpr int kMaxIterations = 10000;

// prod_{k != i} (1 - tau_k) for every i, without dividing by (1 - tau_i).
ArrayXd others_idle(const ArrayXd& tau) {
  const Eigen::Index n = tau.size();
  ArrayXd prefix(n + 1), suffix(n + 1);
  prefix(0) = 1.0;
  suffix(n) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) * (1.0 - tau(i));
  for (Eigen::Index i = n; i > 0; --i) suffix(i - 1) = suffix(i) * (1.0 - tau(i - 1));
  ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = prefix(i) * suffix(i + 1);
  return out;
}

double saturated_residual(double p, int n, const DcfParams& dcf) {
  const double tau = saturated_tau(p, dcf);
  return p - (1.0 - std::pow(1.0 - tau, n - 1));
}

}  // namespace

double ack_duration(const PhyProfile& phy) { return phy.t_plcp + phy.l_ack / phy.c_ctrl; }

double tx_duration(const PhyProfile& phy, const StationProfile& station) {
  const double burst_bits =
      station.f_agg * (phy.l_del + phy.l_mac_oh + phy.l_pad) + station.payload_b;
  return phy.t_plcp + burst_bits / station.data_rate_c + phy.sifs + ack_duration(phy) + phy.difs;
}

double saturated_tau(double p, const DcfParams& dcf) {
  // (1 - (2p)^m) / (1 - 2p) expanded as a finite geometric sum.
  double geometric = 0.0;
  double term = 1.0;
  for (int k = 0; k < dcf.max_backoff_stage; ++k) {
    geometric += term;
    term *= 2.0 * p;
  }
  const double w = dcf.cw_min;
  return 2.0 / ((w + 1.0) + p * w * geometric);
}

SteadyState solve_saturated_attempt_rate(int n, const DcfParams& dcf) {
  if (n < 1) throw DomainError("solve_saturated_attempt_rate: n must be >= 1");
  dcf.validate();

  double p = 0.0;
  if (saturated_residual(0.0, n, dcf) < 0.0) {
    double lo = 0.0;
    double hi = 1.0 - 1e-12;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (saturated_residual(mid, n, dcf) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    p = 0.5 * (lo + hi);
  }

  const double tau = saturated_tau(p, dcf);
  const double residual = std::abs(saturated_residual(p, n, dcf));
  if (!(residual <= kSaturatedTol)) {
    throw SolverError("saturated attempt-rate solve did not converge", residual);
  }
  SteadyState state;
  state.tau = ArrayXd::Constant(n, tau);
  state.p_cond = ArrayXd::Constant(n, p);
  state.residual = residual;
  return state;
}

SlotStats slot_stats_homogeneous(const SteadyState& state, const PhyProfile& phy,
                                 const StationProfile& station, int n) {
  const double tau = state.tau(0);
  const double t_s = tx_duration(phy, station);

  SlotStats s;
  s.sigma = phy.slot_sigma;
  s.p_idle = std::pow(1.0 - tau, n);
  const double per_station = tau * std::pow(1.0 - tau, n - 1);
  s.p_succ = ArrayXd::Constant(n, per_station);
  s.p_succ_total = n * per_station;
  s.p_coll = 1.0 - s.p_idle - s.p_succ_total;
  s.p_tx = s.p_coll + s.p_succ_total;
  s.t_succ = ArrayXd::Constant(n, t_s);
  s.t_coll = t_s;
  s.t_slot = s.p_idle * phy.slot_sigma + s.p_tx * t_s;
  return s;
}

double wifi_throughput_saturated(const SlotStats& stats, const StationProfile& station) {
  if (stats.size() == 0) return 0.0;
  return stats.p_succ(0) * station.payload_b / stats.t_slot;
}

double lbt_airtime(double rho, const SlotStats& stats, double t_lbt) {
  return rho * stats.p_idle * t_lbt;
}

double mean_backoff_slots(int retry, const DcfParams& dcf) {
  return (static_cast<double>(dcf.window(retry)) - 1.0) / 2.0;
}

double renewal_tau(double p, const StationProfile& station) {
  const DcfParams& dcf = station.dcf;
  double attempts = 0.0;
  double slots = 1.0 / station.arrival_prob_q;
  double pj = 1.0;
  for (int j = 0; j <= dcf.retry_limit; ++j) {
    attempts += pj;
    slots += pj * mean_backoff_slots(j, dcf);
    pj *= p;
  }
  return attempts / slots;
}

SteadyState solve_heterogeneous_attempt_rates(const StationList& stations, const PhyProfile& phy) {
  phy.validate();
  if (stations.empty()) {
    throw DomainError("solve_heterogeneous_attempt_rates: at least one station required");
  }
  for (const auto& s : stations) s.validate();

  const auto n = static_cast<Eigen::Index>(stations.size());
  ArrayXd tau(n);
  for (Eigen::Index i = 0; i < n; ++i) tau(i) = 2.0 / (stations[i].dcf.cw_min + 1.0);

  auto image = [&](const ArrayXd& t, ArrayXd& p) {
    p = 1.0 - others_idle(t);
    ArrayXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) next(i) = renewal_tau(p(i), stations[i]);
    return next;
  };

  ArrayXd p(n);
  double residual = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const ArrayXd next = image(tau, p);
    residual = (next - tau).abs().maxCoeff();
    if (residual <= 1e-13) break;
    tau = 0.5 * tau + 0.5 * next;
  }
  residual = (image(tau, p) - tau).abs().maxCoeff();
  if (!(residual <= kHeterogeneousTol)) {
    throw SolverError("heterogeneous attempt-rate solve did not converge", residual);
  }
  return SteadyState{tau, p, residual};
}

SlotStats slot_stats_heterogeneous(const SteadyState& state, const StationList& stations,
                                   const PhyProfile& phy) {
  const Eigen::Index n = state.size();
  if (n != static_cast<Eigen::Index>(stations.size())) {
    throw DomainError("slot_stats_heterogeneous: state and station list differ in size");
  }
  const ArrayXd& tau = state.tau;

  SlotStats s;
  s.sigma = phy.slot_sigma;
  s.p_idle = (1.0 - tau).prod();
  s.p_succ = tau * others_idle(tau);
  s.p_succ_total = s.p_succ.sum();
  s.p_coll = std::max(0.0, 1.0 - s.p_idle - s.p_succ_total);
  s.p_tx = 1.0 - s.p_idle;
  s.t_succ.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.t_succ(i) = tx_duration(phy, stations[i]);

  // A collision lasts as long as its longest frame. Walk stations from longest to
  // shortest: station k is the longest involved when it transmits, nobody longer does,
  // and at least one shorter one does.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return s.t_succ(a) > s.t_succ(b); });
  std::vector<double> suffix_idle(n + 1, 1.0);
  for (Eigen::Index k = n; k > 0; --k) {
    suffix_idle[k - 1] = suffix_idle[k] * (1.0 - tau(order[k - 1]));
  }
  double longer_idle = 1.0;
  double collision_mass = 0.0;
  double collision_prob = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[k];
    const double pk = tau(i) * longer_idle * (1.0 - suffix_idle[k + 1]);
    collision_mass += pk * s.t_succ(i);
    collision_prob += pk;
    longer_idle *= 1.0 - tau(i);
  }
  s.t_coll = collision_prob > 0.0 ? collision_mass / collision_prob : s.t_succ.maxCoeff();
  s.t_slot = s.p_idle * phy.slot_sigma + (s.p_succ * s.t_succ).sum() + collision_mass;
  return s;
}

double aggregate_wifi_airtime(const SlotStats& stats, std::span<const int> members) {
  double busy = 0.0;
  for (int i : members) {
    if (i < 0 || i >= stats.size()) throw DomainError("aggregate_wifi_airtime: bad index");
    busy += stats.p_succ(i) * stats.t_succ(i);
  }
  return busy / stats.t_slot;
}

ArrayXd station_throughputs(const SlotStats& stats, const StationList& stations) {
  ArrayXd out(stats.size());
  for (Eigen::Index i = 0; i < stats.size(); ++i) {
    out(i) = stats.p_succ(i) * stations[i].payload_b / stats.t_slot;
  }
  return out;
}

double arrival_prob_for_relative_load(double relative_load, const StationProfile& station,
                                      int count, const PhyProfile& phy) {
  if (!(relative_load > 0.0)) throw DomainError("relative load must be positive");
  if (count < 1) throw DomainError("relative load needs at least one station");
  if (relative_load >= 1.0) return 1.0;

  auto throughput_at = [&](double q) {
    StationProfile s = station;
    s.arrival_prob_q = q;
    const StationList list(count, s);
    const auto stats = slot_stats_heterogeneous(solve_heterogeneous_attempt_rates(list, phy), list, phy);
    return station_throughputs(stats, list)(0);
  };
  const double target = relative_load * throughput_at(1.0);
  double lo = 1e-12;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (throughput_at(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi / lo - 1.0 < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace coex
