#include "coex/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coex/analytic.hpp"
#include "coex/errors.hpp"
#include "coex/uniformity.hpp"

namespace coex {

namespace {

constexpr double kPsPerUs = 1e6;
constexpr std::uint64_t kLbtStream = 0xffff0000ULL;

std::int64_t to_ps(double us) { return std::llround(us * kPsPerUs); }
double to_us(std::int64_t ps) { return static_cast<double>(ps) / kPsPerUs; }

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::int64_t backoff(std::int64_t window) {
    return std::uniform_int_distribution<std::int64_t>(0, window - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

enum class NodeKind { kWifi, kLaa, kTwin };

struct Contender {
  NodeKind kind = NodeKind::kWifi;
  StationProfile profile;
  std::int64_t success_ps = 0;  ///< channel time of one successful transmission
  double bits_per_success = 0.0;
  Stream rng;

  bool has_packet = false;
  int stage = 0;
  int retries = 0;
  std::int64_t counter = 0;

  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t attempts = 0;
  std::int64_t busy_ps = 0;
  double bits = 0.0;

  Contender(NodeKind k, StationProfile p, std::uint64_t seed, std::uint64_t stream)
      : kind(k), profile(std::move(p)), rng(seed, stream) {}

  void arrival_check() {
    if (profile.saturated() || rng.uniform() < profile.arrival_prob_q) {
      has_packet = true;
      stage = 0;
      retries = 0;
      counter = rng.backoff(profile.dcf.window(0));
    } else {
      has_packet = false;
    }
  }
};

// Residual time from `now` to the next boundary of the period grid anchored at 0.
std::int64_t residual_to_boundary(std::int64_t now, std::int64_t period) {
  const std::int64_t into = now % period;
  return into == 0 ? 0 : period - into;
}

class Engine {
 public:
  explicit Engine(const Scenario& sc) : sc_(sc), lbt_rng_(sc.seed, kLbtStream) {
    sigma_ps_ = to_ps(sc.phy.slot_sigma);
    lifs_ps_ = to_ps(sc.phy.lifs);
    t_lbt_ps_ = to_ps(sc.lbt_t_lbt);
    warmup_ps_ = to_ps(sc.warmup * 1e6);
    end_ps_ = to_ps(sc.sim_duration * 1e6);

    for (std::size_t i = 0; i < sc.stations.size(); ++i) {
      Contender c(NodeKind::kWifi, sc.stations[i], sc.seed, i);
      c.success_ps = to_ps(tx_duration(sc.phy, c.profile));
      c.bits_per_success = c.profile.payload_b;
      contenders_.push_back(std::move(c));
    }
    n_wifi_ = contenders_.size();

    if (sc.lbt_mode == LbtMode::kLaa) {
      StationProfile p;
      p.dcf = *sc.lbt_dcf;
      Contender c(NodeKind::kLaa, p, sc.seed, kLbtStream);
      c.success_ps = t_lbt_ps_;
      c.bits_per_success = sc.lbt_t_lbt * sc.lbt_rate;
      contenders_.push_back(std::move(c));
    } else if (sc.lbt_mode == LbtMode::kWifiLegacy) {
      Contender c(NodeKind::kTwin, sc.twin_station(), sc.seed, kLbtStream);
      c.success_ps = to_ps(tx_duration(sc.phy, c.profile));
      c.bits_per_success = c.profile.payload_b;
      contenders_.push_back(std::move(c));
    }
    for (auto& c : contenders_) c.arrival_check();

    if (sc.policy) {
      const auto sched = burst_schedule(sc.policy->bursts_per_take_nu);
      hold_ps_ = to_ps(sc.policy->bursts_per_take_nu * sc.lbt_t_lbt);
      gap_ps_ = static_cast<std::int64_t>(sched.burst_count() - 1) * lifs_ps_;
      threshold_ps_ = to_ps(sc.policy->olaa_threshold);
    }
  }

  RunMetrics run() {
    const bool orthogonal = sc_.lbt_mode == LbtMode::kOrla || sc_.lbt_mode == LbtMode::kOlaa;
    if (orthogonal && n_wifi_ == 0) {
      run_without_wifi();
    } else {
      run_slots(orthogonal);
    }
    return finish();
  }

 private:
  enum class Bucket { kIdle, kSuccess, kCollision, kLbt };

  // Records [now_, now_ + dur) if it lies in the measurement window. Returns false when
  // the event would cross the end of the run.
  bool advance(std::int64_t dur, Bucket bucket, bool& counted) {
    if (now_ + dur > end_ps_) return false;
    counted = now_ >= warmup_ps_;
    if (counted) {
      if (window_start_ < 0) window_start_ = now_;
      window_end_ = now_ + dur;
      switch (bucket) {
        case Bucket::kIdle: m_.idle_ps += dur; break;
        case Bucket::kSuccess: m_.success_ps += dur; break;
        case Bucket::kCollision: m_.collision_ps += dur; break;
        case Bucket::kLbt: m_.lbt_hold_ps += dur; break;
      }
    }
    now_ += dur;
    return true;
  }

  void run_slots(bool orthogonal) {
    std::vector<std::size_t> tx;
    tx.reserve(contenders_.size());
    while (true) {
      tx.clear();
      for (std::size_t i = 0; i < contenders_.size(); ++i) {
        if (contenders_[i].has_packet && contenders_[i].counter == 0) tx.push_back(i);
      }

      const std::int64_t slot_start = now_;
      bool counted = false;
      bool wifi_busy = false;
      if (tx.empty()) {
        if (!advance(sigma_ps_, Bucket::kIdle, counted)) return;
        if (counted) ++m_.idle_slots;
      } else if (tx.size() == 1) {
        Contender& c = contenders_[tx[0]];
        const Bucket b = c.kind == NodeKind::kWifi ? Bucket::kSuccess : Bucket::kLbt;
        if (!advance(c.success_ps, b, counted)) return;
        if (counted) {
          ++m_.busy_slots;
          ++c.successes;
          ++c.attempts;
          c.busy_ps += c.success_ps;
          c.bits += delivered_bits(c, slot_start);
        }
        wifi_busy = c.kind == NodeKind::kWifi;
      } else {
        std::int64_t dur = 0;
        bool lbt_involved = false;
        for (std::size_t i : tx) {
          dur = std::max(dur, contenders_[i].success_ps);
          lbt_involved = lbt_involved || contenders_[i].kind != NodeKind::kWifi;
        }
        if (!advance(dur, Bucket::kCollision, counted)) return;
        if (counted) {
          ++m_.busy_slots;
          ++m_.wifi_collision_slots;
          if (lbt_involved) ++m_.lbt_collisions;
          for (std::size_t i : tx) {
            ++contenders_[i].collisions;
            ++contenders_[i].attempts;
          }
        }
        wifi_busy = true;
      }

      update_contenders(tx);

      if (orthogonal && wifi_busy && !opportunity()) return;
    }
  }

  double delivered_bits(const Contender& c, std::int64_t start) const {
    if (c.kind == NodeKind::kLaa && sc_.lbt_sync) {
      const std::int64_t res = residual_to_boundary(start, t_lbt_ps_);
      return to_us(t_lbt_ps_ - res) * sc_.lbt_rate;
    }
    return c.bits_per_success;
  }

  void update_contenders(const std::vector<std::size_t>& tx) {
    const bool success = tx.size() == 1;
    std::size_t next_tx = 0;
    for (std::size_t i = 0; i < contenders_.size(); ++i) {
      Contender& c = contenders_[i];
      const bool transmitted = next_tx < tx.size() && tx[next_tx] == i;
      if (transmitted) {
        ++next_tx;
        if (success) {
          c.arrival_check();
        } else {
          ++c.retries;
          if (sc_.drop_at_retry_limit && c.retries > c.profile.dcf.retry_limit) {
            c.arrival_check();
          } else {
            c.stage = std::min(c.stage + 1, c.profile.dcf.max_backoff_stage);
            c.counter = c.rng.backoff(c.profile.dcf.window(c.stage));
          }
        }
      } else if (c.has_packet) {
        --c.counter;
      } else {
        c.arrival_check();
      }
    }
  }

  // LIFS opportunity right after a WiFi busy slot. Returns false when the run ends.
  bool opportunity() {
    const bool in_window = now_ >= warmup_ps_;
    bool take = false;
    std::int64_t reserve = 0;
    if (sc_.lbt_mode == LbtMode::kOrla) {
      take = orla_decide(lbt_rng_.uniform(), sc_.policy->take_prob_pi);
    } else {
      reserve = residual_to_boundary(now_, t_lbt_ps_);
      if (in_window) m_.t_res_samples.push_back(to_us(reserve));
      take = reserve < threshold_ps_;
    }
    if (in_window) ++m_.lbt_opportunities;
    if (!take) return true;
    return hold(reserve);
  }

  bool hold(std::int64_t reserve) {
    bool counted = false;
    if (!advance(hold_ps_, Bucket::kLbt, counted)) return false;
    if (counted) {
      ++m_.lbt_takes;
      ++m_.lbt_holds;
      const std::int64_t data = std::max<std::int64_t>(0, hold_ps_ - gap_ps_ - reserve);
      lbt_bits_ += to_us(data) * sc_.lbt_rate;
    }
    return true;
  }

  // No WiFi: no LIFS opportunities exist, so the LBT node falls back to taking the
  // channel back-to-back, one T_LBT hold per LIFS.
  void run_without_wifi() {
    hold_ps_ = t_lbt_ps_;
    gap_ps_ = 0;
    while (true) {
      std::int64_t reserve = 0;
      if (sc_.lbt_mode == LbtMode::kOlaa) {
        reserve = residual_to_boundary(now_, t_lbt_ps_);
        if (now_ >= warmup_ps_) m_.t_res_samples.push_back(to_us(reserve));
      }
      const bool in_window = now_ >= warmup_ps_;
      if (!hold(reserve)) return;
      if (in_window) ++m_.lbt_opportunities;
      bool counted = false;
      if (!advance(lifs_ps_, Bucket::kIdle, counted)) return;
    }
  }

  RunMetrics finish() {
    m_.window_ps = m_.idle_ps + m_.success_ps + m_.collision_ps + m_.lbt_hold_ps;
    const std::int64_t span = window_start_ < 0 ? 0 : window_end_ - window_start_;
    if (span != m_.window_ps) {
      throw InvariantViolation("time accounting does not cover the measurement window");
    }
    if ((sc_.lbt_mode == LbtMode::kOrla || sc_.lbt_mode == LbtMode::kOlaa) &&
        m_.lbt_collisions != 0) {
      throw InvariantViolation("orthogonal LBT node was involved in a collision");
    }
    if (m_.window_ps == 0) throw ConfigError("simulation window holds no complete event");

    const double window_us = to_us(m_.window_ps);
    const double window = static_cast<double>(m_.window_ps);
    m_.window_us = window_us;
    m_.t_lbt = sc_.lbt_t_lbt;
    m_.idle_fraction = m_.idle_ps / window;
    m_.collision_fraction = m_.collision_ps / window;

    for (std::size_t i = 0; i < n_wifi_; ++i) {
      const Contender& c = contenders_[i];
      m_.per_station_goodput.push_back(c.bits / window_us);
      m_.per_station_airtime.push_back(c.busy_ps / window);
      m_.per_station_successes.push_back(c.successes);
      m_.per_station_collisions.push_back(c.collisions);
    }
    if (contenders_.size() > n_wifi_) {
      const Contender& lbt = contenders_.back();
      m_.lbt_goodput = lbt.bits / window_us;
      m_.lbt_airtime = lbt.busy_ps / window;
      m_.lbt_takes = lbt.successes;
      m_.lbt_opportunities = lbt.attempts;
      m_.lbt_holds = lbt.successes;
    } else {
      m_.lbt_goodput = lbt_bits_ / window_us;
      m_.lbt_airtime = m_.lbt_hold_ps / window;
    }
    return std::move(m_);
  }

  const Scenario& sc_;
  Stream lbt_rng_;
  std::vector<Contender> contenders_;
  std::size_t n_wifi_ = 0;

  std::int64_t sigma_ps_ = 0;
  std::int64_t lifs_ps_ = 0;
  std::int64_t t_lbt_ps_ = 0;
  std::int64_t warmup_ps_ = 0;
  std::int64_t end_ps_ = 0;
  std::int64_t hold_ps_ = 0;
  std::int64_t gap_ps_ = 0;
  std::int64_t threshold_ps_ = 0;

  std::int64_t now_ = 0;
  std::int64_t window_start_ = -1;
  std::int64_t window_end_ = 0;
  double lbt_bits_ = 0.0;
  RunMetrics m_;
};

}  // namespace

std::string_view to_string(LbtMode mode) {
  switch (mode) {
    case LbtMode::kNone: return "none";
    case LbtMode::kWifiLegacy: return "wifi_legacy";
    case LbtMode::kLaa: return "laa";
    case LbtMode::kOrla: return "orla";
    case LbtMode::kOlaa: return "olaa";
  }
  return "none";
}

LbtMode parse_lbt_mode(std::string_view name) {
  for (LbtMode m : {LbtMode::kNone, LbtMode::kWifiLegacy, LbtMode::kLaa, LbtMode::kOrla,
                    LbtMode::kOlaa}) {
    if (to_string(m) == name) return m;
  }
  throw ParseError("unknown lbt mode '" + std::string(name) + "'");
}

void Scenario::validate() const {
  phy.validate();
  for (const auto& s : stations) s.validate();
  if (!(warmup >= 0.0)) throw ConfigError("scenario: warmup must be >= 0");
  if (!(sim_duration > warmup)) throw ConfigError("scenario: sim_duration must exceed warmup");
  if (lbt_mode != LbtMode::kNone) {
    if (!(lbt_t_lbt > 0.0)) throw ConfigError("scenario: lbt t_lbt must be positive");
    if (!(lbt_rate > 0.0)) throw ConfigError("scenario: lbt rate must be positive");
  }
  if (lbt_sync && lbt_mode != LbtMode::kLaa) {
    throw ConfigError("scenario: lbt sync applies to laa mode only");
  }
  switch (lbt_mode) {
    case LbtMode::kOrla:
    case LbtMode::kOlaa:
      if (!policy) throw ConfigError("scenario: orla/olaa modes require policy parameters");
      policy->validate();
      if (std::abs(policy->t_lbt - lbt_t_lbt) > 1e-9) {
        throw ConfigError("scenario: policy t_lbt differs from lbt t_lbt");
      }
      break;
    case LbtMode::kLaa:
    case LbtMode::kWifiLegacy:
      if (!lbt_dcf) throw ConfigError("scenario: laa/wifi_legacy modes require lbt dcf");
      lbt_dcf->validate();
      break;
    case LbtMode::kNone:
      break;
  }
}

StationProfile Scenario::twin_station() const {
  StationProfile s = stations.empty() ? StationProfile{} : stations.front();
  s.data_rate_c = lbt_rate;
  s.arrival_prob_q = 1.0;
  if (lbt_dcf) s.dcf = *lbt_dcf;
  return s;
}

Scenario Scenario::legacy_twin() const {
  Scenario twin = *this;
  twin.lbt_mode = LbtMode::kWifiLegacy;
  twin.lbt_sync = false;
  twin.policy.reset();
  if (!twin.lbt_dcf) twin.lbt_dcf = stations.empty() ? DcfParams{} : stations.front().dcf;
  return twin;
}

double RunMetrics::mean_wifi_goodput() const {
  if (per_station_goodput.empty()) return 0.0;
  return std::accumulate(per_station_goodput.begin(), per_station_goodput.end(), 0.0) /
         static_cast<double>(per_station_goodput.size());
}

double RunMetrics::total_wifi_airtime() const {
  return std::accumulate(per_station_airtime.begin(), per_station_airtime.end(), 0.0);
}

RunMetrics run_scenario(const Scenario& scenario) {
  scenario.validate();
  return Engine(scenario).run();
}

namespace {

struct OpportunityTrace {
  std::vector<double> gaps;      // µs between consecutive opportunities
  std::vector<double> residual;  // µs
};

OpportunityTrace draw_opportunities(double p_idle, double t_slot, double t_lbt,
                                    std::int64_t draws, std::uint64_t seed) {
  if (!(p_idle >= 0.0 && p_idle < 1.0)) throw DomainError("monte carlo: P_idle must be in [0, 1)");
  if (!(t_slot > 0.0 && t_lbt > 0.0)) throw DomainError("monte carlo: durations must be positive");
  if (draws < 1) throw DomainError("monte carlo: draws must be positive");
  std::mt19937_64 engine(seed);
  std::geometric_distribution<std::int64_t> extra_slots(1.0 - p_idle);
  std::uniform_real_distribution<double> res(0.0, t_lbt);
  OpportunityTrace tr;
  tr.gaps.reserve(draws);
  tr.residual.reserve(draws);
  for (std::int64_t i = 0; i < draws; ++i) {
    tr.gaps.push_back(static_cast<double>(1 + extra_slots(engine)) * t_slot);
    tr.residual.push_back(res(engine));
  }
  return tr;
}

double rate_on_trace(const OpportunityTrace& tr, double t_lbt, double threshold) {
  double reward = 0.0;
  double elapsed = 0.0;
  for (std::size_t i = 0; i < tr.gaps.size(); ++i) {
    elapsed += tr.gaps[i];
    if (olaa_decide(tr.residual[i], threshold)) {
      reward += t_lbt - tr.residual[i];
      elapsed += t_lbt;
    }
  }
  return reward / elapsed;
}

}  // namespace

double monte_carlo_rate(double p_idle, double t_slot, double t_lbt, double threshold,
                        std::int64_t draws, std::uint64_t seed) {
  return rate_on_trace(draw_opportunities(p_idle, t_slot, t_lbt, draws, seed), t_lbt, threshold);
}

MonteCarloLambda monte_carlo_lambda(double p_idle, double t_slot, double t_lbt,
                                    int threshold_grid, std::int64_t draws, std::uint64_t seed) {
  if (threshold_grid < 2) throw DomainError("monte_carlo_lambda: grid needs >= 2 thresholds");
  const auto trace = draw_opportunities(p_idle, t_slot, t_lbt, draws, seed);
  MonteCarloLambda best;
  for (int j = 0; j < threshold_grid; ++j) {
    const double thr = t_lbt * j / (threshold_grid - 1);
    const double rate = rate_on_trace(trace, t_lbt, thr);
    if (rate > best.best_rate) {
      best.best_rate = rate;
      best.best_threshold = thr;
    }
  }
  return best;
}

UniformityTest sample_t_res_distribution(const RunMetrics& metrics) {
  if (metrics.t_res_samples.size() < 10000) {
    throw DomainError("sample_t_res_distribution: need at least 1e4 T_res samples");
  }
  UniformityTest t;
  t.samples = metrics.t_res_samples.size();
  t.statistic = ks_statistic_uniform(metrics.t_res_samples, 0.0, metrics.t_lbt);
  t.p_value = ks_p_value(t.statistic, t.samples);
  return t;
}

}  // namespace coex
