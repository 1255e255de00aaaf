#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "coex/errors.hpp"
#include "coex/policy.hpp"
#include "coex/simulator.hpp"
#include "coex/uniformity.hpp"

namespace coex {
namespace {

TEST(KolmogorovSmirnov, CriticalValues) {
  // Tabulated asymptotic values: 1.628 / sqrt(n) at alpha 0.01, 1.358 / sqrt(n) at 0.05.
  EXPECT_NEAR(ks_critical_value(0.01, 100000) * std::sqrt(100000.0), 1.6276, 2e-3);
  EXPECT_NEAR(ks_critical_value(0.05, 100000) * std::sqrt(100000.0), 1.3581, 2e-3);
  EXPECT_NEAR(ks_p_value(ks_critical_value(0.01, 500), 500), 0.01, 1e-6);
}

TEST(KolmogorovSmirnov, StatisticOfKnownSample) {
  const std::vector<double> s{0.1, 0.4, 0.7};
  // D = max over i of max(i/n - x_i, x_i - (i-1)/n) = max(0.2333, 0.1, 0.1333, ...) on [0,1]
  EXPECT_NEAR(ks_statistic_uniform(s, 0.0, 1.0), 0.3, 1e-12);
  EXPECT_THROW(ks_statistic_uniform({}, 0.0, 1.0), std::invalid_argument);
}

TEST(KolmogorovSmirnov, CalibratedOnUniformDraws) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  int rejected = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> s(2000);
    for (auto& x : s) x = u(rng);
    rejected += ks_p_value(ks_statistic_uniform(s, 0.0, 1000.0), s.size()) < 0.01;
  }
  EXPECT_LE(rejected, 8);  // expected 2, binomial tail
}

TEST(KolmogorovSmirnov, RejectsLattice) {
  std::vector<double> s;
  for (int i = 0; i < 20000; ++i) s.push_back(250.0 * (i % 2));
  EXPECT_LT(ks_p_value(ks_statistic_uniform(s, 0.0, 1000.0), s.size()), 1e-6);
}

TEST(MonteCarlo, ThresholdZeroNeverTakes) {
  EXPECT_EQ(monte_carlo_rate(0.5, 100.0, 1000.0, 0.0, 100000, 1), 0.0);
}

TEST(MonteCarlo, TakeAllBelowBest) {
  const double p_idle = 0.5;
  const double t_lbt = 1000.0;
  const double t_slot = 0.5 * (1 - p_idle) * t_lbt;  // beta = 0.5
  const auto best = monte_carlo_lambda(p_idle, t_slot, t_lbt, 50, 200000, 5);
  EXPECT_LT(monte_carlo_rate(p_idle, t_slot, t_lbt, t_lbt, 200000, 5), best.best_rate);
  EXPECT_NEAR(best.best_rate / solve_lambda_opt(p_idle, t_slot, t_lbt), 1.0, 0.02);
}

TEST(MonteCarlo, OptimalThresholdBeatsGrid) {
  const double p_idle = 0.6;
  const double t_lbt = 1000.0;
  const double t_slot = 0.4 * t_lbt;  // beta = 1
  const long draws = 1000000;
  const double lambda = solve_lambda_opt(p_idle, t_slot, t_lbt);
  const double opt = monte_carlo_rate(p_idle, t_slot, t_lbt, (1 - lambda) * t_lbt, draws, 9);
  // Relative standard error of a renewal-reward ratio at this size is well under 0.2%.
  for (int j = 0; j < 50; ++j) {
    const double thr = t_lbt * j / 49.0;
    EXPECT_LE(monte_carlo_rate(p_idle, t_slot, t_lbt, thr, draws, 9), opt * 1.004) << thr;
  }
}

TEST(MonteCarlo, DomainChecks) {
  EXPECT_THROW(monte_carlo_lambda(0.5, 10.0, 1000.0, 1, 1000, 1), DomainError);
  EXPECT_THROW(monte_carlo_rate(1.0, 10.0, 1000.0, 10.0, 1000, 1), DomainError);
}

TEST(TResDistribution, NeedsEnoughSamples) {
  RunMetrics m;
  m.t_lbt = 1000.0;
  m.t_res_samples.assign(100, 1.0);
  EXPECT_THROW(sample_t_res_distribution(m), DomainError);
}

TEST(TResDistribution, UniformSamplesAccepted) {
  RunMetrics m;
  m.t_lbt = 1000.0;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 50000; ++i) m.t_res_samples.push_back(u(rng));
  const auto t = sample_t_res_distribution(m);
  EXPECT_EQ(t.samples, 50000u);
  EXPECT_GT(t.p_value, 0.01);
}

}  // namespace
}  // namespace coex
