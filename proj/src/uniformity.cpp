#include "coex/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace coex {

double ks_statistic_uniform(std::span<const double> samples, double lo, double hi) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic_uniform: no samples");
  if (!(hi > lo)) throw std::invalid_argument("ks_statistic_uniform: empty support");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = std::clamp((sorted[i] - lo) / (hi - lo), 0.0, 1.0);
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - cdf, cdf - di / n});
  }
  return d;
}

double ks_p_value(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(double alpha, std::size_t n) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ks_p_value(mid, n) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace coex
