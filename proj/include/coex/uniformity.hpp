#pragma once

#include <span>

namespace coex {

/// Two-sided one-sample KS statistic against Uniform(lo, hi).
double ks_statistic_uniform(std::span<const double> samples, double lo, double hi);

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
double ks_p_value(double statistic, std::size_t n);

/// Smallest D rejected at level alpha for n samples.
double ks_critical_value(double alpha, std::size_t n);

}  // namespace coex
