#pragma once

#include <Eigen/Core>

namespace coex {

struct GaussLegendreRule {
  Eigen::ArrayXd nodes;    ///< on [-1, 1], ascending
  Eigen::ArrayXd weights;
};

/// n-point Gauss-Legendre rule via the Golub-Welsch eigenproblem.
GaussLegendreRule gauss_legendre(int n);

/// Integral of f over [a, b] with the given rule.
template <typename F>
double integrate(const GaussLegendreRule& rule, double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights(i) * f(mid + half * rule.nodes(i));
  }
  return half * acc;
}

}  // namespace coex
