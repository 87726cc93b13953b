#include "symevol/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace symevol {

namespace {

// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
  nodes_.resize(order);
  weights_.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[order - 1 - i] = x;
    weights_[i] = w;
    weights_[order - 1 - i] = w;
  }
}

const GaussLegendre& gauss16() {
  static const GaussLegendre rule(16);
  return rule;
}

}  // namespace symevol
