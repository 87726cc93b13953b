#pragma once

#include <cstddef>
#include <vector>

namespace symevol {

/// Gauss–Legendre rule on [−1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Composite rule over [a, b] with `panels` equal panels; f returns a
  /// std::vector<double> of fixed size.
  template <class F>
  std::vector<double> integrate(F&& f, double a, double b, int panels) const {
    std::vector<double> sum;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double mid = a + (k + 0.5) * h;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto v = f(mid + 0.5 * h * nodes_[i]);
        if (sum.empty()) sum.assign(v.size(), 0.0);
        const double w = 0.5 * h * weights_[i];
        for (std::size_t j = 0; j < v.size(); ++j) sum[j] += w * v[j];
      }
    }
    return sum;
  }

  template <class F>
  double integrate_scalar(F&& f, double a, double b, int panels) const {
    double sum = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double mid = a + (k + 0.5) * h;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        sum += 0.5 * h * weights_[i] * f(mid + 0.5 * h * nodes_[i]);
      }
    }
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared 16-point rule.
const GaussLegendre& gauss16();

}  // namespace symevol
