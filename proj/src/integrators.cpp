#include "symevol/integrators.hpp"

#include <cmath>
#include <numeric>

namespace symevol {

std::string_view to_string(Method method) {
  return method == Method::rk4 ? "rk4" : "rk45";
}

Method parse_method(std::string_view text) {
  if (text == "rk4" || text == "fixed-RK4") return Method::rk4;
  if (text == "rk45" || text == "adaptive-RK45") return Method::rk45;
  throw std::invalid_argument("unknown integration method '" + std::string(text) + "'");
}

void IntegratorConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(std::isfinite(t_start) && std::isfinite(t_end) && t_end > t_start,
          "integrator: t_end must exceed t_start");
  require(std::isfinite(sample_dt) && sample_dt > 0.0, "integrator: sample_dt must be positive");
  require(rtol > 0.0 && atol > 0.0, "integrator: tolerances must be positive");
  require(step >= 0.0 && std::isfinite(step), "integrator: step must be non-negative");
  require(method != Method::rk4 || step > 0.0, "integrator: rk4 needs a positive step");
  require(max_steps > 0, "integrator: max_steps must be positive");
}

std::vector<double> sample_grid(double t_start, double t_end, double sample_dt) {
  const double span = t_end - t_start;
  // tolerate rounding in span / sample_dt so that t_end itself is kept
  const auto count = static_cast<std::size_t>(std::floor(span / sample_dt * (1.0 + 1e-12) + 1e-9));
  std::vector<double> grid(count + 1);
  for (std::size_t k = 0; k <= count; ++k) grid[k] = t_start + static_cast<double>(k) * sample_dt;
  return grid;
}

OrderEstimate fit_order(std::span<const double> steps, std::span<const double> errors,
                        double floor) {
  OrderEstimate out;
  out.steps.assign(steps.begin(), steps.end());
  out.errors.assign(errors.begin(), errors.end());
  for (double e : errors) {
    if (!(e > floor)) {
      out.saturated = true;
      return out;
    }
  }
  const std::size_t n = steps.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(steps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(steps[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  out.slope = sxy / sxx;
  return out;
}

}  // namespace symevol
