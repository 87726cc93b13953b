#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symevol/errors.hpp"

namespace symevol {

enum class Method {
  rk4,   // classical fixed-step Runge–Kutta
  rk45,  // Dormand–Prince 5(4) with step-size control
};

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct IntegratorConfig {
  Method method = Method::rk45;
  /// Fixed step for rk4; initial step for rk45 (0 selects one automatically).
  double step = 0.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_start = 0.0;
  double t_end = 1.0;
  double sample_dt = 0.1;
  std::size_t max_steps = 200'000'000;

  void validate() const;
};

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

template <std::size_t N>
struct Solution {
  std::vector<double> t;
  std::vector<std::array<double, N>> y;
  IntegratorStats stats;
};

/// t_start + k·sample_dt for every k with the time not beyond t_end.
std::vector<double> sample_grid(double t_start, double t_end, double sample_dt);

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
  Vec<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
[[noreturn]] void fail(const std::string& why, double t, const Vec<N>& y) {
  std::ostringstream msg;
  msg.precision(17);
  msg << why << " at t = " << t;
  throw IntegrationFailure(msg.str(), t, std::vector<double>(y.begin(), y.end()));
}

/// Cubic Hermite interpolant on [t0, t1].
template <std::size_t N>
Vec<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1,
               const Vec<N>& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }
  return out;
}

/// Emits every grid sample that falls in (t0, t1].
template <std::size_t N>
void emit_samples(Solution<N>& sol, const std::vector<double>& grid, std::size_t& next, double t0,
                  const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1, const Vec<N>& f1) {
  while (next < grid.size() && grid[next] <= t1) {
    const double ts = grid[next];
    sol.t.push_back(ts);
    sol.y.push_back(ts == t1 ? y1 : hermite(t0, y0, f0, t1, y1, f1, ts));
    ++next;
  }
}

template <std::size_t N, class Rhs>
Vec<N> rk4_step(Rhs& rhs, double t, const Vec<N>& y, const Vec<N>& k1, double h) {
  const Vec<N> k2 = rhs(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k1}}));
  const Vec<N> k3 = rhs(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k2}}));
  const Vec<N> k4 = rhs(t + h, axpy<N>(y, h, {{1.0, &k3}}));
  return axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
}

template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1, double rtol, double atol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

template <std::size_t N, class Rhs>
Solution<N> integrate_rk4(Rhs& rhs, const Vec<N>& y0, const IntegratorConfig& cfg,
                          const std::vector<double>& grid) {
  Solution<N> sol;
  double t = cfg.t_start;
  Vec<N> y = y0;
  Vec<N> f = rhs(t, y);
  sol.stats.rhs_evals = 1;
  sol.t.push_back(t);
  sol.y.push_back(y);
  std::size_t next = 1;
  const double t_stop = std::max(cfg.t_end, grid.back());
  const auto n_steps = static_cast<std::size_t>(std::ceil((t_stop - t) / cfg.step - 1e-9));
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (sol.stats.steps >= cfg.max_steps) fail<N>("step budget exhausted", t, y);
    const double t1 = (k + 1 == n_steps) ? t_stop : cfg.t_start + (k + 1) * cfg.step;
    const Vec<N> y1 = rk4_step<N>(rhs, t, y, f, t1 - t);
    if (!all_finite<N>(y1)) fail<N>("non-finite state", t, y);
    const Vec<N> f1 = rhs(t1, y1);
    sol.stats.rhs_evals += 4;
    ++sol.stats.steps;
    emit_samples<N>(sol, grid, next, t, y, f, t1, y1, f1);
    t = t1;
    y = y1;
    f = f1;
  }
  return sol;
}

template <std::size_t N, class Rhs>
double initial_step(Rhs& rhs, double t, const Vec<N>& y, const Vec<N>& f, const IntegratorConfig& cfg) {
  // Hairer–Nørsett–Wanner starting step heuristic.
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d0 = std::max(d0, std::abs(y[i]) / sc);
    d1 = std::max(d1, std::abs(f[i]) / sc);
  }
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, cfg.t_end - cfg.t_start);
  const Vec<N> y1 = axpy<N>(y, h0, {{1.0, &f}});
  const Vec<N> f1 = rhs(t + h0, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d2 = std::max(d2, std::abs(f1[i] - f[i]) / sc / h0);
  }
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, cfg.t_end - cfg.t_start});
}

template <std::size_t N, class Rhs>
Solution<N> integrate_rk45(Rhs& rhs, const Vec<N>& y0, const IntegratorConfig& cfg,
                           const std::vector<double>& grid) {
  // Dormand–Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Solution<N> sol;
  double t = cfg.t_start;
  Vec<N> y = y0;
  Vec<N> k1 = rhs(t, y);
  sol.stats.rhs_evals = 1;
  sol.t.push_back(t);
  sol.y.push_back(y);
  std::size_t next = 1;
  const double t_stop = std::max(cfg.t_end, grid.back());

  double h = cfg.step > 0.0 ? cfg.step : initial_step<N>(rhs, t, y, k1, cfg);
  while (t < t_stop) {
    if (sol.stats.steps + sol.stats.rejected >= cfg.max_steps) fail<N>("step budget exhausted", t, y);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) fail<N>("step size underflow", t, y);
    const bool last = t + h >= t_stop;
    const double hs = last ? t_stop - t : h;

    const Vec<N> k2 = rhs(t + c2 * hs, axpy<N>(y, hs, {{a21, &k1}}));
    const Vec<N> k3 = rhs(t + c3 * hs, axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
    const Vec<N> k4 = rhs(t + c4 * hs, axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec<N> k5 =
        rhs(t + c5 * hs, axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec<N> k6 =
        rhs(t + hs, axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec<N> y1 = axpy<N>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    sol.stats.rhs_evals += 6;
    if (!all_finite<N>(y1)) fail<N>("non-finite state", t, y);
    const double t1 = last ? t_stop : t + hs;
    const Vec<N> k7 = rhs(t1, y1);
    ++sol.stats.rhs_evals;

    Vec<N> err;
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const double en = error_norm<N>(err, y, y1, cfg.rtol, cfg.atol);
    if (!std::isfinite(en)) fail<N>("non-finite error estimate", t, y);
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      ++sol.stats.steps;
      emit_samples<N>(sol, grid, next, t, y, k1, t1, y1, k7);
      t = t1;
      y = y1;
      k1 = k7;
      // keep the pre-clamp step on the final step
      h = last ? h : hs * factor;
    } else {
      ++sol.stats.rejected;
      h = hs * std::min(1.0, factor);
    }
  }
  return sol;
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from cfg.t_start to cfg.t_end and returns the
/// solution on the sample grid (exact grid times, cubic Hermite dense output
/// between accepted steps). Throws IntegrationFailure on step-size underflow,
/// non-finite values or an exhausted step budget.
template <std::size_t N, class Rhs>
Solution<N> integrate(Rhs&& rhs, const std::array<double, N>& y0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!detail::all_finite<N>(y0)) throw std::invalid_argument("integrate: non-finite initial state");
  const auto grid = sample_grid(cfg.t_start, cfg.t_end, cfg.sample_dt);
  if (cfg.method == Method::rk4) return detail::integrate_rk4<N>(rhs, y0, cfg, grid);
  return detail::integrate_rk45<N>(rhs, y0, cfg, grid);
}

/// State at t_end after `steps` equal classical RK4 steps.
template <std::size_t N, class Rhs>
std::array<double, N> rk4_endpoint(Rhs&& rhs, const std::array<double, N>& y0, double t0,
                                   double t_end, std::size_t steps) {
  const double h = (t_end - t0) / static_cast<double>(steps);
  std::array<double, N> y = y0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    y = detail::rk4_step<N>(rhs, t, y, rhs(t, y), h);
  }
  return y;
}

struct OrderEstimate {
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool saturated = false;
  std::vector<double> steps;
  std::vector<double> errors;
};

/// Least-squares slope of log(error) against log(step).
OrderEstimate fit_order(std::span<const double> steps, std::span<const double> errors,
                        double floor);

/// Measures the convergence order of fixed-step RK4 at t_end against a
/// reference solution (computed with rk45 at rtol 1e-13 when not supplied).
/// Steps must form a geometric progression of at least three entries; each is
/// adjusted to divide t_end exactly. Errors at the rounding floor set
/// `saturated` instead of producing a slope.
template <std::size_t N, class Rhs>
OrderEstimate order_check(Rhs&& rhs, const std::array<double, N>& y0, double t_end,
                          std::span<const double> steps,
                          std::optional<std::array<double, N>> reference = std::nullopt) {
  if (steps.size() < 3) throw std::invalid_argument("order_check: need at least three step sizes");
  const double ratio = steps[1] / steps[0];
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || std::abs(steps[i] / steps[i - 1] - ratio) > 1e-9 * std::abs(ratio)) {
      throw std::invalid_argument("order_check: steps must form a geometric progression");
    }
  }
  if (!(t_end > 0.0)) throw std::invalid_argument("order_check: t_end must be positive");
  if (!reference) {
    IntegratorConfig ref;
    ref.rtol = 1e-13;
    ref.atol = 1e-15;
    ref.t_end = t_end;
    ref.sample_dt = t_end;
    reference = integrate<N>(rhs, y0, ref).y.back();
  }
  std::vector<double> used, errors;
  double scale = 1.0;
  for (double v : *reference) scale = std::max(scale, std::abs(v));
  for (double h : steps) {
    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(t_end / h)));
    const auto y = rk4_endpoint<N>(rhs, y0, 0.0, t_end, n);
    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) e = std::max(e, std::abs(y[i] - (*reference)[i]));
    used.push_back(t_end / static_cast<double>(n));
    errors.push_back(e);
  }
  return fit_order(used, errors, 1e3 * std::numeric_limits<double>::epsilon() * scale);
}

}  // namespace symevol
