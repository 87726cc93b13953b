#include "symevol/resonance.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "symevol/errors.hpp"
#include "symevol/integrators.hpp"

namespace symevol {

namespace {

using i128 = __int128;

std::optional<Rational> make_rational(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 kMax = INT64_MAX;
  if (num > kMax || num < -kMax || den > kMax) return std::nullopt;
  return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::optional<Rational> add(std::optional<Rational> x, std::optional<Rational> y) {
  if (!x || !y) return std::nullopt;
  return make_rational(i128(x->num) * y->den + i128(y->num) * x->den, i128(x->den) * y->den);
}

std::optional<Rational> mul(std::optional<Rational> x, std::optional<Rational> y) {
  if (!x || !y) return std::nullopt;
  return make_rational(i128(x->num) * y->num, i128(x->den) * y->den);
}

std::optional<Rational> frac(std::int64_t num, std::int64_t den) { return make_rational(num, den); }

int sign(double x) { return (x > 0.0) - (x < 0.0); }
int sign(const Rational& x) { return (x.num > 0) - (x.num < 0); }

// Root of c1·r1² + c2·r2² = 0 on the open positive quadrant, if any.
void solve_quadratic_rate(ResonanceManifold& m, const QuadraticRate& c, std::optional<Rational> c1_exact,
                          std::optional<Rational> c2_exact) {
  int s1 = sign(c.r1_sq);
  int s2 = sign(c.r2_sq);
  if (c1_exact && c2_exact) {
    s1 = sign(*c1_exact);
    s2 = sign(*c2_exact);
  }
  if (s1 == 0 && s2 == 0) {
    m.degenerate = true;
    return;
  }
  if (s1 == 0 || s2 == 0 || s1 == s2) return;
  m.amplitude_ratio = -c.r2_sq / c.r1_sq;
  if (c1_exact && c2_exact) {
    m.ratio_exact = make_rational(-i128(c2_exact->num) * c1_exact->den, i128(c2_exact->den) * c1_exact->num);
    if (m.ratio_exact) m.amplitude_ratio = m.ratio_exact->value();
  }
}

}  // namespace

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Rational> exact_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued-fraction convergents p/q; accept the first that reproduces x.
  i128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rest = x;
  for (int k = 0; k < 64; ++k) {
    const double a = std::floor(rest);
    if (std::abs(a) > 9e15) return std::nullopt;
    const i128 ai = static_cast<i128>(a);
    const i128 p2 = ai * p1 + p0;
    const i128 q2 = ai * q1 + q0;
    if (q2 > max_den) return std::nullopt;
    if (static_cast<double>(p2) / static_cast<double>(q2) == x) return make_rational(p2, q2);
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double f = rest - a;
    if (f == 0.0) return std::nullopt;
    rest = 1.0 / f;
  }
  return std::nullopt;
}

std::string_view to_string(ResonanceKind kind) {
  switch (kind) {
    case ResonanceKind::first_12:
      return "1:2 first order";
    case ResonanceKind::second_12:
      return "1:2 second order";
    case ResonanceKind::res_13:
      return "1:3";
  }
  return "unknown";
}

std::string_view to_string(AngleStability stability) {
  switch (stability) {
    case AngleStability::unclassified:
      return "unclassified";
    case AngleStability::stable:
      return "stable";
    case AngleStability::unstable:
      return "unstable";
  }
  return "unknown";
}

ResonanceManifold locate_12_first(double E0) {
  if (!(E0 >= 0.0) || !std::isfinite(E0)) throw std::invalid_argument("locate_12_first: E0 must be >= 0");
  ResonanceManifold m;
  m.resonance = ResonanceKind::first_12;
  m.size_order = 0;
  m.timescale_order = 1;
  if (E0 == 0.0) return m;
  m.amplitude_ratio = 8.0;
  m.ratio_exact = Rational{8, 1};
  m.angles = {{0.0, AngleStability::unclassified}, {std::numbers::pi, AngleStability::unclassified}};
  // ½·8r2² + 2r2² = 6r2² = E0
  m.r2_sq = E0 / 6.0;
  m.r1_sq = 8.0 * E0 / 6.0;
  return m;
}

ResonanceManifold locate_12_second(const ModelParams& params) {
  ResonanceManifold m;
  m.resonance = ResonanceKind::second_12;
  m.size_order = 1;
  m.timescale_order = 3;
  const auto c = chi2_coefficients(params.a1, params.a2);
  const auto a1 = exact_rational(params.a1);
  const auto a2 = exact_rational(params.a2);
  const auto c1 = add(add(mul(frac(-1, 6), mul(a1, a1)), mul(frac(1, 2), mul(a1, a2))),
                      mul(frac(1, 15), mul(a2, a2)));
  const auto c2 = add(mul(frac(-2, 1), mul(a1, a2)), mul(frac(29, 60), mul(a2, a2)));
  solve_quadratic_rate(m, c, c1, c2);
  if (m.amplitude_ratio) {
    m.angles = {{0.0, AngleStability::stable}, {std::numbers::pi, AngleStability::unstable}};
  }
  return m;
}

ResonanceManifold locate_13(const ModelParams& params, Chi3Reading reading) {
  ResonanceManifold m;
  m.resonance = ResonanceKind::res_13;
  m.size_order = 2;
  m.timescale_order = 4;
  const auto c = chi3_coefficients(params.a1, params.a2, reading);
  const auto a1 = exact_rational(params.a1);
  const auto a2 = exact_rational(params.a2);
  const auto c1 = add(add(mul(frac(-5, 2), mul(a1, a1)), mul(frac(1, 6), mul(a1, a2))),
                      mul(frac(1, 105), mul(a2, a2)));
  const auto last = reading == Chi3Reading::dimensional ? mul(frac(47, 140), mul(a2, a2)) : frac(47, 140);
  const auto c2 = add(mul(frac(3, 1), mul(a1, a2)), last);
  solve_quadratic_rate(m, c, c1, c2);
  if (m.amplitude_ratio) {
    m.angles = {{0.0, AngleStability::unclassified}, {std::numbers::pi, AngleStability::unclassified}};
  }
  return m;
}

std::string_view to_string(Mode11 mode) {
  switch (mode) {
    case Mode11::q1_normal_mode:
      return "q1-normal-mode";
    case Mode11::q2_normal_mode:
      return "q2-normal-mode";
    case Mode11::in_phase:
      return "in-phase";
    case Mode11::out_of_phase:
      return "out-of-phase";
  }
  return "unknown";
}

std::string_view to_string(Existence existence) {
  switch (existence) {
    case Existence::exists:
      return "yes";
    case Existence::absent:
      return "no";
    case Existence::boundary:
      return "boundary";
  }
  return "unknown";
}

std::string_view to_string(Stability stability) {
  switch (stability) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::boundary:
      return "boundary";
    case Stability::not_applicable:
      return "n/a";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::contradicts:
      return "contradicts";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

namespace {

enum class Tri { inside, outside, boundary };

struct Interval {
  double lo;
  double hi;
};

// Membership in a union of open intervals, with a band around every endpoint.
Tri member(double p, std::initializer_list<Interval> set) {
  for (const auto& iv : set) {
    if (std::abs(p - iv.lo) <= kBoundaryHalfWidth || std::abs(p - iv.hi) <= kBoundaryHalfWidth) {
      return Tri::boundary;
    }
  }
  for (const auto& iv : set) {
    if (p > iv.lo && p < iv.hi) return Tri::inside;
  }
  return Tri::outside;
}

Stability unstable_on(Tri t) {
  switch (t) {
    case Tri::inside:
      return Stability::unstable;
    case Tri::outside:
      return Stability::stable;
    case Tri::boundary:
      return Stability::boundary;
  }
  return Stability::boundary;
}

Stability stable_on(Tri t) {
  switch (t) {
    case Tri::inside:
      return Stability::stable;
    case Tri::outside:
      return Stability::unstable;
    case Tri::boundary:
      return Stability::boundary;
  }
  return Stability::boundary;
}

Existence exists_on(Tri t) {
  switch (t) {
    case Tri::inside:
      return Existence::exists;
    case Tri::outside:
      return Existence::absent;
    case Tri::boundary:
      return Existence::boundary;
  }
  return Existence::boundary;
}

constexpr double kInf = INFINITY;

}  // namespace

std::vector<StabilityReport> classify_11_parameter(double p) {
  if (!std::isfinite(p)) throw Degenerate("classify_11: parameter must be finite");
  std::vector<StabilityReport> out;
  out.push_back({Mode11::q1_normal_mode, Existence::exists,
                 unstable_on(member(p, {{-1.0 / 3.0, 2.0 / 15.0}, {1.0 / 3.0, 2.0 / 3.0}})), p});
  out.push_back({Mode11::q2_normal_mode, Existence::exists, unstable_on(member(p, {{-1.0 / 3.0, 1.0 / 3.0}})),
                 p});

  const Existence in_exists = exists_on(member(p, {{-kInf, 2.0 / 3.0}}));
  Stability in_stable = Stability::not_applicable;
  if (in_exists == Existence::boundary) in_stable = Stability::boundary;
  if (in_exists == Existence::exists) in_stable = stable_on(member(p, {{-1.0 / 3.0, 2.0 / 3.0}}));
  out.push_back({Mode11::in_phase, in_exists, in_stable, p});

  const Existence out_exists = exists_on(member(p, {{-kInf, 2.0 / 15.0}}));
  Stability out_stable = Stability::not_applicable;
  if (out_exists == Existence::boundary) out_stable = Stability::boundary;
  if (out_exists == Existence::exists) out_stable = Stability::stable;
  out.push_back({Mode11::out_of_phase, out_exists, out_stable, p});
  return out;
}

std::vector<StabilityReport> classify_11(double a1, double a2) {
  if (a2 == 0.0) throw Degenerate("classification undefined: a2 = 0");
  return classify_11_parameter(a1 / (3.0 * a2));
}

namespace {

using Stokes = std::array<double, 3>;

Stokes stokes(const PolarState& s) {
  const double c = 2.0 * (s.psi1 - s.psi2);
  const double m = 2.0 * s.r1 * s.r2;
  return {s.r1 * s.r1 - s.r2 * s.r2, m * std::cos(c), m * std::sin(c)};
}

double distance(const Stokes& a, const Stokes& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

// χ̇ on the energy surface at r1² = 2E0·u with cos 2χ = ±1 (sin 2χ = 0, so
// the amplitudes are stationary there).
double chi_rate(double u, double E0, double chi, const ModelParams& p) {
  const PolarState s{std::sqrt(2.0 * E0 * u), chi, std::sqrt(2.0 * E0 * (1.0 - u)), 0.0, 0.0};
  const PolarRate r = avg11_rhs(s, p);
  return r.psi1 - r.psi2;
}

std::optional<double> locate_orbit(double E0, double chi, const ModelParams& p) {
  constexpr int kScan = 400;
  double u_prev = 0.5 / kScan;
  double f_prev = chi_rate(u_prev, E0, chi, p);
  for (int k = 1; k < kScan; ++k) {
    const double u = (k + 0.5) / kScan;
    const double f = chi_rate(u, E0, chi, p);
    if (f_prev == 0.0) return u_prev;
    if (sign(f) != sign(f_prev) && f != 0.0) {
      double lo = u_prev, hi = u;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = chi_rate(mid, E0, chi, p);
        if (sign(fm) == sign(f_prev)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    u_prev = u;
    f_prev = f;
  }
  return std::nullopt;
}

double growth(const PolarState& start, const PolarState& reference, const ModelParams& p, double T,
              const VerifyOptions& opt) {
  const Stokes s_ref = stokes(reference);
  const double d0 = distance(stokes(start), s_ref);
  if (!(d0 > 0.0)) return 0.0;
  IntegratorConfig cfg;
  cfg.rtol = opt.rtol;
  cfg.atol = opt.atol;
  cfg.t_end = T;
  cfg.sample_dt = T / 4000.0;
  const auto traj = integrate_averaged(AveragedSystem::res_11, start, p, cfg);
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, distance(stokes(s), s_ref));
  return worst / d0;
}

}  // namespace

VerificationResult verify_stability_numerically(const StabilityReport& report, double E0, double epsilon,
                                                const VerifyOptions& opt) {
  if (!(E0 > 0.0)) throw std::invalid_argument("verify_stability_numerically: E0 must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("verify_stability_numerically: epsilon must lie in (0, 1)");
  }
  if (!(opt.seed >= 0.0)) throw std::invalid_argument("verify_stability_numerically: seed must be >= 0");

  ModelParams p;
  p.omega = 1.0;
  p.epsilon = epsilon;
  p.a1 = 3.0 * report.parameter;
  p.a2 = 1.0;
  p.delta_override = 0.0;

  const double T = opt.horizon / (epsilon * epsilon * E0);
  const double R = std::sqrt(2.0 * E0);
  const double d = opt.seed;
  VerificationResult out;

  bool expected_exists = true;
  if (report.mode == Mode11::q1_normal_mode || report.mode == Mode11::q2_normal_mode) {
    out.found = true;
    if (d == 0.0) return out;
    const bool q1 = report.mode == Mode11::q1_normal_mode;
    const double quarter = std::numbers::pi / 4.0;
    const PolarState start = q1 ? PolarState{R, 0.0, d * R, -quarter, 0.0} : PolarState{d * R, quarter, R, 0.0, 0.0};
    const PolarState mode = q1 ? PolarState{R, 0.0, 0.0, 0.0, 0.0} : PolarState{0.0, 0.0, R, 0.0, 0.0};
    out.growth = growth(start, mode, p, T, opt);
  } else {
    const double chi = report.mode == Mode11::in_phase ? 0.0 : std::numbers::pi / 2.0;
    expected_exists = report.exists == Existence::exists;
    const auto u = locate_orbit(E0, chi, p);
    out.found = u.has_value();
    if (report.exists == Existence::boundary) return out;
    if (out.found != expected_exists) {
      out.verdict = Verdict::contradicts;
      return out;
    }
    if (!out.found) {
      out.verdict = Verdict::consistent;
      return out;
    }
    out.ratio = *u / (1.0 - *u);
    if (d == 0.0) return out;
    const double r1 = std::sqrt(2.0 * E0 * *u);
    const double r2 = std::sqrt(2.0 * E0 * (1.0 - *u));
    out.growth = growth({r1 * (1.0 + d), chi + d, r2, 0.0, 0.0}, {r1, chi, r2, 0.0, 0.0}, p, T, opt);
  }

  if (report.stable == Stability::boundary || report.stable == Stability::not_applicable) return out;
  std::optional<Stability> observed;
  if (out.growth > opt.unstable_growth) observed = Stability::unstable;
  if (out.growth < opt.stable_growth && out.growth > 0.0) observed = Stability::stable;
  if (!observed) return out;
  out.verdict = *observed == report.stable ? Verdict::consistent : Verdict::contradicts;
  return out;
}

}  // namespace symevol
