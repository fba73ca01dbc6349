#pragma once

// Matching geometry and oscillation structure of the inner solution: the
// semicubic parabola, the stationary-point cubic and dip phases outside it,
// the two-phase frequencies inside it, and the ε-scaling of the focus.

#include <sfocus/errors.hpp>
#include <sfocus/ngo.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace sfocus {

/// x = ±√(18a)|t|^{2/3}.
inline std::pair<double, double> parabola_edge(const FocusFrame& frame, double t) {
  frame.validate();
  const double x = frame.support_s() * std::pow(std::abs(t), 2.0 / 3.0);
  return {-x, x};
}

/// s = 3√(2a), the only s where the stationary-point cubic has a double root.
inline double parabola_s(const FocusFrame& frame) { return 3.0 * std::sqrt(2.0 * frame.a); }

enum class RootClass { three_real_distinct, double_root, one_real };

inline const char* to_string(RootClass c) {
  switch (c) {
  case RootClass::three_real_distinct: return "three-real-distinct";
  case RootClass::double_root: return "double-root";
  case RootClass::one_real: return "one-real";
  }
  return "?";
}

struct CubicRoots {
  std::array<cplx, 3> roots;
  RootClass classification = RootClass::one_real;
  double s = 0.0;
  double d = 0.0;
  double discriminant = 0.0;
};

namespace detail {
inline cplx cubic_value(double s, double d, cplx f) { return 2.0 * f * f * f - s * f * f + d; }

inline cplx polish_root(double s, double d, cplx f) {
  for (int k = 0; k < 8; ++k) {
    const cplx p = cubic_value(s, d, f);
    const cplx dp = 6.0 * f * f - 2.0 * s * f;
    if (std::abs(dp) < 1e-300) break;
    const cplx step = p / dp;
    f -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(f))) break;
  }
  return f;
}
} // namespace detail

/// Roots of 2f³ − sf² + d = 0, d = (2a)^{3/2}, sorted by real then imaginary part.
inline CubicRoots stationary_points(double s, const FocusFrame& frame) {
  frame.validate();
  if (!std::isfinite(s)) throw DomainError("stationary_points: s must be finite");
  CubicRoots out;
  out.s = s;
  out.d = frame.d();
  const double d = out.d;
  // discriminant of 2f³ − sf² + d
  out.discriminant = 4.0 * s * s * s * d - 108.0 * d * d;
  const double scale = 4.0 * std::abs(s * s * s) * d + 108.0 * d * d;

  if (std::abs(out.discriminant) <= 1e-12 * scale) {
    out.classification = RootClass::double_root;
    out.roots = {cplx(s / 3.0), cplx(s / 3.0), cplx(-s / 6.0)};
  } else {
    // f = g + s/6 removes the quadratic term: g³ + pg + q = 0
    const double p = -s * s / 12.0;
    const double q = -s * s * s / 108.0 + d / 2.0;
    const double shift = s / 6.0;
    if (out.discriminant > 0.0) {
      out.classification = RootClass::three_real_distinct;
      const double m = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
      const double th = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k)
        out.roots[k] = cplx(m * std::cos(th - 2.0 * std::numbers::pi * k / 3.0) + shift);
    } else {
      out.classification = RootClass::one_real;
      const double disc = q * q / 4.0 + p * p * p / 27.0;
      const double sq = std::sqrt(disc);
      const double g = std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq);
      const double fr = g + shift;
      // deflate: 2f³ − sf² + d = (f − fr)(2f² + βf + γ)
      const double beta = 2.0 * fr - s;
      const double gamma = beta * fr;
      const cplx rt = std::sqrt(cplx(beta * beta - 8.0 * gamma));
      out.roots = {cplx(fr), (-beta + rt) / 4.0, (-beta - rt) / 4.0};
    }
    for (auto& r : out.roots) {
      r = detail::polish_root(s, d, r);
      if (out.classification == RootClass::three_real_distinct) r = cplx(r.real(), 0.0);
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

/// Optional connection constants of the dip asymptotics, one per root.
struct DipConstants {
  std::array<double, 3> beta{1.0, 1.0, 1.0};
  std::array<double, 3> gamma{0.0, 0.0, 0.0};
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
};

struct DipPhase {
  double f = 0.0;
  double amplitude_shape = 0.0; ///< |f|^{3/2}/|f³ − d|^{1/2}
  double leading_phase = 0.0;   ///< t^{1/3}(sf − f² + d/f)
  std::optional<double> beta, gamma, alpha;
};

struct DipPhaseSet {
  std::array<DipPhase, 3> phases;
  cplx value;             ///< |t|^{−1/2} Σ β|f|^{3/2}e^{iH}/|f³ − d|^{1/2}
  bool structural = true; ///< constants were not supplied (β = 1, γ = α = 0 used)
};

/// Dip asymptotics outside the parabola. The cubic is evaluated at |s| since
/// q is even in x. Prefactor |t|^{−1/2}, ln|t| in the phases, real cube root
/// for t^{1/3}.
inline DipPhaseSet dip_field(double t, double s, const FocusFrame& frame,
                             const std::optional<DipConstants>& constants = std::nullopt) {
  frame.validate();
  if (t == 0.0) throw SingularTimeError("dip_field: t = 0");
  const double edge = parabola_s(frame), as = std::abs(s);
  const bool on_edge = std::abs(as - edge) <= 1e-12 * edge;
  if (as < edge && !on_edge)
    throw ValidityError("dip_field: s lies inside the parabola, where the dip asymptotics do not apply");
  const auto cr = stationary_points(as, frame);
  const double d = cr.d;
  for (const auto& f : cr.roots)
    if (std::abs(f * f * f - d) < 1e-12 * std::max(1.0, d))
      throw EdgeDegeneracyError("dip_field: double stationary point (f³ = d) on the parabola edge");
  if (cr.classification != RootClass::three_real_distinct)
    throw EdgeDegeneracyError("dip_field: stationary points not distinct");

  DipPhaseSet out;
  out.structural = !constants.has_value();
  const DipConstants k = constants.value_or(DipConstants{});
  const double t13 = std::cbrt(t);
  out.value = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double f = cr.roots[j].real();
    auto& ph = out.phases[j];
    ph.f = f;
    ph.amplitude_shape = std::pow(std::abs(f), 1.5) / std::sqrt(std::abs(f * f * f - d));
    ph.leading_phase = t13 * (as * f - f * f + d / f);
    if (constants) {
      ph.beta = k.beta[j];
      ph.gamma = k.gamma[j];
      ph.alpha = k.alpha[j];
    }
    const double H = ph.leading_phase + k.gamma[j] * std::log(std::abs(t)) + k.alpha[j];
    out.value += k.beta[j] * ph.amplitude_shape * std::polar(1.0, H);
  }
  out.value /= std::sqrt(std::abs(t));
  return out;
}

struct ModulationFrequencies {
  double h2_plus = 0.0, h2_minus = 0.0;
  double rate_plus = 0.0, rate_minus = 0.0;
};

/// h² = 3a − s²/24 ± (s/2)√(a + s²/144), rate = 3h√(h² − 2a + s²/9), inside the parabola.
inline ModulationFrequencies modulation_frequencies(double s, const FocusFrame& frame) {
  frame.validate();
  const double a = frame.a, edge = parabola_s(frame);
  if (std::abs(s) > edge * (1.0 + 1e-12))
    throw ValidityError("modulation_frequencies: |s| exceeds 3(2a)^{1/2}");
  const double base = 3.0 * a - s * s / 24.0, split = 0.5 * s * std::sqrt(a + s * s / 144.0);
  ModulationFrequencies m;
  m.h2_plus = base + split;
  m.h2_minus = base - split;
  auto rate = [&](double h2, const char* name) {
    const double tol = 1e-12 * std::max(1.0, a);
    if (h2 < -tol) throw ValidityError(std::string("modulation_frequencies: negative h² on the ") + name + " branch");
    const double rad = h2 - 2.0 * a + s * s / 9.0;
    if (rad < -tol) throw ValidityError(std::string("modulation_frequencies: negative radicand on the ") + name + " branch");
    return 3.0 * std::sqrt(std::max(0.0, h2)) * std::sqrt(std::max(0.0, rad));
  };
  m.rate_plus = rate(m.h2_plus, "plus");
  m.rate_minus = rate(m.h2_minus, "minus");
  return m;
}

struct FocusScaling {
  double peak_amplitude = 0.0; ///< (2a³)^{1/2}/ε
  double x_width = 0.0;        ///< ε²
  double t_width = 0.0;        ///< ε³
};

inline FocusScaling focus_scaling_predict(const FocusFrame& frame, double epsilon) {
  frame.validate();
  if (!(epsilon > 0.0)) throw DomainError("focus_scaling_predict: epsilon must be positive");
  return {frame.focal_amplitude() / epsilon, epsilon * epsilon, epsilon * epsilon * epsilon};
}

} // namespace sfocus
