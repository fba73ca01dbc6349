#pragma once

// Painlevé reductions: the sine-form PIII w'' + w'/y + sin w = 0 that gives
// the t = 0 profile, the residual of the ξ(t) PIII, and the transition-layer
// problem ω'' + (c|ω|² + σz)ω = 0 with its PII map.

#include <sfocus/errors.hpp>
#include <sfocus/finite_difference.hpp>
#include <sfocus/jets.hpp>
#include <sfocus/ngo.hpp>

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace sfocus {

template <class T>
struct PainleveState {
  double s = 0.0; ///< independent variable (y, t or z)
  T value{};
  T derivative{};
};

// ---------------------------------------------------------------------------
// Sine-form PIII. With Z = y² and w = −π/2 + u(Z) the equation becomes
// 4(Z u_Z)_Z = cos u, which fixes the regular series u = Σ u_n Zⁿ.

/// Power series of the regular solution in Z = y²: u_n, I_n and P_n where
/// w = −π/2 + Σ u_n Zⁿ, P = w'/y = 2w_Z = Σ P_n Zⁿ, I = ∫_0^y w'²/η dη = Σ I_n Zⁿ.
struct P3Series {
  std::vector<double> u, P, I;

  explicit P3Series(std::size_t terms = 40) {
    u.assign(terms + 1, 0.0);
    std::vector<double> C(terms + 1, 0.0), S(terms + 1, 0.0);
    C[0] = 1.0;
    for (std::size_t n = 0; n < terms; ++n) {
      if (n > 0) {
        double cn = 0.0, sn = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
          cn -= static_cast<double>(k) * u[k] * S[n - k];
          sn += static_cast<double>(k) * u[k] * C[n - k];
        }
        C[n] = cn / static_cast<double>(n);
        S[n] = sn / static_cast<double>(n);
      }
      const double m = static_cast<double>(n + 1);
      u[n + 1] = C[n] / (4.0 * m * m);
    }
    P.assign(terms, 0.0);
    for (std::size_t n = 0; n < terms; ++n) P[n] = 2.0 * static_cast<double>(n + 1) * u[n + 1];
    // I = ½∫ P² dZ
    I.assign(terms + 1, 0.0);
    for (std::size_t n = 0; n < terms; ++n) {
      double sq = 0.0;
      for (std::size_t k = 0; k <= n; ++k) sq += P[k] * P[n - k];
      I[n + 1] = 0.5 * sq / static_cast<double>(n + 1);
    }
  }

  static double eval(const std::vector<double>& c, double Z, int deriv = 0) {
    double acc = 0.0;
    for (std::size_t n = c.size(); n-- > static_cast<std::size_t>(deriv);) {
      double coef = c[n];
      for (int d = 0; d < deriv; ++d) coef *= static_cast<double>(n - static_cast<std::size_t>(d));
      acc = acc * Z + coef;
    }
    return acc;
  }

  double w(double Z) const { return -0.5 * std::numbers::pi + eval(u, Z); }
};

/// Z below this uses the series rather than the integrated trajectory.
inline constexpr double kP3SeriesZ = 0.5;

struct P3Jet {
  double w, P, P_Z, P_ZZ, P_ZZZ, I;
};

/// Regular sine-PIII solution on y ∈ [0, y_max] sampled at y_j = j·dy.
class P3Solution {
public:
  P3Solution(double y_max, double dy) : dy_(dy), series_(40) {
    if (!(y_max > 0.0) || !(dy > 0.0)) throw DomainError("p3_sine_solve: y_max and dy must be positive");
    const auto n = static_cast<std::size_t>(std::ceil(y_max / dy - 1e-9));
    y_.resize(n + 1);
    w_.resize(n + 1);
    wp_.resize(n + 1);
    I_.resize(n + 1);
    std::size_t j = 0;
    for (; j <= n; ++j) {
      const double y = static_cast<double>(j) * dy;
      const double Z = y * y;
      if (Z >= kP3SeriesZ && j > 0) break;
      y_[j] = y;
      w_[j] = series_.w(Z);
      wp_[j] = y * P3Series::eval(series_.P, Z);
      I_[j] = P3Series::eval(series_.I, Z);
    }
    for (; j <= n; ++j) {
      rk4(j - 1);
      if (!std::isfinite(w_[j]) || !std::isfinite(wp_[j]))
        throw BlowUpError("p3_sine_solve: non-finite state", y_[j - 1]);
    }
  }

  double dy() const { return dy_; }
  double y_max() const { return y_.back(); }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<double>& wp() const { return wp_; }
  const P3Series& series() const { return series_; }

  /// w''(0) from the first launched nodes, using evenness in y.
  double w_second_at_origin() const {
    const double h = dy_;
    return (-2.0 * w_[2] + 32.0 * w_[1] - 30.0 * w_[0]) / (12.0 * h * h);
  }

  /// w, w' and I = ∫_0^y w'²/η at arbitrary y by cubic Hermite interpolation.
  struct Point {
    double w, wp, I;
  };
  Point at(double y) const {
    if (y < 0.0 || y > y_max() * (1.0 + 1e-12))
      throw DomainError("P3Solution: y outside the computed range");
    auto j = static_cast<std::size_t>(y / dy_);
    if (j >= y_.size() - 1) j = y_.size() - 2;
    const double h = dy_, s = (y - y_[j]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    auto herm = [&](double f0, double d0, double f1, double d1) {
      return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    };
    return {herm(w_[j], wp_[j], w_[j + 1], wp_[j + 1]),
            herm(wp_[j], wpp(j), wp_[j + 1], wpp(j + 1)),
            herm(I_[j], Ip(j), I_[j + 1], Ip(j + 1))};
  }

  /// P = w'/y and its Z-derivatives at Z = y².
  P3Jet jet(double Z) const {
    if (Z < kP3SeriesZ) {
      const auto& P = series_.P;
      return {series_.w(Z), P3Series::eval(P, Z), P3Series::eval(P, Z, 1), P3Series::eval(P, Z, 2),
              P3Series::eval(P, Z, 3), P3Series::eval(series_.I, Z)};
    }
    const double y = std::sqrt(Z);
    const auto pt = at(y);
    const double P = pt.wp / y;
    const double sw = std::sin(pt.w), cw = std::cos(pt.w);
    const double PZ = -(2.0 * P + sw) / (2.0 * Z);
    const double PZZ = -(4.0 * PZ + 0.5 * cw * P) / (2.0 * Z);
    const double PZZZ = (-6.0 * PZZ + 0.25 * sw * P * P - 0.5 * cw * PZ) / (2.0 * Z);
    return {pt.w, P, PZ, PZZ, PZZZ, pt.I};
  }

private:
  double wpp(std::size_t j) const {
    if (j == 0) return 0.5;
    return -wp_[j] / y_[j] - std::sin(w_[j]);
  }
  double Ip(std::size_t j) const {
    if (j == 0) return 0.0;
    return wp_[j] * wp_[j] / y_[j];
  }

  void rk4(std::size_t j) {
    const double h = dy_;
    struct S {
      double w, p, I;
    };
    auto f = [](double y, const S& s) {
      return S{s.p, -s.p / y - std::sin(s.w), s.p * s.p / y};
    };
    auto add = [](const S& a, const S& k, double c) { return S{a.w + c * k.w, a.p + c * k.p, a.I + c * k.I}; };
    const double y = y_[j];
    const S s0{w_[j], wp_[j], I_[j]};
    const S k1 = f(y, s0), k2 = f(y + 0.5 * h, add(s0, k1, 0.5 * h));
    const S k3 = f(y + 0.5 * h, add(s0, k2, 0.5 * h)), k4 = f(y + h, add(s0, k3, h));
    y_[j + 1] = static_cast<double>(j + 1) * h;
    w_[j + 1] = s0.w + h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
    wp_[j + 1] = s0.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    I_[j + 1] = s0.I + h / 6.0 * (k1.I + 2 * k2.I + 2 * k3.I + k4.I);
  }

  double dy_;
  P3Series series_;
  std::vector<double> y_, w_, wp_, I_;
};

/// Regular solution with w(0) = −π/2, launched from its series (used while
/// y² < 0.5) and continued by RK4 with step dy.
inline P3Solution p3_sine_solve(double y_max, double dy = 1e-3) { return P3Solution(y_max, dy); }

/// Map from x to the PIII variable: y = k|x|^{1/2}, k = 2^{3/2}(2a³)^{1/4}.
inline double p3_scale(const FocusFrame& frame) {
  return std::pow(2.0, 1.5) * std::sqrt(frame.focal_amplitude());
}

/// y range a solution must cover to map x ∈ [−x_max, x_max].
inline double p3_y_for(const FocusFrame& frame, double x_max) {
  return p3_scale(frame) * std::sqrt(std::abs(x_max));
}

/// r(0,x) = 2(2a³)^{1/2} w'(y)/y, extended evenly to x < 0.
inline std::vector<double> r0_profile(const FocusFrame& frame, const P3Solution& sol,
                                      std::span<const double> x) {
  frame.validate();
  const double r0 = frame.focal_amplitude(), k = p3_scale(frame);
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double y = k * std::sqrt(std::abs(x[j]));
    if (y > sol.y_max() * (1.0 + 1e-12)) throw DomainError("r0_profile: x beyond the computed y range");
    out[j] = 2.0 * r0 * sol.jet(y * y).P;
  }
  return out;
}

/// Jets of the t = 0 slice q = r(0,x)e^{iφ0}; q_t follows from the inner equation.
inline SliceJets r0_slice_jets(const FocusFrame& frame, const P3Solution& sol,
                               std::span<const double> x) {
  frame.validate();
  const double r0 = frame.focal_amplitude(), k = p3_scale(frame), k2 = k * k;
  const cplx ph = std::polar(1.0, frame.phi0);
  SliceJets j;
  j.t = 0.0;
  j.x.assign(x.begin(), x.end());
  const std::size_t n = x.size();
  j.q.resize(n);
  j.q_x.resize(n);
  j.q_xx.resize(n);
  j.q_xxx.resize(n);
  j.mass.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = std::abs(x[i]), sg = x[i] < 0.0 ? -1.0 : 1.0;
    const double Z = k2 * ax;
    if (std::sqrt(Z) > sol.y_max() * (1.0 + 1e-12)) throw DomainError("r0_slice_jets: x beyond the computed y range");
    const auto J = sol.jet(Z);
    const double c = 2.0 * r0;
    j.q[i] = c * J.P * ph;
    j.q_x[i] = c * k2 * J.P_Z * sg * ph;
    j.q_xx[i] = c * k2 * k2 * J.P_ZZ * ph;
    j.q_xxx[i] = c * k2 * k2 * k2 * J.P_ZZZ * sg * ph;
    j.mass[i] = r0 * J.I * sg;
  }
  time_derivative_from_equation(j);
  return j;
}

// ---------------------------------------------------------------------------
// Large-x asymptotics of r(0,x).

struct AsymptoticConstants {
  double h = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// arg Γ(1+iy) = −γy + Σ_{m≥1} (−1)^{m+1} ζ(2m+1) y^{2m+1}/(2m+1), |y| < 1.
inline double arg_gamma_1_plus_iy(double y) {
  if (!(std::abs(y) < 1.0)) throw DomainError("arg_gamma_1_plus_iy: series needs |y| < 1");
  double acc = -std::numbers::egamma * y;
  double pw = y;
  for (int m = 1; m < 200; ++m) {
    pw *= y * y;
    const double term = (m % 2 == 1 ? 1.0 : -1.0) * std::riemann_zeta(2.0 * m + 1.0) * pw / (2.0 * m + 1.0);
    acc += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(acc))) break;
  }
  return acc;
}

/// arg Γ(iy) = arg Γ(1+iy) − π/2 for y > 0 (Γ(iy) = Γ(1+iy)/(iy)).
inline double arg_gamma_iy(double y) {
  if (!(y > 0.0)) throw DomainError("arg_gamma_iy: y must be positive");
  return arg_gamma_1_plus_iy(y) - 0.5 * std::numbers::pi;
}

inline AsymptoticConstants asymptotic_constants(const FocusFrame& frame) {
  frame.validate();
  const double a = frame.a, ln2 = std::numbers::ln2, pi = std::numbers::pi;
  AsymptoticConstants k;
  k.h = std::pow(2.0 * a, 0.375) * std::sqrt(ln2 / pi);
  k.b = ln2 / (4.0 * pi);
  k.c = arg_gamma_iy(ln2 / (2.0 * pi)) - 0.25 * pi * (1.0 + ln2 * ln2) +
        ln2 * std::log(2.0 * a * a * a) / (8.0 * pi);
  return k;
}

/// Phase 2(2a)^{3/4}x^{1/2} + b ln x + c of the large-x form.
inline double r0_asymptotic_phase(const FocusFrame& frame, const AsymptoticConstants& k, double x) {
  return 2.0 * std::pow(2.0 * frame.a, 0.75) * std::sqrt(x) + k.b * std::log(x) + k.c;
}

/// (h/x^{3/4}) sin(2(2a)^{3/4}x^{1/2} + b ln x + c).
inline double r0_asymptotic(const FocusFrame& frame, double x) {
  if (!(x > 0.0)) throw DomainError("r0_asymptotic: x must be positive");
  const auto k = asymptotic_constants(frame);
  return k.h * std::pow(x, -0.75) * std::sin(r0_asymptotic_phase(frame, k, x));
}

struct EnvelopeComparison {
  std::vector<double> peak_x, peak_abs; ///< local maxima of |r(0,x)|
  double max_rel_envelope_error = 0.0;  ///< vs h x^{−3/4}
  double loglog_slope = 0.0;
  std::vector<double> zero_x;           ///< sign changes of r(0,x)
  double max_phase_error = 0.0;         ///< predicted phase at zeros vs mπ, radians mod π
};

/// Compares the integrated profile with the large-x form on [x0, x1] without
/// fitting anything.
inline EnvelopeComparison r0_envelope_comparison(const FocusFrame& frame, const P3Solution& sol,
                                                 double x0, double x1, std::size_t samples = 200001) {
  if (!(x1 > x0) || !(x0 > 0.0)) throw DomainError("r0_envelope_comparison: need 0 < x0 < x1");
  const auto k = asymptotic_constants(frame);
  std::vector<double> x(samples);
  const double dx = (x1 - x0) / static_cast<double>(samples - 1);
  for (std::size_t j = 0; j < samples; ++j) x[j] = x0 + static_cast<double>(j) * dx;
  const auto r = r0_profile(frame, sol, x);

  EnvelopeComparison out;
  for (std::size_t j = 1; j + 1 < samples; ++j) {
    const double a = std::abs(r[j - 1]), b = std::abs(r[j]), c = std::abs(r[j + 1]);
    if (b > a && b >= c) {
      // parabolic refinement of the peak
      const double den = a - 2.0 * b + c;
      const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
      out.peak_x.push_back(x[j] + off * dx);
      out.peak_abs.push_back(b - 0.25 * (a - c) * off);
    }
    if ((r[j - 1] < 0.0) != (r[j] < 0.0)) {
      out.zero_x.push_back(x[j - 1] + dx * r[j - 1] / (r[j - 1] - r[j]));
    }
  }
  if (out.peak_x.size() < 2) throw StructureError("r0_envelope_comparison: fewer than two peaks");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(out.peak_x.size());
  for (std::size_t i = 0; i < out.peak_x.size(); ++i) {
    const double pred = k.h * std::pow(out.peak_x[i], -0.75);
    out.max_rel_envelope_error = std::max(out.max_rel_envelope_error, std::abs(out.peak_abs[i] / pred - 1.0));
    const double lx = std::log(out.peak_x[i]), ly = std::log(out.peak_abs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.loglog_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

  for (double xz : out.zero_x) {
    const double th = r0_asymptotic_phase(frame, k, xz);
    const double d = th - std::numbers::pi * std::round(th / std::numbers::pi);
    out.max_phase_error = std::max(out.max_phase_error, std::abs(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ξ(t) PIII residual: ξ'' = ξ'²/ξ − ξ'/t − a³ξ²/(4t²) + 2i/t + 16/ξ.

/// Right-hand side of the ξ equation.
inline cplx xi_rhs(double a, double t, cplx xi, cplx xi_t) {
  const double a3 = a * a * a;
  return xi_t * xi_t / xi - xi_t / t - a3 * xi * xi / (4.0 * t * t) + cplx(0, 2.0) / t + 16.0 / xi;
}

struct XiResidual {
  std::vector<double> times;
  std::vector<cplx> residual;
  double max_abs = 0.0;
  double rms = 0.0;
  struct Pair {
    double t;
    cplx at_plus, at_minus;
  };
  std::vector<Pair> pairs; ///< residual at t and −t
};

/// Fourth-order finite-difference residual ξ'' − rhs on samples with |t| ≥ t_cut
/// and two neighbours on each side.
inline XiResidual p3_xi_residual(std::span<const cplx> xi, std::span<const double> times,
                                 const FocusFrame& frame, double t_cut = 0.1) {
  frame.validate();
  const std::size_t n = times.size();
  if (xi.size() != n) throw StructureError("p3_xi_residual: size mismatch");
  if (n < 5) throw StructureError("p3_xi_residual: need at least 5 samples");
  const double h = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
  XiResidual out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double t = times[i];
    if (std::abs(t) < t_cut) continue;
    if (std::abs(xi[i]) < 1e-10) throw DomainError("p3_xi_residual: |xi| below 1e-10 inside the window");
    const cplx d1 = fd::central_d1<cplx>(xi, i, h), d2 = fd::central_d2<cplx>(xi, i, h);
    const cplx res = d2 - xi_rhs(frame.a, t, xi[i], d1);
    out.times.push_back(t);
    out.residual.push_back(res);
    idx.push_back(i);
    out.max_abs = std::max(out.max_abs, std::abs(res));
    out.rms += std::norm(res);
  }
  if (!out.residual.empty()) out.rms = std::sqrt(out.rms / static_cast<double>(out.residual.size()));
  for (std::size_t a = 0; a < out.times.size(); ++a) {
    if (out.times[a] <= 0.0) continue;
    for (std::size_t b = 0; b < out.times.size(); ++b)
      if (std::abs(out.times[b] + out.times[a]) <= 1e-9 * std::max(1.0, out.times[a])) {
        out.pairs.push_back({out.times[a], out.residual[a], out.residual[b]});
        break;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transition layer: ω'' + (c|ω|² + σz)ω = 0, ω → 0 (oscillating) as σz → +∞,
// |ω| ≈ √(−σz/c) as σz → −∞. Discretised by the three-point Numerov scheme
//   (ω_{i−1} − 2ω_i + ω_{i+1})/h² + (G_{i−1} + 10G_i + G_{i+1})/12 = 0,
// G = Vω, V = c|ω|² + σz, which is fourth-order accurate. With
// y = (1 + h²V/12)ω the scheme is y_{i+1} + y_{i−1} = m_i y_i with real m_i,
// so the staggered Wronskian of y is conserved exactly.

struct P2Options {
  double z_min = -12.0;
  double z_max = 12.0;
  std::size_t n_points = 40001;
  int sign_convention = +1;         ///< σ
  double cubic_coefficient = 2.0;   ///< c
  std::optional<double> decay_seed; ///< Dirichlet value at the decay end; unset: slope matching
  int max_iterations = 60;
  double tolerance = 1e-9;          ///< on the max residual; a Newton update below 1e-13 also stops
  int continuation_stages = 6;

  void validate() const {
    if (!(z_min < 0.0 && 0.0 < z_max)) throw DomainError("p2: need z_min < 0 < z_max");
    if (n_points < 200) throw DomainError("p2: n_points must be >= 200");
    if (sign_convention != 1 && sign_convention != -1) throw DomainError("p2: sign_convention must be +1 or -1");
    if (!(cubic_coefficient > 0.0)) throw DomainError("p2: cubic_coefficient must be positive");
    if (!(max_iterations > 0) || !(continuation_stages > 0)) throw DomainError("p2: iteration counts must be positive");
  }
};

struct P2Solution {
  std::vector<double> z;       ///< ascending
  std::vector<cplx> omega;
  double h = 0.0;
  int sigma = 1;
  double c = 2.0;
  double residual_max = 0.0;   ///< max |discrete ODE residual| over interior nodes
  int iterations = 0;
  double growth_match = 0.0;   ///< max | |ω|/√(−σz/c) − 1 | over the 10% of nodes nearest the growth end
};

namespace detail {
/// Growth-side asymptote √(ζ/c)(1 + 1/(8ζ³)) and its ζ-derivative.
inline std::pair<double, double> p2_growth_asymptote(double zeta, double c) {
  const double base = std::sqrt(zeta / c), corr = 1.0 + 1.0 / (8.0 * zeta * zeta * zeta);
  const double d = 0.5 / std::sqrt(c * zeta) * corr + base * (-3.0 / (8.0 * zeta * zeta * zeta * zeta));
  return {base * corr, d};
}

/// z ordered from the growth end.
inline std::vector<double> p2_growth_ordered_z(const P2Options& opt, double h) {
  std::vector<double> zz(opt.n_points);
  for (std::size_t i = 0; i < zz.size(); ++i)
    zz[i] = opt.sign_convention > 0 ? opt.z_min + static_cast<double>(i) * h
                                    : opt.z_max - static_cast<double>(i) * h;
  return zz;
}

template <class T>
T p2_numerov_row(const std::vector<T>& w, const std::vector<double>& zz, std::size_t i, double h,
                 double c, int sigma) {
  auto G = [&](std::size_t k) { return (c * std::norm(w[k]) + sigma * zz[k]) * w[k]; };
  return (w[i - 1] - 2.0 * w[i] + w[i + 1]) / (h * h) + (G(i - 1) + 10.0 * G(i) + G(i + 1)) / 12.0;
}

inline void p2_finish(P2Solution& sol, const std::vector<cplx>& w, const std::vector<double>& zz,
                      double h, int sg, double c) {
  const std::size_t N = w.size();
  sol.h = h;
  sol.sigma = sg;
  sol.c = c;
  sol.residual_max = 0.0;
  for (std::size_t i = 1; i + 1 < N; ++i)
    sol.residual_max = std::max(sol.residual_max, std::abs(p2_numerov_row(w, zz, i, h, c, sg)));
  const std::size_t win = std::max<std::size_t>(3, N / 10);
  sol.growth_match = 0.0;
  for (std::size_t i = 0; i < win; ++i)
    sol.growth_match = std::max(sol.growth_match, std::abs(std::abs(w[i]) / std::sqrt(-sg * zz[i] / c) - 1.0));
  sol.z.resize(N);
  sol.omega.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t k = sg > 0 ? i : N - 1 - i;
    sol.z[k] = zz[i];
    sol.omega[k] = w[i];
  }
}
} // namespace detail

/// Real branch by Numerov collocation and damped Newton with banded LU.
/// Unknowns are ordered from the growth end; the growth end fixes the value
/// and the one-sided slope to the asymptote, and the decay-end value is then
/// an unknown (or fixed by `decay_seed`). The domain is grown from the growth
/// end in `continuation_stages` steps, each new stretch guessed by continuing
/// the discrete recurrence.
inline P2Solution p2_transition_solve(const P2Options& opt) {
  opt.validate();
  const std::size_t N = opt.n_points;
  const double h = (opt.z_max - opt.z_min) / static_cast<double>(N - 1);
  const int sg = opt.sign_convention;
  const double c = opt.cubic_coefficient;
  const auto zz = detail::p2_growth_ordered_z(opt, h);
  const double zeta0 = -sg * zz[0];
  if (!(zeta0 > 1.0)) throw DomainError("p2: growth end too close to the turning point");
  const auto [g0, dg0] = detail::p2_growth_asymptote(zeta0, c);

  // asymptote on the growth side, zero past the turning point
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double zeta = -sg * zz[i];
    w[i] = (zeta > 0.0 ? std::sqrt(zeta / c) : 0.0) + 0.3 * std::exp(-zeta * zeta);
  }
  w[0] = g0;

  const lapack_int kl = 2, ku = 1, ldab = 2 * kl + ku + 1;
  std::vector<double> ab, rhs, F;
  std::vector<lapack_int> ipiv;
  int total_iter = 0;
  const double ih2 = 1.0 / (h * h);

  for (int stage = 1; stage <= opt.continuation_stages; ++stage) {
    const std::size_t M =
        stage == opt.continuation_stages
            ? N
            : std::max<std::size_t>(200, N * static_cast<std::size_t>(stage) /
                                             static_cast<std::size_t>(opt.continuation_stages));
    const bool dirichlet = opt.decay_seed.has_value() && M == N;

    // equation order: value, slope (or nothing), interior rows, decay value (or nothing)
    auto residual = [&] {
      F.assign(M, 0.0);
      F[0] = w[0] - g0;
      std::size_t r = 1;
      if (!dirichlet) F[r++] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h) + dg0;
      for (std::size_t i = 1; i + 1 < M; ++i) F[r++] = detail::p2_numerov_row(w, zz, i, h, c, sg);
      if (dirichlet) F[r++] = w[M - 1] - *opt.decay_seed;
      double m = 0.0;
      for (double v : F) m = std::max(m, std::abs(v));
      return m;
    };

    double norm = residual();
    int it = 0;
    double last_update = INFINITY;
    for (; it < opt.max_iterations && norm > opt.tolerance && last_update > 1e-13; ++it) {
      ab.assign(static_cast<std::size_t>(ldab) * M, 0.0);
      auto A = [&](std::size_t row, std::size_t col) -> double& {
        return ab[static_cast<std::size_t>(kl + ku) + row - col + col * static_cast<std::size_t>(ldab)];
      };
      auto dG = [&](std::size_t k) { return 3.0 * c * w[k] * w[k] + sg * zz[k]; };
      A(0, 0) = 1.0;
      std::size_t r = 1;
      if (!dirichlet) {
        A(1, 0) = -3.0 / (2.0 * h);
        A(1, 1) = 4.0 / (2.0 * h);
        A(1, 2) = -1.0 / (2.0 * h);
        r = 2;
      }
      for (std::size_t i = 1; i + 1 < M; ++i, ++r) {
        A(r, i - 1) = ih2 + dG(i - 1) / 12.0;
        A(r, i) = -2.0 * ih2 + 10.0 * dG(i) / 12.0;
        A(r, i + 1) = ih2 + dG(i + 1) / 12.0;
      }
      if (dirichlet) A(M - 1, M - 1) = 1.0;
      rhs.resize(M);
      for (std::size_t k = 0; k < M; ++k) rhs[k] = -F[k];
      ipiv.assign(M, 0);
      const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(M), kl, ku, 1,
                                            ab.data(), ldab, ipiv.data(), rhs.data(),
                                            static_cast<lapack_int>(M));
      if (info != 0) throw ConvergenceError("p2: singular Newton matrix", norm);

      // halve the step until the residual decreases
      const std::vector<double> w_old(w.begin(), w.begin() + static_cast<long>(M));
      double lam = 1.0, trial = norm;
      for (int k = 0; k < 30; ++k) {
        for (std::size_t i = 0; i < M; ++i) w[i] = w_old[i] + lam * rhs[i];
        trial = residual();
        if (std::isfinite(trial) && trial < norm * (1.0 - 1e-4 * lam)) break;
        lam *= 0.5;
      }
      if (!std::isfinite(trial)) throw ConvergenceError("p2: Newton step produced non-finite values", norm);
      last_update = 0.0;
      for (std::size_t i = 0; i < M; ++i) last_update = std::max(last_update, std::abs(lam * rhs[i]));
      norm = trial;
    }
    total_iter += it;
    if (norm > opt.tolerance && last_update > 1e-13)
      throw ConvergenceError("p2: Newton did not converge (stage " + std::to_string(stage) + ")", norm);

    // guess for the next stretch: continue the explicit second-difference recurrence
    for (std::size_t i = M; i < N; ++i)
      w[i] = (2.0 - h * h * (c * w[i - 1] * w[i - 1] + sg * zz[i - 1])) * w[i - 1] - w[i - 2];
  }

  P2Solution sol;
  sol.iterations = total_iter;
  detail::p2_finish(sol, std::vector<cplx>(w.begin(), w.end()), zz, h, sg, c);
  return sol;
}

/// Complex branch by marching the Numerov recurrence from the growth end with
/// ω = g real and ω_z carrying an imaginary part β/g, so that the Wronskian
/// ω_zω̄ − ω̄_zω is 2iβ. Each step solves the implicit node by fixed-point
/// iteration on |ω_{i+1}|².
inline P2Solution p2_transition_march(const P2Options& opt, double beta) {
  opt.validate();
  const std::size_t N = opt.n_points;
  const double h = (opt.z_max - opt.z_min) / static_cast<double>(N - 1);
  const int sg = opt.sign_convention;
  const double c = opt.cubic_coefficient;
  const auto zz = detail::p2_growth_ordered_z(opt, h);
  const double zeta0 = -sg * zz[0];
  if (!(zeta0 > 1.0)) throw DomainError("p2: growth end too close to the turning point");
  const auto [g0, dg0] = detail::p2_growth_asymptote(zeta0, c);
  const double h2 = h * h;
  auto V = [&](const cplx& w, std::size_t k) { return c * std::norm(w) + sg * zz[k]; };

  std::vector<cplx> w(N);
  w[0] = g0;
  // marching direction is dζ = −h; dz = sg·(marching step)
  const cplx slope = -dg0 + cplx(0, sg * beta / g0);
  const cplx acc = -V(w[0], 0) * w[0];
  w[1] = w[0] + h * slope + 0.5 * h2 * acc;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const cplx known = 2.0 * w[i] - w[i - 1] -
                       h2 / 12.0 * (V(w[i - 1], i - 1) * w[i - 1] + 10.0 * V(w[i], i) * w[i]);
    cplx next = 2.0 * w[i] - w[i - 1];
    for (int k = 0; k < 50; ++k) {
      const cplx upd = known / (1.0 + h2 / 12.0 * V(next, i + 1));
      const bool done = std::abs(upd - next) <= 1e-16 * std::max(1.0, std::abs(upd));
      next = upd;
      if (done) break;
    }
    w[i + 1] = next;
    if (!std::isfinite(std::abs(next))) throw BlowUpError("p2_transition_march: non-finite value", zz[i]);
  }
  P2Solution sol;
  detail::p2_finish(sol, w, zz, h, sg, c);
  return sol;
}

struct P2Invariants {
  cplx wronskian;                  ///< mean of the staggered Wronskian
  double wronskian_deviation = 0;  ///< max deviation from the mean
  cplx kappa;                      ///< W − 1
  std::size_t window_begin = 0, window_end = 0; ///< [begin, end) in z index
  std::vector<double> z;           ///< window nodes used for f
  std::vector<cplx> f;             ///< (ln ω)_z
  double f_residual = 0.0;         ///< max |f'' − 2f³ − 2σzf − (cW − σ)|
  double f_residual_printed = 0.0; ///< same with the constant W − 1
};

/// Wronskian, κ and the PII residual of f = ω_z/ω on the window that starts at
/// the growth end and stops before |ω| first drops below `threshold`.
/// The Wronskian is taken on the Numerov variable y = (1 + h²V/12)ω, where it
/// is a discrete invariant.
inline P2Invariants p2_invariants(const P2Solution& sol, double threshold = 0.2,
                                  double fd_spacing = 0.002) {
  const std::size_t N = sol.z.size();
  if (N < 20 || sol.omega.size() != N) throw StructureError("p2_invariants: too few samples");
  const double h = sol.h;
  P2Invariants inv;

  std::vector<cplx> y(N);
  for (std::size_t j = 0; j < N; ++j)
    y[j] = (1.0 + h * h / 12.0 * (sol.c * std::norm(sol.omega[j]) + sol.sigma * sol.z[j])) * sol.omega[j];
  std::vector<cplx> W(N - 1);
  cplx mean = 0.0;
  for (std::size_t j = 0; j + 1 < N; ++j) {
    W[j] = (y[j + 1] * std::conj(y[j]) - std::conj(y[j + 1]) * y[j]) / h;
    mean += W[j];
  }
  mean /= static_cast<double>(N - 1);
  for (const auto& v : W) inv.wronskian_deviation = std::max(inv.wronskian_deviation, std::abs(v - mean));
  inv.wronskian = mean;
  inv.kappa = mean - 1.0;

  std::size_t b = 0, e = N;
  if (sol.sigma > 0) {
    e = 0;
    while (e < N && std::abs(sol.omega[e]) >= threshold) ++e;
  } else {
    b = N;
    while (b > 0 && std::abs(sol.omega[b - 1]) >= threshold) --b;
  }
  if (e < b + 12) throw DomainError("p2_invariants: window with |omega| above threshold is empty");
  inv.window_begin = b;
  inv.window_end = e;

  // differentiate on a coarser stride: second differences of f amplify
  // rounding as 1/h², so h is lifted to about `fd_spacing`
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fd_spacing / h)));
  const double H = h * static_cast<double>(stride);
  std::vector<cplx> seg;
  std::vector<double> zs;
  for (std::size_t j = b; j < e; j += stride) {
    seg.push_back(sol.omega[j]);
    zs.push_back(sol.z[j]);
  }
  if (seg.size() < 12) throw DomainError("p2_invariants: window too short for the derivative stencils");
  const auto dw = fd::first_derivative4<cplx>(seg, H);
  std::vector<cplx> f(seg.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dw[i] / seg[i];

  const cplx k_map = sol.c * mean - static_cast<double>(sol.sigma);
  const cplx k_printed = mean - 1.0;
  for (std::size_t i = 4; i + 4 < f.size(); ++i) {
    const double z = zs[i];
    const cplx f2 = fd::central_d2<cplx>(f, i, H);
    const cplx base = f2 - 2.0 * f[i] * f[i] * f[i] - 2.0 * sol.sigma * z * f[i];
    inv.f_residual = std::max(inv.f_residual, std::abs(base - k_map));
    inv.f_residual_printed = std::max(inv.f_residual_printed, std::abs(base - k_printed));
    inv.z.push_back(z);
    inv.f.push_back(f[i]);
  }
  return inv;
}

} // namespace sfocus
