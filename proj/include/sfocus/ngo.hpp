#pragma once

// Closed-form dispersionless (nonlinear geometric optics) solutions:
// the self-similar focusing clump, the quadratic-phase lens pulse and the
// WKB field built from an intensity/phase pair.

#include <sfocus/errors.hpp>
#include <sfocus/finite_difference.hpp>
#include <sfocus/grid.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace sfocus {

/// Parameters of one focal neighbourhood.
struct FocusFrame {
  double a = 0.5;        ///< self-similar intensity parameter, > 0
  double T_f = 0.0;      ///< focal time
  double X_f = 0.0;      ///< focal position
  double Phi_star = 0.0; ///< outer phase constant
  double phi0 = 0.0;     ///< inner phase constant at t = 0
  double nu = 0.0;       ///< constant of the x-ODE; 0 for the universal solution

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("frame.a must be > 0");
  }
  /// Nonzero nu is allowed for exploration only and is flagged in manifests.
  bool exploratory() const { return nu != 0.0; }
  double d() const { return std::pow(2.0 * a, 1.5); }
  /// |q(0,0)| = (2a³)^{1/2}.
  double focal_amplitude() const { return std::sqrt(2.0 * a * a * a); }
  /// Similarity-variable half-width of the support, √(18a).
  double support_s() const { return std::sqrt(18.0 * a); }
};

/// Real cube root, negative for negative arguments.
inline double real_cbrt(double v) { return std::cbrt(v); }

struct SelfSimilarSample {
  double rho = 0.0;
  double v = 0.0;
  double Phi = 0.0;
  double s = 0.0;
  bool inside_support = false;
};

/// Self-similar focusing clump at (T, X):
///   ρ = τ^{-2/3}[a/2 - s²/36],  v = τ^{-1/3}·2s/3,  Φ = Φ* + τ^{1/3}[3a + s²/6],
/// with τ = T - T_f, s = (X - X_f)τ^{-2/3}, real cube-root branch for τ < 0.
/// ρ and v are zero for |s| >= √(18a); Φ is returned everywhere.
inline SelfSimilarSample self_similar_eval(const FocusFrame& frame, double T, double X) {
  frame.validate();
  const double tau = T - frame.T_f;
  if (tau == 0.0) throw SingularTimeError("self_similar_eval: T equals the focal time");
  const double c = real_cbrt(tau);
  const double c2 = c * c;
  SelfSimilarSample out;
  out.s = (X - frame.X_f) / c2;
  out.inside_support = std::abs(out.s) < frame.support_s();
  if (out.inside_support) {
    out.rho = (0.5 * frame.a - out.s * out.s / 36.0) / c2;
    out.v = (2.0 * out.s / 3.0) / c;
  }
  out.Phi = frame.Phi_star + c * (3.0 * frame.a + out.s * out.s / 6.0);
  return out;
}

/// Row-major samples f(T_i, X_j), i < nT, j < nX.
struct Field2D {
  std::size_t nT = 0;
  std::size_t nX = 0;
  std::vector<double> data;

  Field2D() = default;
  Field2D(std::size_t nt, std::size_t nx) : nT(nt), nX(nx), data(nt * nx, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * nX + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * nX + j]; }
};

struct NgoSamples {
  Field2D rho;
  Field2D v;
  double hT = 0.0;
  double hX = 0.0;
};

/// Samples the self-similar pair on the rectangle [T0,T1]×[X0,X1] with nT×nX nodes.
inline NgoSamples sample_self_similar(const FocusFrame& frame, double T0, double T1, std::size_t nT,
                                      double X0, double X1, std::size_t nX) {
  if (nT < 2 || nX < 2) throw StructureError("sample_self_similar: need at least 2 nodes per axis");
  NgoSamples s{Field2D(nT, nX), Field2D(nT, nX), (T1 - T0) / static_cast<double>(nT - 1),
               (X1 - X0) / static_cast<double>(nX - 1)};
  for (std::size_t i = 0; i < nT; ++i)
    for (std::size_t j = 0; j < nX; ++j) {
      auto p = self_similar_eval(frame, T0 + static_cast<double>(i) * s.hT,
                                 X0 + static_cast<double>(j) * s.hX);
      s.rho(i, j) = p.rho;
      s.v(i, j) = p.v;
    }
  return s;
}

struct NgoResidual {
  double continuity = 0.0; ///< max |ρ_T + (ρv)_X|
  double momentum = 0.0;   ///< max |v_T + v v_X - 4ρ_X|
};

/// Max-norm residuals of ρ_T + (ρv)_X = 0, v_T + v v_X - 4ρ_X = 0 using
/// fourth-order differences (one-sided at the rectangle edges).
inline NgoResidual ngo_residual(const Field2D& rho, const Field2D& v, double hT, double hX) {
  if (rho.nT != v.nT || rho.nX != v.nX) throw StructureError("ngo_residual: field shapes differ");
  if (rho.nT < 5 || rho.nX < 5)
    throw StructureError("ngo_residual: grid too small for the 5-point stencil (need >= 5 per axis)");
  if (!(hT > 0.0) || !(hX > 0.0)) throw DomainError("ngo_residual: spacings must be positive");

  const std::size_t nT = rho.nT, nX = rho.nX;
  Field2D rho_T(nT, nX), v_T(nT, nX), flux_X(nT, nX), v_X(nT, nX), rho_X(nT, nX);

  std::vector<double> col(nT);
  for (const auto& [src, dst] : {std::pair{&rho, &rho_T}, std::pair{&v, &v_T}}) {
    for (std::size_t j = 0; j < nX; ++j) {
      for (std::size_t i = 0; i < nT; ++i) col[i] = (*src)(i, j);
      auto d = fd::first_derivative4<double>(col, hT);
      for (std::size_t i = 0; i < nT; ++i) (*dst)(i, j) = d[i];
    }
  }
  std::vector<double> row(nX), flux(nX);
  for (std::size_t i = 0; i < nT; ++i) {
    for (std::size_t j = 0; j < nX; ++j) flux[j] = rho(i, j) * v(i, j);
    auto df = fd::first_derivative4<double>(flux, hX);
    for (std::size_t j = 0; j < nX; ++j) row[j] = v(i, j);
    auto dv = fd::first_derivative4<double>(row, hX);
    for (std::size_t j = 0; j < nX; ++j) row[j] = rho(i, j);
    auto dr = fd::first_derivative4<double>(row, hX);
    for (std::size_t j = 0; j < nX; ++j) {
      flux_X(i, j) = df[j];
      v_X(i, j) = dv[j];
      rho_X(i, j) = dr[j];
    }
  }

  NgoResidual r;
  for (std::size_t i = 0; i < nT; ++i)
    for (std::size_t j = 0; j < nX; ++j) {
      r.continuity = std::max(r.continuity, std::abs(rho_T(i, j) + flux_X(i, j)));
      r.momentum =
          std::max(r.momentum, std::abs(v_T(i, j) + v(i, j) * v_X(i, j) - 4.0 * rho_X(i, j)));
    }
  return r;
}

// ---------------------------------------------------------------------------
// Quadratic-phase lens pulse: Φ = δ(T) + g(T)X², ρ = δ'/2 + X²[g'/2 + 2g²],
// with g'' + 20 g g' + 48 g³ = 0 and δ'' + 4 g δ' = 0.

struct TalanovState {
  double T = 0.0;
  double g = 0.0;
  double g_dot = 0.0;
  double delta = 0.0;
  double delta_dot = 0.0;

  /// −δ'/(g' + 4g²); the pulse is valid when this is positive (or infinite).
  double support_half_width_sq() const { return -delta_dot / (g_dot + 4.0 * g * g); }
};

/// State on the exact branch g = A/(T - T0) (A = 1/4 or 1/6) at time T.
/// Along it δ' ∝ (T - T0)^{-4A}.
inline TalanovState talanov_exact_branch(double A, double T0, double T, double delta,
                                         double delta_dot) {
  const double tau = T - T0;
  return {T, A / tau, -A / (tau * tau), delta, delta_dot};
}

namespace detail {
struct TalanovRhs {
  double g, g_dot, delta, delta_dot;
};
inline TalanovRhs talanov_rhs(const TalanovRhs& y) {
  return {y.g_dot, -20.0 * y.g * y.g_dot - 48.0 * y.g * y.g * y.g, y.delta_dot,
          -4.0 * y.g * y.delta_dot};
}
} // namespace detail

inline constexpr double kTalanovBlowupGuard = 1e6;

/// Fixed-step classical RK4 for the lens ODEs from `initial.T` to `T_end`.
/// The last step is shortened to land on T_end. |g| > 1e6 raises BlowUpError
/// carrying the last valid time.
inline std::vector<TalanovState> talanov_integrate(const TalanovState& initial, double T_end,
                                                   double dt) {
  if (!(dt > 0.0)) throw DomainError("talanov_integrate: dt must be positive");
  const double span = T_end - initial.T;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const auto full = static_cast<std::size_t>(std::floor(std::abs(span) / dt + 1e-9));
  std::vector<TalanovState> traj{initial};
  traj.reserve(full + 2);

  auto advance = [](const TalanovState& s, double h) {
    using detail::TalanovRhs;
    const TalanovRhs y{s.g, s.g_dot, s.delta, s.delta_dot};
    auto add = [](const TalanovRhs& a, const TalanovRhs& k, double c) {
      return TalanovRhs{a.g + c * k.g, a.g_dot + c * k.g_dot, a.delta + c * k.delta,
                        a.delta_dot + c * k.delta_dot};
    };
    const auto k1 = detail::talanov_rhs(y);
    const auto k2 = detail::talanov_rhs(add(y, k1, 0.5 * h));
    const auto k3 = detail::talanov_rhs(add(y, k2, 0.5 * h));
    const auto k4 = detail::talanov_rhs(add(y, k3, h));
    auto comb = [h](double y0, double a, double b, double c, double d) {
      return y0 + h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
    };
    return TalanovState{s.T + h, comb(y.g, k1.g, k2.g, k3.g, k4.g),
                        comb(y.g_dot, k1.g_dot, k2.g_dot, k3.g_dot, k4.g_dot),
                        comb(y.delta, k1.delta, k2.delta, k3.delta, k4.delta),
                        comb(y.delta_dot, k1.delta_dot, k2.delta_dot, k3.delta_dot, k4.delta_dot)};
  };

  auto push = [&](double h) {
    auto next = advance(traj.back(), h);
    if (!std::isfinite(next.g) || std::abs(next.g) > kTalanovBlowupGuard)
      throw BlowUpError("talanov_integrate: lens parameter blew up", traj.back().T);
    traj.push_back(next);
  };

  for (std::size_t k = 0; k < full; ++k) push(dir * dt);
  const double rest = T_end - traj.back().T;
  if (std::abs(rest) > 1e-12 * std::max(1.0, std::abs(T_end))) push(rest);
  traj.back().T = T_end;
  return traj;
}

struct TalanovField {
  std::vector<double> Phi;
  std::vector<double> rho;
  bool infinite_support = false;
  double half_width = 0.0; ///< +inf when infinite_support
};

/// Intensity/phase of the lens pulse on X samples; ρ is clipped to 0 outside
/// |X| < [−δ'/(g' + 4g²)]^{1/2}.
inline TalanovField talanov_field(const TalanovState& st, std::span<const double> X) {
  const double denom = st.g_dot + 4.0 * st.g * st.g;
  TalanovField out;
  if (!(st.delta_dot > 0.0))
    throw DomainError("talanov_field: invalid pulse (delta_dot must be positive)");
  if (denom == 0.0) {
    out.infinite_support = true;
    out.half_width = INFINITY;
  } else {
    const double w2 = -st.delta_dot / denom;
    if (!(w2 > 0.0)) throw DomainError("talanov_field: invalid pulse (nonpositive support width)");
    out.half_width = std::sqrt(w2);
  }
  out.Phi.resize(X.size());
  out.rho.resize(X.size());
  for (std::size_t j = 0; j < X.size(); ++j) {
    const double x2 = X[j] * X[j];
    out.Phi[j] = st.delta + st.g * x2;
    const bool inside = out.infinite_support || std::abs(X[j]) < out.half_width;
    out.rho[j] = inside ? std::max(0.0, 0.5 * st.delta_dot + 0.5 * x2 * denom) : 0.0;
  }
  return out;
}

/// G = ρ^{1/2} exp(iΦ/ε) on the grid.
inline ComplexField1D wkb_assemble(std::span<const double> rho, std::span<const double> Phi,
                                   double epsilon, const Grid1D& grid) {
  if (!(epsilon > 0.0)) throw DomainError("wkb_assemble: epsilon must be positive");
  if (rho.size() != grid.n || Phi.size() != grid.n)
    throw StructureError("wkb_assemble: sample count does not match grid");
  ComplexField1D G(grid);
  for (std::size_t j = 0; j < grid.n; ++j) {
    if (rho[j] < 0.0) throw DomainError("wkb_assemble: negative intensity at node " + std::to_string(j));
    G.values[j] = std::polar(std::sqrt(rho[j]), Phi[j] / epsilon);
  }
  return G;
}

} // namespace sfocus
