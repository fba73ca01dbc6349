#pragma once

// Lax matrices of the inner equation and the λ-equation of the universal
// solution:
//   Ψ_x = UΨ,  U = i[[−λ, q], [q̄, λ]]
//   Ψ_t = VΨ,  V = [[−i(2λ² − |q|²), 2iλq − q_x], [2iλq̄ + q̄_x, i(2λ² − |q|²)]]
//   Ψ_λ = AΨ,  A = A₁λ + A₀ + A₋₁/λ + A₋₂/λ²
// with σ = diag(−1, 1) and
//   A₁  = 4itσ
//   A₀  = [[−ix, 4itq], [4itq̄, ix]]
//   A₋₁ = [[2it|q|², ixq − 2tq_x], [ixq̄ + 2tq̄_x, −2it|q|²]]
//   A₋₂ = Dσ + [[0, −tq_t − (xq)_x/2], [tq̄_t + (xq̄)_x/2, 0]]
//   D   = t(q_xq̄ − q̄_xq) − (i/2)(x|q|² + ∫_0^x|q|² + ν).
// Cross-differentiation gives the residuals
//   U_t − V_x + [U, V]        (vanishes iff q solves the inner equation)
//   A_x − U_λ − [U, A]        (vanishes iff the slice solves the x-ODE)

#include <sfocus/errors.hpp>
#include <sfocus/jets.hpp>
#include <sfocus/ngo.hpp>
#include <sfocus/spectral.hpp>

#include <array>
#include <cmath>
#include <vector>

namespace sfocus {

/// 2×2 complex matrix, row-major.
struct Mat2 {
  cplx a{}, b{}, c{}, d{};

  cplx trace() const { return a + d; }
  cplx det() const { return a * d - b * c; }
  Mat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
  double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

  friend Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
};

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

/// Local data at one (t, x).
struct LaxPoint {
  double t = 0.0, x = 0.0;
  cplx q, q_x, q_xx, q_t, q_xt;
  double mass = 0.0; ///< ∫_0^x |q|²
};

struct ABlocks {
  Mat2 A1, A0, Am1, Am2;
};

inline ABlocks a_blocks(const LaxPoint& p, double nu) {
  const cplx I(0, 1);
  const double t = p.t, x = p.x, m = std::norm(p.q);
  const cplx qb = std::conj(p.q), qxb = std::conj(p.q_x), qtb = std::conj(p.q_t);
  const cplx D = t * (p.q_x * qb - qxb * p.q) - 0.5 * I * (x * m + p.mass + nu);
  ABlocks A;
  A.A1 = {-4.0 * I * t, 0.0, 0.0, 4.0 * I * t};
  A.A0 = {-I * x, 4.0 * I * t * p.q, 4.0 * I * t * qb, I * x};
  A.Am1 = {2.0 * I * t * m, I * x * p.q - 2.0 * t * p.q_x, I * x * qb + 2.0 * t * qxb, -2.0 * I * t * m};
  A.Am2 = {-D, -t * p.q_t - 0.5 * (p.q + x * p.q_x), t * qtb + 0.5 * (qb + x * qxb), D};
  return A;
}

/// x-derivatives of the A blocks (product rule, ∂_x∫_0^x|q|² = |q|²).
inline ABlocks a_blocks_x(const LaxPoint& p) {
  const cplx I(0, 1);
  const double t = p.t, x = p.x, m = std::norm(p.q);
  const cplx qb = std::conj(p.q), qxb = std::conj(p.q_x), qxxb = std::conj(p.q_xx), qxtb = std::conj(p.q_xt);
  const double m_x = 2.0 * std::real(p.q_x * qb);
  const cplx D_x = t * (p.q_xx * qb - qxxb * p.q) - 0.5 * I * (2.0 * m + x * m_x);
  ABlocks A;
  A.A1 = {};
  A.A0 = {-I, 4.0 * I * t * p.q_x, 4.0 * I * t * qxb, I};
  A.Am1 = {2.0 * I * t * m_x, I * p.q + I * x * p.q_x - 2.0 * t * p.q_xx,
           I * qb + I * x * qxb + 2.0 * t * qxxb, -2.0 * I * t * m_x};
  A.Am2 = {-D_x, -t * p.q_xt - 0.5 * (2.0 * p.q_x + x * p.q_xx), t * qxtb + 0.5 * (2.0 * qxb + x * qxxb), D_x};
  return A;
}

inline Mat2 laurent(const ABlocks& A, cplx lambda) {
  return lambda * A.A1 + A.A0 + (1.0 / lambda) * A.Am1 + (1.0 / (lambda * lambda)) * A.Am2;
}

inline Mat2 u_matrix(cplx q, cplx lambda) {
  const cplx I(0, 1);
  return {-I * lambda, I * q, I * std::conj(q), I * lambda};
}

inline Mat2 v_matrix(cplx q, cplx q_x, cplx lambda) {
  const cplx I(0, 1);
  const double m = std::norm(q);
  const cplx diag = I * (2.0 * lambda * lambda - m);
  return {-diag, 2.0 * I * lambda * q - q_x, 2.0 * I * lambda * std::conj(q) + std::conj(q_x), diag};
}

struct LaxSample {
  cplx lambda;
  Mat2 U, V, A;
  double t = 0.0, x = 0.0;
};

/// U, V and A at one point; λ = 0 is a pole of A.
inline LaxSample build_matrices(const LaxPoint& p, cplx lambda, const FocusFrame& frame) {
  if (lambda == cplx(0.0, 0.0)) throw DomainError("build_matrices: lambda = 0 is a pole of A");
  return {lambda, u_matrix(p.q, lambda), v_matrix(p.q, p.q_x, lambda), laurent(a_blocks(p, frame.nu), lambda), p.t, p.x};
}

inline std::vector<cplx> default_lambdas() {
  return {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1), cplx(0.5, 0.5)};
}

struct LambdaResidual {
  cplx lambda;
  double max_abs = 0.0;
};

/// max_x of the largest entry of U_t − V_x + [U, V] on the middle of three
/// snapshots spaced dt apart (q_t by central difference).
inline std::vector<LambdaResidual> zero_curvature_residual(SpectralOps& ops, const ComplexField1D& before,
                                                           const ComplexField1D& mid,
                                                           const ComplexField1D& after, double dt,
                                                           const std::vector<cplx>& lambdas) {
  if (!(before.grid == mid.grid) || !(after.grid == mid.grid)) throw StructureError("zero_curvature_residual: grid mismatch");
  if (!(dt > 0.0)) throw DomainError("zero_curvature_residual: dt must be positive");
  const auto qx = ops.derivative(mid, 1);
  const auto qxx = ops.derivative(mid, 2);
  const cplx I(0, 1);
  std::vector<LambdaResidual> out;
  for (cplx lam : lambdas) {
    LambdaResidual r{lam, 0.0};
    for (std::size_t j = 0; j < mid.size(); ++j) {
      const cplx q = mid.values[j];
      const cplx qt = (after.values[j] - before.values[j]) / (2.0 * dt);
      const double m_x = 2.0 * std::real(qx[j] * std::conj(q));
      const Mat2 Ut{0.0, I * qt, I * std::conj(qt), 0.0};
      const Mat2 Vx{I * m_x, 2.0 * I * lam * qx[j] - qxx[j], 2.0 * I * lam * std::conj(qx[j]) + std::conj(qxx[j]), -I * m_x};
      const Mat2 res = Ut - Vx + commutator(u_matrix(q, lam), v_matrix(q, qx[j], lam));
      r.max_abs = std::max(r.max_abs, res.max_abs());
    }
    out.push_back(r);
  }
  return out;
}

/// Same, over a stored trajectory: uses the middle snapshot.
inline std::vector<LambdaResidual> zero_curvature_residual(const std::vector<ComplexField1D>& snapshots,
                                                           double dt, const std::vector<cplx>& lambdas) {
  if (snapshots.size() < 3) throw StructureError("zero_curvature_residual: need at least 3 snapshots");
  const std::size_t k = snapshots.size() / 2;
  SpectralOps ops(snapshots[k].grid);
  return zero_curvature_residual(ops, snapshots[k - 1], snapshots[k], snapshots[k + 1], dt, lambdas);
}

inline LaxPoint lax_point(const SliceJets& j, std::size_t k) {
  return {j.t, j.x[k], j.q[k], j.q_x[k], j.q_xx[k], j.q_t[k], j.q_xt[k], j.mass[k]};
}

/// max over the slice of the largest entry of A_x − U_λ − [U, A]; U_λ = i·diag(−1, 1).
/// `mask` (optional) restricts the nodes that count.
inline std::vector<LambdaResidual> isomonodromy_residual(const SliceJets& j, const std::vector<cplx>& lambdas,
                                                         const FocusFrame& frame,
                                                         const std::vector<bool>* mask = nullptr) {
  j.check();
  if (!j.has_time_derivative()) throw StructureError("isomonodromy_residual: slice lacks q_t");
  const cplx I(0, 1);
  const Mat2 U_lam{-I, 0.0, 0.0, I};
  std::vector<LambdaResidual> out;
  for (cplx lam : lambdas) {
    if (lam == cplx(0.0, 0.0)) throw DomainError("isomonodromy_residual: lambda = 0 is a pole of A");
    LambdaResidual r{lam, 0.0};
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (mask && !(*mask)[k]) continue;
      const auto p = lax_point(j, k);
      const Mat2 A = laurent(a_blocks(p, frame.nu), lam);
      const Mat2 Ax = laurent(a_blocks_x(p), lam);
      const Mat2 res = Ax - U_lam - commutator(u_matrix(p.q, lam), A);
      r.max_abs = std::max(r.max_abs, res.max_abs());
    }
    out.push_back(r);
  }
  return out;
}

struct DetReport {
  std::vector<cplx> det; ///< det A₋₂ per node
  cplx at_origin;        ///< value at the node nearest x = 0
  cplx mean;             ///< over counted nodes
  double std_dev = 0.0;  ///< √(mean |det − mean|²) over counted nodes
};

/// det A₋₂ along a slice (ν from the frame).
inline DetReport a_minus2_det(const SliceJets& j, const FocusFrame& frame,
                              const std::vector<bool>* mask = nullptr) {
  j.check();
  if (!j.has_time_derivative()) throw StructureError("a_minus2_det: slice lacks q_t");
  DetReport r;
  r.det.resize(j.size());
  std::size_t origin = 0, count = 0;
  r.mean = 0.0;
  for (std::size_t k = 0; k < j.size(); ++k) {
    r.det[k] = a_blocks(lax_point(j, k), frame.nu).Am2.det();
    if (std::abs(j.x[k]) < std::abs(j.x[origin])) origin = k;
    if (mask && !(*mask)[k]) continue;
    r.mean += r.det[k];
    ++count;
  }
  if (count == 0) throw StructureError("a_minus2_det: no nodes selected");
  r.mean /= static_cast<double>(count);
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (mask && !(*mask)[k]) continue;
    r.std_dev += std::norm(r.det[k] - r.mean);
  }
  r.std_dev = std::sqrt(r.std_dev / static_cast<double>(count));
  r.at_origin = r.det[origin];
  return r;
}

} // namespace sfocus
