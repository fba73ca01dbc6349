#pragma once

// A fixed-t slice of q(t,x) together with the derivatives the Lax matrices
// and the x-ODE need.

#include <sfocus/errors.hpp>
#include <sfocus/grid.hpp>
#include <sfocus/spectral.hpp>

#include <optional>
#include <vector>

namespace sfocus {

struct SliceJets {
  double t = 0.0;
  std::vector<double> x;
  std::vector<cplx> q, q_x, q_xx, q_xxx;
  std::vector<cplx> q_t, q_xt; ///< empty when no time derivative is available
  std::vector<double> mass;    ///< ∫_0^x |q|², negative for x < 0

  std::size_t size() const { return x.size(); }
  bool has_time_derivative() const { return !q_t.empty(); }

  void check() const {
    const std::size_t n = x.size();
    if (q.size() != n || q_x.size() != n || q_xx.size() != n || q_xxx.size() != n ||
        mass.size() != n)
      throw StructureError("SliceJets: inconsistent sizes");
    if (!q_t.empty() && (q_t.size() != n || q_xt.size() != n))
      throw StructureError("SliceJets: inconsistent time-derivative sizes");
  }
};

/// Spectral jets of a periodic slice. When q_t is supplied, q_xt is its
/// spectral derivative.
inline SliceJets spectral_jets(SpectralOps& ops, const ComplexField1D& q, double t,
                               const std::vector<cplx>* q_t = nullptr) {
  SliceJets j;
  j.t = t;
  j.x = q.grid.points();
  j.q = q.values;
  j.q_x = ops.derivative(q, 1);
  j.q_xx = ops.derivative(q, 2);
  j.q_xxx = ops.derivative(q, 3);
  std::vector<double> dens(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) dens[k] = std::norm(q.values[k]);
  j.mass = ops.antiderivative_from_origin(dens);
  if (q_t) {
    if (q_t->size() != q.size()) throw StructureError("spectral_jets: q_t size mismatch");
    j.q_t = *q_t;
    j.q_xt = ops.derivative(*q_t, 1);
  }
  return j;
}

inline SliceJets spectral_jets(const ComplexField1D& q, double t,
                               const std::vector<cplx>* q_t = nullptr) {
  SpectralOps ops(q.grid);
  return spectral_jets(ops, q, t, q_t);
}

/// Fills q_t, q_xt from the inner equation q_t = i(q_xx + 2|q|²q).
inline void time_derivative_from_equation(SliceJets& j) {
  const std::size_t n = j.size();
  j.q_t.resize(n);
  j.q_xt.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx q = j.q[k], qx = j.q_x[k];
    const double m = std::norm(q);
    // (|q|²q)_x = 2|q|²q_x + q² q̄_x
    const cplx nl_x = 2.0 * m * qx + q * q * std::conj(qx);
    j.q_t[k] = cplx(0, 1) * (j.q_xx[k] + 2.0 * m * q);
    j.q_xt[k] = cplx(0, 1) * (j.q_xxx[k] + 2.0 * nl_x);
  }
}

} // namespace sfocus
