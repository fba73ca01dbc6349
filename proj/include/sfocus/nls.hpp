#pragma once

// Split-step Fourier solver for −iεG_T = ε²G_XX + 2|G|²G on a periodic grid.
// ε = 1 is the inner equation −iq_t = q_xx + 2|q|²q.

#include <sfocus/errors.hpp>
#include <sfocus/grid.hpp>
#include <sfocus/spectral.hpp>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace sfocus {

struct EvolutionState {
  ComplexField1D field;
  double t = 0.0;
  double epsilon = 1.0;

  void validate() const {
    if (!(epsilon > 0.0)) throw DomainError("EvolutionState: epsilon must be positive");
  }
};

struct ConservedDiagnostics {
  double mass = 0.0;     ///< ∫|q|²
  double momentum = 0.0; ///< Im ∫ q̄ q_x
  double energy = 0.0;   ///< ∫(ε²|q_x|² − |q|⁴)
};

inline ConservedDiagnostics conserved_diagnostics(SpectralOps& ops, const ComplexField1D& f,
                                                  double epsilon) {
  const auto qx = ops.derivative(f, 1);
  const double dx = f.grid.dx();
  ConservedDiagnostics d;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = std::norm(f.values[j]);
    d.mass += m;
    d.momentum += std::imag(std::conj(f.values[j]) * qx[j]);
    d.energy += epsilon * epsilon * std::norm(qx[j]) - m * m;
  }
  d.mass *= dx;
  d.momentum *= dx;
  d.energy *= dx;
  return d;
}

inline ConservedDiagnostics conserved_diagnostics(const ComplexField1D& f, double epsilon) {
  SpectralOps ops(f.grid);
  return conserved_diagnostics(ops, f, epsilon);
}

struct SolitonField {
  ComplexField1D field;
  bool boundary_warning = false; ///< |q| at the domain ends exceeds 1e−14
};

/// η sech(η(x − x0)) e^{iθ0}; the ε = 1 evolution is the same profile times e^{iη²t}.
inline SolitonField soliton_field(double eta, double x0, double theta0, const Grid1D& grid) {
  grid.validate();
  SolitonField s{ComplexField1D(grid)};
  for (std::size_t j = 0; j < grid.n; ++j)
    s.field.values[j] = std::polar(eta / std::cosh(eta * (grid.x(j) - x0)), theta0);
  const double edge = std::max(std::abs(s.field.values.front()),
                               eta / std::cosh(eta * (grid.x_max - x0)));
  s.boundary_warning = edge > 1e-14;
  return s;
}

/// Exact moving-frame value of the stationary soliton at (t, x).
inline cplx soliton_exact(double eta, double x0, double theta0, double t, double x) {
  return std::polar(eta / std::cosh(eta * (x - x0)), eta * eta * t + theta0);
}

inline constexpr double kNlsBlowupGuard = 1e8;

struct StepperOptions {
  bool filter = false;         ///< exponential cutoff on the top 1/8 of modes
  double filter_strength = 36.0;
  int filter_order = 8;
};

/// Strang composition N(dt/2) L(dt) N(dt/2). Owns its FFT workspace, so one
/// stepper per thread.
class StrangStepper {
public:
  StrangStepper(const Grid1D& grid, double epsilon, StepperOptions opt = {})
      : ops_(grid), epsilon_(epsilon), opt_(opt) {
    if (!(epsilon > 0.0)) throw DomainError("StrangStepper: epsilon must be positive");
    const auto& k = ops_.k();
    kmax_ = 0.0;
    for (double kk : k) kmax_ = std::max(kmax_, std::abs(kk));
  }

  const Grid1D& grid() const { return ops_.grid(); }
  double epsilon() const { return epsilon_; }
  SpectralOps& ops() { return ops_; }

  /// Advances `state` by dt in place (dt < 0 runs backwards).
  void step(EvolutionState& state, double dt) {
    if (dt == 0.0) throw DomainError("strang_step: dt must be nonzero");
    if (!(state.field.grid == ops_.grid())) throw StructureError("strang_step: grid mismatch");
    if (state.epsilon != epsilon_) throw StructureError("strang_step: epsilon mismatch");
    const double t_before = state.t;
    auto& v = state.field.values;
    nonlinear(v, 0.5 * dt);
    const double eps = epsilon_;
    const double kc = 7.0 / 8.0 * kmax_;
    ops_.apply_multiplier(v, [&](double k, std::size_t) {
      cplx m = std::exp(cplx(0.0, -eps * k * k * dt));
      if (opt_.filter && std::abs(k) > kc) {
        const double u = (std::abs(k) - kc) / (kmax_ - kc);
        m *= std::exp(-opt_.filter_strength * std::pow(u, opt_.filter_order));
      }
      return m;
    });
    nonlinear(v, 0.5 * dt);
    state.t += dt;
    double peak = 0.0;
    for (const auto& z : v) {
      const double a = std::abs(z);
      if (!std::isfinite(a)) throw BlowUpError("strang_step: non-finite field", t_before);
      peak = std::max(peak, a);
    }
    if (peak > kNlsBlowupGuard) throw BlowUpError("strang_step: amplitude exceeded guard", t_before);
  }

private:
  void nonlinear(std::vector<cplx>& v, double h) const {
    const double c = 2.0 * h / epsilon_;
    for (auto& z : v) z *= std::polar(1.0, c * std::norm(z));
  }

  SpectralOps ops_;
  double epsilon_;
  StepperOptions opt_;
  double kmax_ = 0.0;
};

inline EvolutionState strang_step(const EvolutionState& state, double dt, StepperOptions opt = {}) {
  state.validate();
  StrangStepper stepper(state.field.grid, state.epsilon, opt);
  EvolutionState out = state;
  stepper.step(out, dt);
  return out;
}

struct EvolveResult {
  std::vector<EvolutionState> trajectory;
  std::vector<double> times;
  std::vector<ConservedDiagnostics> diagnostics;
};

/// Called after every step with the updated state and the step index (1-based).
using StepObserver = std::function<void(const EvolutionState&, std::size_t)>;

/// Number of steps of size dt from t_start to t_end; throws when not integral.
inline std::size_t step_count(double t_start, double t_end, double dt) {
  if (dt == 0.0) throw DomainError("evolve: dt must be nonzero");
  const double ratio = (t_end - t_start) / dt;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-6 * std::max(1.0, rounded))
    throw StructureError("evolve: (t_end - t)/dt is not a positive integer");
  return static_cast<std::size_t>(rounded);
}

/// Repeated Strang steps; snapshot and diagnostics every `sample_every` steps
/// (the initial state is always recorded, and so is the final one).
inline EvolveResult evolve(StrangStepper& stepper, EvolutionState state, double t_end, double dt,
                           std::size_t sample_every, const StepObserver& observer = {}) {
  state.validate();
  if (sample_every == 0) throw DomainError("evolve: sample_every must be >= 1");
  const std::size_t steps = step_count(state.t, t_end, dt);
  const double t_start = state.t;
  EvolveResult r;
  auto record = [&] {
    r.trajectory.push_back(state);
    r.times.push_back(state.t);
    r.diagnostics.push_back(conserved_diagnostics(stepper.ops(), state.field, state.epsilon));
  };
  record();
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(state, dt);
    state.t = t_start + static_cast<double>(k) * dt; // no drift from repeated addition
    if (observer) observer(state, k);
    if (k % sample_every == 0 || k == steps) record();
  }
  return r;
}

inline EvolveResult evolve(const EvolutionState& state, double t_end, double dt,
                           std::size_t sample_every, StepperOptions opt = {},
                           const StepObserver& observer = {}) {
  state.validate();
  StrangStepper stepper(state.field.grid, state.epsilon, opt);
  return evolve(stepper, state, t_end, dt, sample_every, observer);
}

} // namespace sfocus
