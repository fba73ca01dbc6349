#pragma once

// The universal inner solution: matched initial data at large negative t,
// a symmetric-in-t candidate run, and the checks applied to it.

#include <sfocus/asymptotics.hpp>
#include <sfocus/errors.hpp>
#include <sfocus/finite_difference.hpp>
#include <sfocus/grid.hpp>
#include <sfocus/jets.hpp>
#include <sfocus/lax.hpp>
#include <sfocus/mollify.hpp>
#include <sfocus/ngo.hpp>
#include <sfocus/nls.hpp>
#include <sfocus/spectral.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace sfocus {

struct MatchingConfig {
  double t0 = -32.0;
  double mollifier_width_factor = 3.0; ///< layer width c_m|t0|^{2/9}
  bool include_dip_tail = false;
  std::optional<DipConstants> dip_constants; ///< required when include_dip_tail

  void validate() const {
    if (!(t0 < 0.0) || !std::isfinite(t0)) throw DomainError("matching.t0 must be negative");
    if (!(mollifier_width_factor > 0.0)) throw DomainError("matching.mollifier_width_factor must be > 0");
    if (include_dip_tail && !dip_constants)
      throw DomainError("matching.include_dip_tail needs matching.dip_constants");
  }
  double layer_width() const { return mollifier_width_factor * std::pow(std::abs(t0), 2.0 / 9.0); }
};

/// Parabola half-width √(18a)|t|^{2/3}.
inline double parabola_half_width(const FocusFrame& frame, double t) {
  return frame.support_s() * std::pow(std::abs(t), 2.0 / 3.0);
}

/// Inner data at t0: r = |t0|^{-1/3}[a/2 − s²/36]^{1/2}, φ = t0^{1/3}[3a + s²/6],
/// s = x/|t0|^{2/3}. The intensity r² is convolved with the bump kernel of
/// width c_m|t0|^{2/9}, which keeps its integral.
inline ComplexField1D inner_initial_data(const FocusFrame& frame, const MatchingConfig& cfg,
                                         const Grid1D& grid) {
  frame.validate();
  cfg.validate();
  grid.validate();
  const double t0 = cfg.t0;
  const double half = parabola_half_width(frame, t0);
  const double room = std::min(std::abs(grid.x_min), std::abs(grid.x_max));
  if (!(half < 0.5 * room))
    throw DomainError("inner_initial_data: parabola half-width " + std::to_string(half) +
                      " must be below half the domain half-width " + std::to_string(0.5 * room));
  const double c = real_cbrt(t0), c2 = c * c;
  std::vector<double> rho(grid.n), phase(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double s = grid.x(j) / c2;
    rho[j] = std::max(0.0, 0.5 * frame.a - s * s / 36.0) / c2;
    phase[j] = c * (3.0 * frame.a + s * s / 6.0);
  }
  rho = mollify(rho, grid.dx(), cfg.layer_width());
  ComplexField1D q(grid);
  for (std::size_t j = 0; j < grid.n; ++j) q.values[j] = std::polar(std::sqrt(rho[j]), phase[j]);

  if (cfg.include_dip_tail) {
    const double edge = frame.support_s(), w = cfg.layer_width();
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double beyond = std::abs(grid.x(j)) - half;
      if (beyond <= 0.5 * w) continue;
      // ramp from 0 at half a layer outside the edge to 1 one and a half layers out
      const double u = std::min(1.0, (beyond - 0.5 * w) / w);
      const double ramp = 1.0 - bump(u);
      const double s = grid.x(j) / c2;
      if (std::abs(s) <= edge) continue;
      q.values[j] += ramp * dip_field(t0, s, frame, cfg.dip_constants).value;
    }
  }
  return q;
}

/// Mass of the unmollified data, (2a/3)√(18a).
inline double inner_data_mass(const FocusFrame& frame) {
  return 2.0 * frame.a / 3.0 * frame.support_s();
}

struct CandidateRun {
  FocusFrame frame;
  MatchingConfig cfg;
  double dt = 0.0;
  std::size_t sample_every = 1;
  std::vector<ComplexField1D> snapshots; ///< at times[k], symmetric about 0
  std::vector<double> times;
  std::vector<ConservedDiagnostics> diagnostics;
  std::vector<double> origin_times; ///< every step
  std::vector<cplx> origin_series;  ///< q(t, 0)
  std::array<ComplexField1D, 3> focal; ///< t = −dt, 0, dt
  double mass_drift = 0.0;             ///< max relative deviation from the initial mass

  std::size_t zero_index() const { return times.size() / 2; }
};

/// Largest start-up step: 0.1|t0|^{-1/3}/(3a).
inline double candidate_dt_bound(const FocusFrame& frame, double t0) {
  return 0.1 * std::pow(std::abs(t0), -1.0 / 3.0) / (3.0 * frame.a);
}

/// Evolves the matched data from t0 to −t0 with ε = 1. The grid must be
/// symmetric with a node at x = 0; the step count per half must be a multiple
/// of sample_every.
inline CandidateRun construct_candidate(const FocusFrame& frame, const MatchingConfig& cfg,
                                        const Grid1D& grid, double dt, std::size_t sample_every,
                                        StepperOptions opt = {}) {
  frame.validate();
  cfg.validate();
  if (!grid.is_symmetric()) throw StructureError("construct_candidate: grid must be symmetric about x = 0");
  if (!(dt > 0.0)) throw DomainError("construct_candidate: dt must be positive");
  if (dt > candidate_dt_bound(frame, cfg.t0) * (1.0 + 1e-12))
    throw DomainError("construct_candidate: dt exceeds 0.1|t0|^{-1/3}/(3a) = " +
                      std::to_string(candidate_dt_bound(frame, cfg.t0)));
  if (sample_every == 0) throw DomainError("construct_candidate: sample_every must be >= 1");
  const std::size_t half_steps = step_count(cfg.t0, 0.0, dt);
  if (half_steps % sample_every != 0)
    throw StructureError("construct_candidate: |t0|/dt must be a multiple of sample_every");
  const std::size_t steps = 2 * half_steps;
  const std::size_t origin = grid.origin_index();

  CandidateRun run;
  run.frame = frame;
  run.cfg = cfg;
  run.dt = dt;
  run.sample_every = sample_every;
  StrangStepper stepper(grid, 1.0, opt);
  EvolutionState st{inner_initial_data(frame, cfg, grid), cfg.t0, 1.0};
  auto time_of = [&](std::size_t k) {
    return (static_cast<double>(k) - static_cast<double>(half_steps)) * dt;
  };
  auto record = [&](std::size_t k) {
    run.snapshots.push_back(st.field);
    run.times.push_back(time_of(k));
    run.diagnostics.push_back(conserved_diagnostics(stepper.ops(), st.field, 1.0));
  };
  auto record_origin = [&](std::size_t k) {
    run.origin_times.push_back(time_of(k));
    run.origin_series.push_back(st.field.values[origin]);
  };
  record(0);
  record_origin(0);
  if (half_steps == 1) run.focal[0] = st.field;
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(st, dt);
    st.t = time_of(k);
    record_origin(k);
    if (k + 1 == half_steps) run.focal[0] = st.field;
    if (k == half_steps) run.focal[1] = st.field;
    if (k == half_steps + 1) run.focal[2] = st.field;
    if (k % sample_every == 0) record(k);
  }
  const double m0 = run.diagnostics.front().mass;
  for (const auto& d : run.diagnostics) run.mass_drift = std::max(run.mass_drift, std::abs(d.mass / m0 - 1.0));
  return run;
}

struct ParityReport {
  double x_even_defect = 0.0;
  double r_even_defect = 0.0;
  double phase_odd_defect = 0.0;
  double phi0 = 0.0; ///< arg q(0, 0)
};

/// Parity defects over (t, −t) snapshot pairs. Phases are unwrapped in t at
/// x = 0 (anchored at t = 0) and then in x from the origin; the phase defect
/// counts the core where r ≥ ¼ r(t, 0) at both t and −t.
inline ParityReport parity_report(const std::vector<ComplexField1D>& snapshots, const std::vector<double>& times) {
  const std::size_t m = snapshots.size();
  if (m == 0 || times.size() != m || m % 2 == 0)
    throw StructureError("parity_report: need an odd number of snapshots with matching times");
  const double scale = std::max(std::abs(times.front()), std::abs(times.back()));
  for (std::size_t k = 0; k < m; ++k)
    if (std::abs(times[k] + times[m - 1 - k]) > 1e-9 * std::max(1.0, scale))
      throw StructureError("parity_report: trajectory is not symmetric about t = 0");
  const Grid1D& grid = snapshots.front().grid;
  if (!grid.is_symmetric()) throw StructureError("parity_report: grid must be symmetric about x = 0");
  for (const auto& s : snapshots)
    if (!(s.grid == grid)) throw StructureError("parity_report: snapshots on different grids");
  const std::size_t n = grid.n, o = grid.origin_index(), mid = m / 2;
  auto mirror = [&](std::size_t j) { return (2 * o + n - j) % n; };

  ParityReport rep;
  rep.phi0 = std::arg(snapshots[mid].values[o]);

  std::vector<double> origin_phase(m);
  for (std::size_t k = 0; k < m; ++k) origin_phase[k] = std::arg(snapshots[k].values[o]);
  origin_phase = unwrap_phase(origin_phase, mid);

  auto unwrapped = [&](std::size_t k) {
    auto ph = unwrap_phase(snapshots[k].phase(), o);
    const double shift = origin_phase[k] - ph[o];
    for (auto& p : ph) p += shift;
    return ph;
  };
  auto core = [&](std::size_t k) {
    const auto r = snapshots[k].amplitude();
    std::vector<bool> in(n, false);
    const double floor = 0.25 * r[o];
    in[o] = r[o] > 0.0;
    for (std::size_t j = o + 1; j < n && r[j] >= floor; ++j) in[j] = true;
    for (std::size_t j = o; j-- > 0 && r[j] >= floor;) in[j] = true;
    return in;
  };

  for (std::size_t k = 0; k < m; ++k) {
    const auto& v = snapshots[k].values;
    for (std::size_t j = 0; j < n; ++j)
      rep.x_even_defect = std::max(rep.x_even_defect, std::abs(v[j] - v[mirror(j)]));
  }
  for (std::size_t k = 0; k <= mid; ++k) {
    const std::size_t kk = m - 1 - k;
    const auto ra = snapshots[k].amplitude(), rb = snapshots[kk].amplitude();
    for (std::size_t j = 0; j < n; ++j) rep.r_even_defect = std::max(rep.r_even_defect, std::abs(ra[j] - rb[j]));
    const auto pa = unwrapped(k), pb = unwrapped(kk);
    const auto ca = core(k), cb = core(kk);
    for (std::size_t j = 0; j < n; ++j)
      if (ca[j] && cb[j])
        rep.phase_odd_defect = std::max(rep.phase_odd_defect, std::abs((pa[j] - rep.phi0) + (pb[j] - rep.phi0)));
  }
  return rep;
}

inline ParityReport parity_report(const CandidateRun& run) { return parity_report(run.snapshots, run.times); }

struct OdexResidual {
  std::vector<double> x;
  std::vector<cplx> residual;
  double max_abs = 0.0; ///< over counted nodes
  double rms = 0.0;     ///< over counted nodes
  std::size_t counted = 0;
};

/// it[q_xxx + 6|q|²q_x] + xq_xx/2 + q_x + x|q|²q + f(ν + ∫_0^x|q|²)q, counted
/// where |q| > 1e-8 and |x| ≤ window. f = 1 is the form compatible with A(λ);
/// 2 is selectable.
inline OdexResidual odex_residual(const SliceJets& j, const FocusFrame& frame, double nonlocal_factor = 1.0,
                                  double window = INFINITY) {
  j.check();
  const cplx I(0, 1);
  OdexResidual out;
  out.x = j.x;
  out.residual.resize(j.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const double x = j.x[k], m = std::norm(j.q[k]);
    const cplx R = I * j.t * (j.q_xxx[k] + 6.0 * m * j.q_x[k]) + 0.5 * x * j.q_xx[k] + j.q_x[k] +
                   x * m * j.q[k] + nonlocal_factor * (frame.nu + j.mass[k]) * j.q[k];
    out.residual[k] = R;
    if (std::abs(j.q[k]) > 1e-8 && std::abs(x) <= window) {
      out.max_abs = std::max(out.max_abs, std::abs(R));
      sum += std::norm(R);
      ++out.counted;
    }
  }
  if (out.counted) out.rms = std::sqrt(sum / static_cast<double>(out.counted));
  return out;
}

inline OdexResidual odex_residual(SpectralOps& ops, const ComplexField1D& q, double t, const FocusFrame& frame,
                                  double nonlocal_factor = 1.0, double window = INFINITY) {
  return odex_residual(spectral_jets(ops, q, t), frame, nonlocal_factor, window);
}

inline OdexResidual odex_residual(const ComplexField1D& q, double t, const FocusFrame& frame,
                                  double nonlocal_factor = 1.0, double window = INFINITY) {
  SpectralOps ops(q.grid);
  return odex_residual(ops, q, t, frame, nonlocal_factor, window);
}

struct SeriesResidual {
  std::vector<double> times;
  std::vector<cplx> residual;
  double max_abs = 0.0;
  double rms = 0.0;
};

namespace detail {
inline double uniform_step(const std::vector<double>& times, const char* who) {
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(h > 0.0)) throw StructureError(std::string(who) + ": times must increase");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - h) > 1e-6 * h)
      throw StructureError(std::string(who) + ": times must be uniformly spaced");
  return h;
}
} // namespace detail

/// t q'' + 3q'/2 − 2it|q|²q' − i|q|²q by fourth-order central differences,
/// on nodes at least two samples from either end.
inline SeriesResidual qunt_residual(const std::vector<cplx>& q, const std::vector<double>& times) {
  if (q.size() != times.size()) throw StructureError("qunt_residual: size mismatch");
  if (q.size() < 7) throw StructureError("qunt_residual: need at least 7 samples");
  const double h = detail::uniform_step(times, "qunt_residual");
  const cplx I(0, 1);
  SeriesResidual out;
  double sum = 0.0;
  std::span<const cplx> f(q);
  for (std::size_t k = 2; k + 2 < q.size(); ++k) {
    const double t = times[k], m = std::norm(q[k]);
    const cplx d1 = fd::central_d1(f, k, h), d2 = fd::central_d2(f, k, h);
    const cplx R = t * d2 + 1.5 * d1 - 2.0 * I * t * m * d1 - I * m * q[k];
    out.times.push_back(t);
    out.residual.push_back(R);
    out.max_abs = std::max(out.max_abs, std::abs(R));
    sum += std::norm(R);
  }
  out.rms = std::sqrt(sum / static_cast<double>(out.residual.size()));
  return out;
}

struct XiSeries {
  std::vector<double> times;
  std::vector<cplx> xi;
};

/// ξ = (8t/a³)[tφ_t r² + (i/2)(tr²)_t] with φ unwrapped from the middle sample
/// and both derivatives by the 5-point least-squares stencil. The two samples at
/// each end are dropped.
inline XiSeries xi_extract(const std::vector<cplx>& q, const std::vector<double>& times, const FocusFrame& frame) {
  frame.validate();
  if (q.size() != times.size()) throw StructureError("xi_extract: size mismatch");
  if (q.size() < 5) throw StructureError("xi_extract: need at least 5 samples");
  const double h = detail::uniform_step(times, "xi_extract");
  const std::size_t n = q.size();
  std::vector<double> phase(n), tr2(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(q[k]) < 1e-10)
      throw DomainError("xi_extract: amplitude below 1e-10 at t = " + std::to_string(times[k]) +
                        "; phase derivative is ill-conditioned");
    phase[k] = std::arg(q[k]);
    tr2[k] = times[k] * std::norm(q[k]);
  }
  phase = unwrap_phase(phase, n / 2);
  const double a3 = frame.a * frame.a * frame.a;
  XiSeries out;
  std::span<const double> ph(phase), w(tr2);
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double t = times[k];
    const double phi_t = fd::ls5_derivative(ph, k, h), tr2_t = fd::ls5_derivative(w, k, h);
    out.times.push_back(t);
    out.xi.push_back(8.0 * t / a3 * cplx(t * phi_t * std::norm(q[k]), 0.5 * tr2_t));
  }
  return out;
}

/// Jets of the t = 0 candidate slice with q_t from the focal snapshot triple.
inline SliceJets candidate_focal_jets(const CandidateRun& run) {
  const auto& f = run.focal;
  std::vector<cplx> qt(f[1].size());
  for (std::size_t j = 0; j < qt.size(); ++j) qt[j] = (f[2].values[j] - f[0].values[j]) / (2.0 * run.dt);
  return spectral_jets(f[1], 0.0, &qt);
}

struct CandidateChecks {
  double t0 = 0.0;
  ParityReport parity;
  double odex_rms = 0.0;    ///< t = 0, |x| ≤ window
  double qunt_rms = 0.0;    ///< x = 0, |t| ≤ window
  double det_error = 0.0;   ///< max |det A₋₂ − a³/2| at t = 0, |x| ≤ window
  cplx det_mean;
  double det_std = 0.0;
  double focal_amplitude = 0.0; ///< |q(0, 0)|
  double mass_drift = 0.0;
};

/// The checks applied to one candidate run, all restricted to |x| ≤ x_window
/// and |t| ≤ t_window.
inline CandidateChecks check_candidate(const CandidateRun& run, double x_window = 20.0, double t_window = 4.0) {
  CandidateChecks c;
  c.t0 = run.cfg.t0;
  c.parity = parity_report(run);
  c.mass_drift = run.mass_drift;
  const auto jets = candidate_focal_jets(run);
  c.odex_rms = odex_residual(jets, run.frame, 1.0, x_window).rms;

  std::vector<cplx> q;
  std::vector<double> t;
  for (std::size_t k = 0; k < run.origin_times.size(); ++k)
    if (std::abs(run.origin_times[k]) <= t_window + 1e-12) {
      q.push_back(run.origin_series[k]);
      t.push_back(run.origin_times[k]);
    }
  c.qunt_rms = qunt_residual(q, t).rms;

  std::vector<bool> mask(jets.size());
  for (std::size_t k = 0; k < jets.size(); ++k) mask[k] = std::abs(jets.x[k]) <= x_window;
  const auto det = a_minus2_det(jets, run.frame, &mask);
  const double target = 0.5 * std::pow(run.frame.a, 3);
  for (std::size_t k = 0; k < jets.size(); ++k)
    if (mask[k]) c.det_error = std::max(c.det_error, std::abs(det.det[k] - target));
  c.det_mean = det.mean;
  c.det_std = det.std_dev;
  c.focal_amplitude = std::abs(run.focal[1].values[run.focal[1].grid.origin_index()]);
  return c;
}

} // namespace sfocus
