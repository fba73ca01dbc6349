#pragma once

// Multi-run experiments: the semiclassical ε-sweep and the t0 ladder.

#include <sfocus/mollify.hpp>
#include <sfocus/ngo.hpp>
#include <sfocus/nls.hpp>
#include <sfocus/universal.hpp>

#include <future>
#include <vector>

namespace sfocus {

// ---------------------------------------------------------------------------
// ε-sweep

struct SweepConfig {
  FocusFrame frame;
  double T_start = -1.024e-3; ///< relative to T_f
  std::vector<double> epsilons{0.04, 0.02, 0.01};
  double mollifier_width_factor = 3.0;
  double inner_dx = 0.0625; ///< grid spacing in units of ε²
  double inner_dt = 0.01;   ///< time step in units of ε³ (capped by the start-up bound)
  double T_end = 1.024e-4;  ///< relative to T_f; past the focus, where the peak sits

  void validate() const {
    frame.validate();
    if (!(T_start < 0.0)) throw DomainError("sweep.T_start must be negative");
    if (!(T_end > T_start)) throw DomainError("sweep.T_end must exceed sweep.T_start");
    if (epsilons.empty()) throw DomainError("sweep.epsilons must not be empty");
    for (double e : epsilons)
      if (!(e > 0.0)) throw DomainError("sweep.epsilons must be positive");
    if (!(mollifier_width_factor > 0.0)) throw DomainError("sweep.mollifier_width_factor must be > 0");
    if (!(inner_dx > 0.0)) throw DomainError("sweep.inner_dx must be > 0");
    if (!(inner_dt > 0.0)) throw DomainError("sweep.inner_dt must be > 0");
  }
};

struct SweepLevel {
  double epsilon = 0.0;
  double t0 = 0.0;     ///< equivalent inner start time
  std::size_t n = 0;
  double X_half = 0.0; ///< physical domain half-width
  double dt = 0.0;
  std::size_t steps = 0;
  double peak = 0.0;   ///< max |G| over the run
  double peak_scaled = 0.0; ///< peak·ε
  double T_peak = 0.0; ///< relative to T_f
  double X_peak = 0.0;
  double x_width = 0.0; ///< FWHM in X of |G| at the peak time
  double t_width = 0.0; ///< FWHM in T of max_X |G|
  double mass_drift = 0.0;
};

/// Talanov pulse on the g = 1/(6(T − T_f)) branch at T_f + T_start, mollified
/// at the support edges, as G = ρ^{1/2}e^{iΦ/ε}.
inline ComplexField1D sweep_initial_data(const SweepConfig& cfg, double epsilon, const Grid1D& grid) {
  const FocusFrame& f = cfg.frame;
  const double tau = cfg.T_start;
  const auto st = talanov_exact_branch(1.0 / 6.0, f.T_f, f.T_f + tau, f.Phi_star + 3.0 * f.a * real_cbrt(tau),
                                       f.a * std::pow(std::abs(tau), -2.0 / 3.0));
  std::vector<double> X = grid.points();
  for (auto& x : X) x -= f.X_f;
  auto tf = talanov_field(st, X);
  const double t0 = tau / (epsilon * epsilon * epsilon);
  const double width = epsilon * epsilon * cfg.mollifier_width_factor * std::pow(std::abs(t0), 2.0 / 9.0);
  tf.rho = mollify(tf.rho, grid.dx(), width);
  return wkb_assemble(tf.rho, tf.Phi, epsilon, grid);
}

namespace detail {
inline double fwhm(const std::vector<double>& v, std::size_t at, double spacing) {
  const double half = 0.5 * v[at];
  std::size_t lo = at, hi = at;
  while (lo > 0 && v[lo - 1] > half) --lo;
  while (hi + 1 < v.size() && v[hi + 1] > half) ++hi;
  // linear interpolation of the two crossings
  double left = static_cast<double>(lo), right = static_cast<double>(hi);
  if (lo > 0) left -= (v[lo] - half) / (v[lo] - v[lo - 1]);
  if (hi + 1 < v.size()) right += (v[hi] - half) / (v[hi] - v[hi + 1]);
  return (right - left) * spacing;
}

inline std::size_t pow2_at_least(double v) {
  std::size_t n = 1;
  while (static_cast<double>(n) < v) n *= 2;
  return n;
}
} // namespace detail

/// Grid and step for one ε: the inner domain half-width is the smallest power
/// of two ≥ max(16, 2.2 × parabola half-width), all lengths scaled by ε² and
/// times by ε³.
inline SweepLevel sweep_level_setup(const SweepConfig& cfg, double epsilon) {
  SweepLevel lv;
  lv.epsilon = epsilon;
  const double e2 = epsilon * epsilon, e3 = e2 * epsilon;
  lv.t0 = cfg.T_start / e3;
  const double L_in = static_cast<double>(
      detail::pow2_at_least(std::max(16.0, 2.2 * parabola_half_width(cfg.frame, lv.t0))));
  lv.n = detail::pow2_at_least(2.0 * L_in / cfg.inner_dx);
  lv.X_half = e2 * L_in;
  const double dt_in = std::min(cfg.inner_dt, candidate_dt_bound(cfg.frame, lv.t0));
  const double span = cfg.T_end - cfg.T_start;
  lv.steps = static_cast<std::size_t>(std::ceil(span / (e3 * dt_in)));
  lv.dt = span / static_cast<double>(lv.steps);
  return lv;
}

inline SweepLevel run_sweep_level(const SweepConfig& cfg, double epsilon) {
  SweepLevel lv = sweep_level_setup(cfg, epsilon);
  const Grid1D grid{cfg.frame.X_f - lv.X_half, cfg.frame.X_f + lv.X_half, lv.n};
  StrangStepper stepper(grid, epsilon);
  EvolutionState st{sweep_initial_data(cfg, epsilon, grid), cfg.frame.T_f + cfg.T_start, epsilon};
  const double m0 = conserved_diagnostics(stepper.ops(), st.field, epsilon).mass;

  std::vector<double> peak_series(lv.steps + 1), amp(grid.n);
  auto scan = [&](std::size_t k) {
    double best = 0.0;
    std::size_t jb = 0;
    for (std::size_t j = 0; j < grid.n; ++j) {
      amp[j] = std::abs(st.field.values[j]);
      if (amp[j] > best) {
        best = amp[j];
        jb = j;
      }
    }
    peak_series[k] = best;
    if (best > lv.peak) {
      lv.peak = best;
      lv.T_peak = st.t - cfg.frame.T_f;
      lv.X_peak = grid.x(jb);
      lv.x_width = detail::fwhm(amp, jb, grid.dx());
    }
  };
  scan(0);
  for (std::size_t k = 1; k <= lv.steps; ++k) {
    stepper.step(st, lv.dt);
    st.t = cfg.frame.T_f + cfg.T_start + static_cast<double>(k) * lv.dt;
    scan(k);
    if (k % 1000 == 0 || k == lv.steps) {
      const double m = conserved_diagnostics(stepper.ops(), st.field, epsilon).mass;
      lv.mass_drift = std::max(lv.mass_drift, std::abs(m / m0 - 1.0));
    }
  }
  std::size_t kp = 0;
  for (std::size_t k = 0; k < peak_series.size(); ++k)
    if (peak_series[k] > peak_series[kp]) kp = k;
  lv.t_width = detail::fwhm(peak_series, kp, lv.dt);
  lv.peak_scaled = lv.peak * epsilon;
  return lv;
}

struct SweepResult {
  std::vector<SweepLevel> levels;
  double peak_scaled_spread = 0.0;  ///< max/min of peak·ε − 1
  std::vector<double> width_ratios; ///< x_width(ε_k)/x_width(ε_{k+1})
};

inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<std::future<SweepLevel>> jobs;
  for (double e : cfg.epsilons) jobs.push_back(std::async(std::launch::async, run_sweep_level, cfg, e));
  SweepResult r;
  for (auto& j : jobs) r.levels.push_back(j.get());
  double lo = INFINITY, hi = 0.0;
  for (const auto& l : r.levels) {
    lo = std::min(lo, l.peak_scaled);
    hi = std::max(hi, l.peak_scaled);
  }
  r.peak_scaled_spread = hi / lo - 1.0;
  for (std::size_t k = 0; k + 1 < r.levels.size(); ++k)
    r.width_ratios.push_back(r.levels[k].x_width / r.levels[k + 1].x_width);
  return r;
}

// ---------------------------------------------------------------------------
// t0 ladder

struct LadderConfig {
  FocusFrame frame;
  std::vector<double> t0s{-16.0, -32.0, -64.0};
  double mollifier_width_factor = 3.0;
  double x_half = 128.0;
  std::size_t n = 4096;
  double dt = 0.01;
  double snapshot_interval = 0.25;
  double x_window = 20.0; ///< odex and det checks use |x| ≤ x_window
  double t_window = 4.0;  ///< qunt check uses |t| ≤ t_window

  void validate() const {
    frame.validate();
    if (t0s.empty()) throw DomainError("ladder.t0s must not be empty");
    for (double t : t0s)
      if (!(t < 0.0)) throw DomainError("ladder.t0s must be negative");
    if (!(mollifier_width_factor > 0.0)) throw DomainError("ladder.mollifier_width_factor must be > 0");
    if (!(x_half > 0.0)) throw DomainError("ladder.x_half must be > 0");
    if (n < 16 || n % 2) throw DomainError("ladder.n must be even and >= 16");
    if (!(dt > 0.0)) throw DomainError("ladder.dt must be > 0");
    if (!(snapshot_interval >= dt)) throw DomainError("ladder.snapshot_interval must be >= ladder.dt");
    if (!(x_window > 0.0)) throw DomainError("ladder.x_window must be > 0");
    if (!(t_window > 0.0)) throw DomainError("ladder.t_window must be > 0");
  }

  std::size_t sample_every() const { return static_cast<std::size_t>(std::llround(snapshot_interval / dt)); }
};

/// Non-increasing within a relative slack per rung; values already below
/// `floor` count as non-increasing.
inline bool trend_non_increasing(const std::vector<double>& v, double slack = 0.1, double floor = 1e-10) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    if (v[k + 1] > v[k] * (1.0 + slack) && v[k + 1] > floor) return false;
  return true;
}

struct LadderResult {
  std::vector<CandidateChecks> rungs;
  std::vector<CandidateRun> runs; ///< kept only when requested
};

inline LadderResult run_ladder(const LadderConfig& cfg, bool keep_runs = false) {
  cfg.validate();
  const Grid1D grid = Grid1D::symmetric(cfg.x_half, cfg.n);
  auto job = [&](double t0) {
    MatchingConfig m;
    m.t0 = t0;
    m.mollifier_width_factor = cfg.mollifier_width_factor;
    auto run = construct_candidate(cfg.frame, m, grid, cfg.dt, cfg.sample_every());
    auto checks = check_candidate(run, cfg.x_window, cfg.t_window);
    return std::pair{std::move(checks), std::move(run)};
  };
  std::vector<std::future<std::pair<CandidateChecks, CandidateRun>>> jobs;
  for (double t0 : cfg.t0s) jobs.push_back(std::async(std::launch::async, job, t0));
  LadderResult r;
  for (auto& j : jobs) {
    auto [c, run] = j.get();
    r.rungs.push_back(c);
    if (keep_runs) r.runs.push_back(std::move(run));
  }
  return r;
}

} // namespace sfocus
