#include "config.hpp"
#include "output.hpp"

#include <sfocus/acceptance.hpp>
#include <sfocus/asymptotics.hpp>
#include <sfocus/experiments.hpp>
#include <sfocus/ngo.hpp>
#include <sfocus/nls.hpp>
#include <sfocus/painleve.hpp>
#include <sfocus/universal.hpp>

#include <CLI11.hpp>
#include <fftw3.h>

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace sfocus;
using cli::ConfigError;
using cli::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  std::string experiment;
  json cfg;
  json section;
  FocusFrame frame;
  cli::Outputs* out = nullptr;
  json report = json::object();
  json conventions;
};

std::string pre(const Context& c) { return c.experiment; }

double num(const Context& c, const char* key) { return cli::get<double>(c.section, pre(c), key); }
std::size_t count(const Context& c, const char* key) {
  const auto v = cli::get<long long>(c.section, pre(c), key);
  if (v < 0) throw ConfigError(pre(c) + "." + key, "must be non-negative");
  return static_cast<std::size_t>(v);
}
std::vector<double> list(const Context& c, const char* key) {
  return cli::get<std::vector<double>>(c.section, pre(c), key);
}

void require(bool ok, const Context& c, const char* key, const char* what) {
  if (!ok) throw ConfigError(pre(c) + "." + key, what);
}

bool pow2(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

FocusFrame read_frame(const json& f) {
  FocusFrame fr;
  fr.a = cli::get<double>(f, "frame", "a");
  fr.T_f = cli::get<double>(f, "frame", "T_f");
  fr.X_f = cli::get<double>(f, "frame", "X_f");
  fr.Phi_star = cli::get<double>(f, "frame", "Phi_star");
  fr.phi0 = cli::get<double>(f, "frame", "phi0");
  fr.nu = cli::get<double>(f, "frame", "nu");
  if (!(fr.a > 0.0) || !std::isfinite(fr.a)) throw ConfigError("frame.a", "must be a finite number > 0");
  return fr;
}

// library validation failures found before any compute are config errors
template <class F>
void validated(const Context& c, F&& f) {
  try {
    f();
  } catch (const sfocus::Error& e) {
    throw ConfigError(pre(c), e.what());
  }
}

void write_complex_csv(cli::Outputs& out, const std::string& name, const ComplexField1D& q) {
  out.csv(name, "x,re,im,abs", [&](std::ostream& os) {
    for (std::size_t j = 0; j < q.grid.n; ++j)
      os << q.grid.x(j) << ',' << q.values[j].real() << ',' << q.values[j].imag() << ',' << std::abs(q.values[j])
         << '\n';
  });
}

// ---------------------------------------------------------------------------

void run_selfsim(Context& c) {
  const double T0 = num(c, "T0"), T1 = num(c, "T1"), X0 = num(c, "X0"), X1 = num(c, "X1");
  const std::size_t nT = count(c, "nT"), nX = count(c, "nX");
  require(nT >= 5, c, "nT", "must be >= 5");
  require(nX >= 5, c, "nX", "must be >= 5");
  require(T1 > T0, c, "T1", "must exceed T0");
  require(X1 > X0, c, "X1", "must exceed X0");
  require((T0 - c.frame.T_f) * (T1 - c.frame.T_f) > 0.0, c, "T0", "rectangle must not contain frame.T_f");

  const auto s = sample_self_similar(c.frame, T0, T1, nT, X0, X1, nX);
  c.out->csv("selfsim.csv", "T,X,s,rho,v,Phi,inside_support", [&](std::ostream& os) {
    for (std::size_t i = 0; i < nT; ++i)
      for (std::size_t j = 0; j < nX; ++j) {
        const double T = T0 + static_cast<double>(i) * s.hT, X = X0 + static_cast<double>(j) * s.hX;
        const auto p = self_similar_eval(c.frame, T, X);
        os << T << ',' << X << ',' << p.s << ',' << p.rho << ',' << p.v << ',' << p.Phi << ',' << p.inside_support
           << '\n';
      }
  });
  const auto res = ngo_residual(s.rho, s.v, s.hT, s.hX);
  c.report["residual"] = {{"continuity", res.continuity}, {"momentum", res.momentum}, {"hT", s.hT}, {"hX", s.hX}};
}

void run_talanov(Context& c) {
  const double A = num(c, "A"), T0 = num(c, "T0"), Ts = num(c, "T_start"), Te = num(c, "T_end"), dt = num(c, "dt");
  const double eps = num(c, "epsilon"), half = num(c, "x_half");
  const std::size_t n = count(c, "n");
  require(Ts != T0, c, "T_start", "must differ from T0");
  require(Te > Ts, c, "T_end", "must exceed T_start");
  require(dt > 0.0, c, "dt", "must be > 0");
  require(eps > 0.0, c, "epsilon", "must be > 0");
  require(half > 0.0, c, "x_half", "must be > 0");
  require(pow2(n), c, "n", "must be a power of two >= 8");

  const auto init = talanov_exact_branch(A, T0, Ts, num(c, "delta"), num(c, "delta_dot"));
  const auto traj = talanov_integrate(init, Te, dt);
  c.out->csv("trajectory.csv", "T,g,g_dot,delta,delta_dot,half_width", [&](std::ostream& os) {
    for (const auto& st : traj) {
      const double w2 = st.support_half_width_sq();
      os << st.T << ',' << st.g << ',' << st.g_dot << ',' << st.delta << ',' << st.delta_dot << ','
         << (w2 > 0.0 ? std::sqrt(w2) : 0.0) << '\n';
    }
  });
  const Grid1D grid = Grid1D::symmetric(half, n);
  const auto X = grid.points();
  const auto tf = talanov_field(traj.back(), X);
  c.out->csv("field_end.csv", "X,rho,Phi", [&](std::ostream& os) {
    for (std::size_t j = 0; j < X.size(); ++j) os << X[j] << ',' << tf.rho[j] << ',' << tf.Phi[j] << '\n';
  });
  const auto G = wkb_assemble(tf.rho, tf.Phi, eps, grid);
  c.out->sfq1("wkb_end.sfq1", G.values);

  double worst = 0.0;
  for (const auto& st : traj) worst = std::max(worst, std::abs(st.g * (st.T - T0) / A - 1.0));
  c.report["steps"] = traj.size() - 1;
  c.report["max_rel_dev_from_branch"] = worst;
  c.report["end"] = {{"T", traj.back().T}, {"g", traj.back().g}, {"half_width", tf.half_width},
                     {"infinite_support", tf.infinite_support}};
}

void run_nls(Context& c) {
  const double eps = num(c, "epsilon"), half = num(c, "x_half"), dt = num(c, "dt"), t_end = num(c, "t_end");
  const std::size_t n = count(c, "n"), every = count(c, "snapshot_every");
  const json& ini = c.section.at("initial");
  require(eps > 0.0, c, "epsilon", "must be > 0");
  require(half > 0.0, c, "x_half", "must be > 0");
  require(pow2(n), c, "n", "must be a power of two >= 8");
  require(dt > 0.0, c, "dt", "must be > 0");
  require(every >= 1, c, "snapshot_every", "must be >= 1");
  if (ini.at("kind") != "soliton") throw ConfigError("nls.initial.kind", "only 'soliton' is available");
  const double eta = cli::get<double>(ini, "nls.initial", "eta");
  const double x0 = cli::get<double>(ini, "nls.initial", "x0");
  const double th = cli::get<double>(ini, "nls.initial", "theta0");
  if (!(eta > 0.0)) throw ConfigError("nls.initial.eta", "must be > 0");
  validated(c, [&] { step_count(0.0, t_end, dt); });

  StepperOptions opt;
  opt.filter = cli::get<bool>(c.section, "nls", "filter");
  const Grid1D grid = Grid1D::symmetric(half, n);
  EvolutionState st{soliton_field(eta, x0, th, grid).field, 0.0, eps};
  const auto r = evolve(st, t_end, dt, every, opt);

  c.out->csv("diagnostics.csv", "t,mass,momentum,energy", [&](std::ostream& os) {
    for (std::size_t k = 0; k < r.times.size(); ++k)
      os << r.times[k] << ',' << r.diagnostics[k].mass << ',' << r.diagnostics[k].momentum << ','
         << r.diagnostics[k].energy << '\n';
  });
  std::vector<std::string> names;
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "q_%05zu.sfq1", k);
    c.out->sfq1(name, r.trajectory[k].field.values);
    names.emplace_back(name);
  }
  c.out->csv("snapshots.csv", "index,t,file", [&](std::ostream& os) {
    for (std::size_t k = 0; k < names.size(); ++k) os << k << ',' << r.times[k] << ',' << names[k] << '\n';
  });
  c.out->csv("grid.csv", "x", [&](std::ostream& os) {
    for (std::size_t j = 0; j < grid.n; ++j) os << grid.x(j) << '\n';
  });
  write_complex_csv(*c.out, "final.csv", r.trajectory.back().field);

  const double m0 = r.diagnostics.front().mass;
  double drift = 0.0;
  for (const auto& d : r.diagnostics) drift = std::max(drift, std::abs(d.mass / m0 - 1.0));
  c.report["mass_drift"] = drift;
  c.report["snapshots"] = names.size();
  if (eps == 1.0) {
    const auto& end = r.trajectory.back();
    double err = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j)
      err = std::max(err, std::abs(end.field.values[j] - soliton_exact(eta, x0, th, end.t, grid.x(j))));
    c.report["max_error_vs_exact"] = err;
  }
}

void run_universal(Context& c) {
  LadderConfig lc;
  lc.frame = c.frame;
  lc.t0s = list(c, "t0s");
  lc.mollifier_width_factor = num(c, "mollifier_width_factor");
  lc.x_half = num(c, "x_half");
  lc.n = count(c, "n");
  lc.dt = num(c, "dt");
  lc.snapshot_interval = num(c, "snapshot_interval");
  lc.x_window = num(c, "x_window");
  lc.t_window = num(c, "t_window");
  require(pow2(lc.n), c, "n", "must be a power of two >= 8");
  validated(c, [&] { lc.validate(); });
  for (double t0 : lc.t0s) {
    MatchingConfig m;
    m.t0 = t0;
    m.mollifier_width_factor = lc.mollifier_width_factor;
    validated(c, [&] { m.validate(); });
    require(parabola_half_width(lc.frame, t0) < 0.5 * lc.x_half, c, "x_half", "too small for the widest t0");
    require(lc.dt <= candidate_dt_bound(lc.frame, t0), c, "dt", "exceeds the start-up bound for some t0");
    const double steps = std::abs(t0) / lc.dt;
    require(std::abs(steps - std::round(steps)) < 1e-9 && std::llround(steps) % static_cast<long long>(lc.sample_every()) == 0,
            c, "snapshot_interval", "|t0|/dt must be a multiple of snapshot_interval/dt");
  }
  c.conventions["mollifier"]["width"] = "mollifier_width_factor * |t0|^(2/9), inner units";

  const auto lad = run_ladder(lc, true);
  c.out->csv("rungs.csv",
             "t0,x_even_defect,r_even_defect,phase_odd_defect,phi0,odex_rms,qunt_rms,det_error,det_mean_re,det_mean_im,"
             "det_std,focal_amplitude,mass_drift",
             [&](std::ostream& os) {
               for (const auto& r : lad.rungs)
                 os << r.t0 << ',' << r.parity.x_even_defect << ',' << r.parity.r_even_defect << ','
                    << r.parity.phase_odd_defect << ',' << r.parity.phi0 << ',' << r.odex_rms << ',' << r.qunt_rms
                    << ',' << r.det_error << ',' << r.det_mean.real() << ',' << r.det_mean.imag() << ',' << r.det_std
                    << ',' << r.focal_amplitude << ',' << r.mass_drift << '\n';
             });
  for (std::size_t k = 0; k < lad.runs.size(); ++k) {
    const auto& run = lad.runs[k];
    const std::string tag = std::to_string(k);
    c.out->csv("origin_" + tag + ".csv", "t,re,im,abs", [&](std::ostream& os) {
      for (std::size_t j = 0; j < run.origin_times.size(); ++j)
        os << run.origin_times[j] << ',' << run.origin_series[j].real() << ',' << run.origin_series[j].imag() << ','
           << std::abs(run.origin_series[j]) << '\n';
    });
    write_complex_csv(*c.out, "focal_" + tag + ".csv", run.focal[1]);
    c.out->sfq1("focal_" + tag + ".sfq1", run.focal[1].values);
  }
  auto series = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : lad.rungs) v.push_back(get(r));
    return v;
  };
  json trends;
  auto trend = [&](const char* name, const std::vector<double>& v) {
    trends[name] = {{"values", v}, {"non_increasing", trend_non_increasing(v)}};
  };
  trend("x_even_defect", series([](const CandidateChecks& r) { return r.parity.x_even_defect; }));
  trend("r_even_defect", series([](const CandidateChecks& r) { return r.parity.r_even_defect; }));
  trend("phase_odd_defect", series([](const CandidateChecks& r) { return r.parity.phase_odd_defect; }));
  trend("odex_rms", series([](const CandidateChecks& r) { return r.odex_rms; }));
  trend("qunt_rms", series([](const CandidateChecks& r) { return r.qunt_rms; }));
  trend("det_error", series([](const CandidateChecks& r) { return r.det_error; }));
  const double target = lc.frame.focal_amplitude();
  trend("focal_amplitude_deviation",
        series([&](const CandidateChecks& r) { return std::abs(r.focal_amplitude - target); }));
  c.report["trends"] = trends;
  c.report["focal_amplitude_target"] = target;
  c.report["rungs_file_order"] = "origin_<k>/focal_<k> follow t0s order";
}

void run_painleve3(Context& c) {
  const double x_max = num(c, "x_max"), dy = num(c, "dy"), dx = num(c, "dx");
  const double e0 = num(c, "envelope_from"), e1 = num(c, "envelope_to");
  require(x_max > 0.0, c, "x_max", "must be > 0");
  require(dy > 0.0, c, "dy", "must be > 0");
  require(dx > 0.0 && dx < x_max, c, "dx", "must lie in (0, x_max)");
  require(e0 > 0.0 && e1 > e0, c, "envelope_from", "need 0 < envelope_from < envelope_to");
  require(e1 <= x_max, c, "envelope_to", "must not exceed x_max");

  const auto sol = p3_sine_solve(p3_y_for(c.frame, x_max) + 1.0, dy);
  std::vector<double> x;
  for (std::size_t k = 0;; ++k) {
    const double v = static_cast<double>(k) * dx;
    if (v > x_max + 1e-12) break;
    x.push_back(v);
  }
  const auto r = r0_profile(c.frame, sol, x);
  c.out->csv("profile.csv", "x,r0,r0_large_x", [&](std::ostream& os) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      os << x[j] << ',' << r[j] << ',';
      if (x[j] > 0.0) os << r0_asymptotic(c.frame, x[j]);
      os << '\n';
    }
  });
  c.out->csv("trajectory.csv", "y,w,w_y", [&](std::ostream& os) {
    for (std::size_t j = 0; j < sol.y().size(); j += 10) os << sol.y()[j] << ',' << sol.w()[j] << ',' << sol.wp()[j] << '\n';
  });
  const auto env = r0_envelope_comparison(c.frame, sol, e0, e1);
  const auto k = asymptotic_constants(c.frame);
  c.report["w_second_at_origin"] = sol.w_second_at_origin();
  c.report["constants"] = {{"h", k.h}, {"b", k.b}, {"c", k.c}};
  c.report["envelope"] = {{"from", e0},
                          {"to", e1},
                          {"max_rel_error", env.max_rel_envelope_error},
                          {"loglog_slope", env.loglog_slope},
                          {"max_phase_error", env.max_phase_error},
                          {"peaks", env.peak_x.size()}};
}

void run_painleve2(Context& c) {
  P2Options o;
  o.z_min = num(c, "z_min");
  o.z_max = num(c, "z_max");
  o.n_points = count(c, "n_points");
  o.sign_convention = cli::get<int>(c.section, "painleve2", "sign_convention");
  o.cubic_coefficient = num(c, "cubic_coefficient");
  if (!c.section.at("decay_seed").is_null()) o.decay_seed = num(c, "decay_seed");
  o.max_iterations = cli::get<int>(c.section, "painleve2", "max_iterations");
  o.tolerance = num(c, "tolerance");
  o.continuation_stages = cli::get<int>(c.section, "painleve2", "continuation_stages");
  const double threshold = num(c, "threshold");
  require(o.sign_convention == 1 || o.sign_convention == -1, c, "sign_convention", "must be +1 or -1");
  require(threshold > 0.0, c, "threshold", "must be > 0");
  validated(c, [&] { o.validate(); });
  c.conventions["pii_sign_convention"] = o.sign_convention;

  const auto s = p2_transition_solve(o);
  const auto inv = p2_invariants(s, threshold);
  c.out->csv("omega.csv", "z,re,im,abs", [&](std::ostream& os) {
    for (std::size_t j = 0; j < s.z.size(); ++j)
      os << s.z[j] << ',' << s.omega[j].real() << ',' << s.omega[j].imag() << ',' << std::abs(s.omega[j]) << '\n';
  });
  c.out->csv("log_derivative.csv", "z,re,im", [&](std::ostream& os) {
    for (std::size_t j = 0; j < inv.z.size(); ++j) os << inv.z[j] << ',' << inv.f[j].real() << ',' << inv.f[j].imag() << '\n';
  });
  c.report["residual_max"] = s.residual_max;
  c.report["iterations"] = s.iterations;
  c.report["growth_match"] = s.growth_match;
  c.report["wronskian"] = {inv.wronskian.real(), inv.wronskian.imag()};
  c.report["wronskian_deviation"] = inv.wronskian_deviation;
  c.report["kappa"] = {inv.kappa.real(), inv.kappa.imag()};
  c.report["f_residual"] = inv.f_residual;
  c.report["f_residual_printed_constant"] = inv.f_residual_printed;
}

void run_asympt(Context& c) {
  const double s0 = num(c, "s_min"), s1 = num(c, "s_max"), t = num(c, "t");
  const std::size_t n = count(c, "n");
  require(n >= 2, c, "n", "must be >= 2");
  require(s1 > s0, c, "s_max", "must exceed s_min");
  require(t != 0.0, c, "t", "must be nonzero");
  c.out->csv("scan.csv",
             "s,class,f1_re,f1_im,f2_re,f2_im,f3_re,f3_im,h2_plus,h2_minus,rate_plus,rate_minus,dip_re,dip_im",
             [&](std::ostream& os) {
               for (std::size_t k = 0; k < n; ++k) {
                 const double s = s0 + (s1 - s0) * static_cast<double>(k) / static_cast<double>(n - 1);
                 const auto cr = stationary_points(s, c.frame);
                 os << s << ',' << to_string(cr.classification);
                 for (const auto& f : cr.roots) os << ',' << f.real() << ',' << f.imag();
                 try {
                   const auto m = modulation_frequencies(s, c.frame);
                   os << ',' << m.h2_plus << ',' << m.h2_minus << ',' << m.rate_plus << ',' << m.rate_minus;
                 } catch (const ValidityError&) {
                   os << ",,,,";
                 }
                 try {
                   const auto d = dip_field(t, s, c.frame);
                   os << ',' << d.value.real() << ',' << d.value.imag();
                 } catch (const ValidityError&) {
                   os << ",,";
                 }
                 os << '\n';
               }
             });
  c.report["parabola_s"] = parabola_s(c.frame);
  c.report["dip_constants"] = "structural (beta = 1, gamma = alpha = 0)";
}

void run_sweep_eps(Context& c) {
  SweepConfig sc;
  sc.frame = c.frame;
  sc.T_start = num(c, "T_start");
  sc.T_end = num(c, "T_end");
  sc.epsilons = list(c, "epsilons");
  sc.mollifier_width_factor = num(c, "mollifier_width_factor");
  sc.inner_dx = num(c, "inner_dx");
  sc.inner_dt = num(c, "inner_dt");
  validated(c, [&] { sc.validate(); });
  c.conventions["mollifier"]["width"] = "eps^2 * mollifier_width_factor * |T_start/eps^3|^(2/9)";

  const auto r = run_sweep(sc);
  c.out->csv("sweep.csv",
             "epsilon,t0,n,X_half,dt,steps,peak,peak_scaled,T_peak,X_peak,x_width,t_width,mass_drift,"
             "predicted_peak,predicted_x_width,predicted_t_width",
             [&](std::ostream& os) {
               for (const auto& l : r.levels) {
                 const auto p = focus_scaling_predict(sc.frame, l.epsilon);
                 os << l.epsilon << ',' << l.t0 << ',' << l.n << ',' << l.X_half << ',' << l.dt << ',' << l.steps << ','
                    << l.peak << ',' << l.peak_scaled << ',' << l.T_peak << ',' << l.X_peak << ',' << l.x_width << ','
                    << l.t_width << ',' << l.mass_drift << ',' << p.peak_amplitude << ',' << p.x_width << ','
                    << p.t_width << '\n';
               }
             });
  c.report["peak_scaled_spread"] = r.peak_scaled_spread;
  c.report["x_width_ratios"] = r.width_ratios;
}

using Runner = void (*)(Context&);

Runner runner(const std::string& e) {
  if (e == "selfsim") return run_selfsim;
  if (e == "talanov") return run_talanov;
  if (e == "nls") return run_nls;
  if (e == "universal") return run_universal;
  if (e == "painleve3") return run_painleve3;
  if (e == "painleve2") return run_painleve2;
  if (e == "asympt") return run_asympt;
  if (e == "sweep-eps") return run_sweep_eps;
  throw ConfigError("experiment", "unknown experiment '" + e + "'");
}

json base_conventions() {
  return {{"cube_root_branch", "real cube root, negative for negative arguments"},
          {"mollifier",
           {{"kind", "C-infinity bump, unit mass, convolved with the intensity"},
            {"width", "mollifier_width_factor * |t0|^(2/9)"}}},
          {"pii_sign_convention", 1},
          {"dip_prefactor", "|t|^(-1/2)"},
          {"time_origin", "inner and relative times are measured from frame.T_f"},
          {"sfq1", "'SFQ1', u64 n, then n little-endian (f64 re, f64 im)"}};
}

json build_info() {
  return {{"tool", "sfocus"}, {"version", kVersion}, {"compiler", __VERSION__}, {"cxx", __cplusplus},
          {"fftw", std::string(fftw_version)}};
}

int cmd_run(const std::string& experiment, const std::string& file, const std::vector<std::string>& sets,
            std::string outdir) {
  Context c;
  c.experiment = experiment;
  c.cfg = cli::resolve(experiment, file, sets);
  c.section = c.cfg.at(experiment);
  c.frame = read_frame(c.cfg.at("frame"));
  c.conventions = base_conventions();
  if (outdir.empty()) outdir = "out/" + experiment;
  std::unique_ptr<cli::Outputs> out;
  try {
    out = std::make_unique<cli::Outputs>(outdir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw ConfigError("out", e.what());
  }
  c.out = out.get();

  const auto t0 = std::chrono::steady_clock::now();
  json manifest = {{"experiment", experiment}, {"config", c.cfg}, {"build", build_info()}};
  int status = 0;
  std::string error;
  try {
    runner(experiment)(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const sfocus::Error& e) {
    status = 1;
    error = e.what();
  }
  if (status == 0) out->json_file("report.json", c.report);
  manifest["conventions"] = c.conventions;
  manifest["exploratory"] = c.frame.exploratory();
  manifest["status"] = status == 0 ? "ok" : "numerical_failure";
  if (!error.empty()) manifest["error"] = error;
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["files"] = out->file_table();
  std::ofstream(out->dir() / "manifest.json") << manifest.dump(2) << '\n';

  if (status != 0) {
    std::cerr << "numerical failure: " << error << '\n';
    return 1;
  }
  std::cout << c.report.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& outdir) {
  namespace acc = sfocus::acceptance;
  const auto chosen = acc::select(suite);
  if (chosen.empty()) {
    std::string known;
    for (const auto& s : acc::selectors()) known += " " + s;
    throw ConfigError("suite", "unknown suite '" + suite + "'; known:" + known);
  }
  json verdict = {{"suite", suite}, {"build", build_info()}, {"criteria", json::array()}};
  bool ok = true;
  double total = 0.0;
  for (const auto* crit : chosen) {
    const auto r = acc::run(*crit);
    std::cerr << "criterion " << r.id << ' ' << (r.passed() ? "PASS" : "FAIL") << "  " << r.title << '\n';
    json checks = json::array();
    for (const auto& m : r.checks)
      checks.push_back({{"name", m.name},
                        {"value", m.value},
                        {"target", m.target},
                        {"tolerance", m.tolerance},
                        {"relation", m.relation},
                        {"pass", m.pass}});
    json entry = {{"id", r.id},       {"key", crit->key},   {"title", r.title},
                  {"pass", r.passed()}, {"seconds", r.seconds}, {"checks", checks}};
    if (!r.error.empty()) entry["error"] = r.error;
    verdict["criteria"].push_back(entry);
    ok = ok && r.passed();
    total += r.seconds;
  }
  verdict["pass"] = ok;
  verdict["seconds"] = total;
  std::cout << verdict.dump(2) << '\n';
  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    std::ofstream(std::filesystem::path(outdir) / "verify.json") << verdict.dump(2) << '\n';
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfocus: semiclassical focusing experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string experiment, file, outdir, suite = "all", schema_for;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment, "experiment name")->required();
  run->add_option("-c,--config", file, "JSON config file");
  run->add_option("-o,--out", outdir, "output directory (default out/<experiment>)");
  run->add_option("-s,--set", sets, "override, e.g. frame.a=0.7");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite or a subset");
  verify->add_option("suite", suite, "all, a suite, a criterion key or number");
  verify->add_option("-o,--out", outdir, "also write verify.json here");
  auto* schema = app.add_subcommand("schema", "print the defaults of an experiment");
  schema->add_option("experiment", schema_for, "experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(experiment, file, sets, outdir);
    if (*verify) return cmd_verify(suite, outdir);
    std::cout << cli::defaults(schema_for).dump(2) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const sfocus::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  }
}
