#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <sfocus/painleve.hpp>
#include <sfocus/universal.hpp>

using namespace sfocus;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
MatchingConfig at(double t0, double cm = 3.0) {
  MatchingConfig c;
  c.t0 = t0;
  c.mollifier_width_factor = cm;
  return c;
}

double mass(const ComplexField1D& q) {
  double m = 0.0;
  for (auto z : q.values) m += std::norm(z);
  return m * q.grid.dx();
}

const CandidateRun& small_run() {
  static const CandidateRun r = construct_candidate(FocusFrame{}, at(-4.0), Grid1D::symmetric(32.0, 512), 0.01, 25);
  return r;
}
} // namespace

TEST_CASE("matched data at the centre and edge") {
  FocusFrame f;
  const Grid1D g = Grid1D::symmetric(128.0, 4096);
  // mollifier narrower than one cell: the bare profile
  auto q = inner_initial_data(f, at(-64.0, 1e-6), g);
  const std::size_t o = g.origin_index();
  CHECK_THAT(std::abs(q.values[o]), WithinRel(0.125, 1e-14));
  // φ(0) = t0^{1/3}·3a = −6
  CHECK_THAT(std::remainder(std::arg(q.values[o]) + 6.0, 2.0 * std::numbers::pi), WithinAbs(0.0, 1e-13));
  const double edge = parabola_half_width(f, -64.0);
  CHECK_THAT(edge, WithinRel(48.0, 1e-14));
  for (std::size_t j = 0; j < g.n; ++j)
    if (std::abs(g.x(j)) >= edge) CHECK(q.values[j] == cplx(0.0));
  // approaching the edge r → 0 continuously
  const std::size_t je = o + static_cast<std::size_t>(std::floor(edge / g.dx()));
  CHECK(std::abs(q.values[je]) < 0.01);

  auto qm = inner_initial_data(f, at(-64.0), g);
  // the bump averages the quadratic over a width 3·64^{2/9} ≈ 7.5
  CHECK_THAT(std::abs(qm.values[o]), WithinRel(0.125, 1e-3));
}

TEST_CASE("matched data mass does not depend on t0") {
  FocusFrame f;
  CHECK_THAT(inner_data_mass(f), WithinRel(1.0, 1e-15));
  for (double t0 : {-16.0, -32.0, -64.0}) {
    auto q = inner_initial_data(f, at(t0), Grid1D::symmetric(128.0, 4096));
    CHECK_THAT(mass(q), WithinRel(1.0, 1e-3));
  }
  FocusFrame f2;
  f2.a = 1.3;
  auto q = inner_initial_data(f2, at(-16.0), Grid1D::symmetric(256.0, 8192));
  CHECK_THAT(mass(q), WithinRel(inner_data_mass(f2), 1e-3));
}

TEST_CASE("matched data preconditions") {
  FocusFrame f;
  CHECK_THROWS_AS(inner_initial_data(f, at(-64.0), Grid1D::symmetric(64.0, 1024)), DomainError);
  CHECK_THROWS_AS(inner_initial_data(f, at(4.0), Grid1D::symmetric(64.0, 1024)), DomainError);
  CHECK_THROWS_AS(inner_initial_data(f, at(-4.0, 0.0), Grid1D::symmetric(64.0, 1024)), DomainError);
  FocusFrame bad;
  bad.a = 0.0;
  CHECK_THROWS_AS(inner_initial_data(bad, at(-4.0), Grid1D::symmetric(64.0, 1024)), DomainError);
  auto c = at(-4.0);
  c.include_dip_tail = true;
  CHECK_THROWS_AS(inner_initial_data(f, c, Grid1D::symmetric(64.0, 1024)), DomainError);
}

TEST_CASE("dip tail only changes the outside") {
  FocusFrame f;
  const Grid1D g = Grid1D::symmetric(64.0, 2048);
  auto c = at(-8.0);
  auto plain = inner_initial_data(f, c, g);
  c.include_dip_tail = true;
  c.dip_constants = DipConstants{};
  auto tail = inner_initial_data(f, c, g);
  const double edge = parabola_half_width(f, -8.0);
  double outside = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    if (std::abs(g.x(j)) <= edge) CHECK(tail.values[j] == plain.values[j]);
    else outside = std::max(outside, std::abs(tail.values[j] - plain.values[j]));
  }
  CHECK(outside > 0.1 / std::sqrt(8.0));
}

TEST_CASE("candidate run layout") {
  const auto& r = small_run();
  CHECK(r.times.size() == 33);
  CHECK(r.times[r.zero_index()] == 0.0);
  for (std::size_t k = 0; k < r.times.size(); ++k) CHECK(r.times[k] == -r.times[r.times.size() - 1 - k]);
  CHECK(r.origin_times.size() == 801);
  CHECK(r.focal[1].values == r.snapshots[r.zero_index()].values);
  CHECK(r.mass_drift <= 1e-10);
  CHECK(parity_report(r).x_even_defect < 1e-12);
}

TEST_CASE("candidate preconditions") {
  FocusFrame f;
  const Grid1D g = Grid1D::symmetric(32.0, 512);
  CHECK_THROWS_AS(construct_candidate(f, at(-4.0), g, 0.05, 1), DomainError);
  CHECK_THROWS_AS(construct_candidate(f, at(-4.0), g, 0.01, 3), StructureError);
  CHECK_THROWS_AS(construct_candidate(f, at(-4.0), Grid1D{-30.0, 34.0, 512}, 0.01, 25), StructureError);
}

TEST_CASE("focal q_t from neighbouring steps converges to the equation") {
  auto err = [](const CandidateRun& r) {
    auto j = candidate_focal_jets(r);
    auto je = j;
    time_derivative_from_equation(je);
    double e = 0.0;
    for (std::size_t k = 0; k < j.size(); ++k) e = std::max(e, std::abs(j.q_t[k] - je.q_t[k]));
    return e;
  };
  const double e1 = err(small_run());
  const double e2 = err(construct_candidate(FocusFrame{}, at(-4.0), Grid1D::symmetric(32.0, 512), 0.005, 50));
  CHECK(e1 < 5e-3);
  CHECK(e1 / e2 > 2.0);
}

TEST_CASE("parity of an exactly even field") {
  const Grid1D g = Grid1D::symmetric(8.0, 256);
  std::vector<ComplexField1D> snaps;
  std::vector<double> times;
  for (int k = -3; k <= 3; ++k) {
    const double t = 0.5 * k;
    ComplexField1D q(g);
    for (std::size_t j = 0; j < g.n; ++j) q.values[j] = std::exp(-g.x(j) * g.x(j)) * std::polar(1.0 + t * t, 0.3);
    snaps.push_back(q);
    times.push_back(t);
  }
  auto p = parity_report(snaps, times);
  CHECK(p.x_even_defect == 0.0);
  CHECK(p.r_even_defect == 0.0);
  CHECK(p.phase_odd_defect < 1e-15);
  CHECK_THAT(p.phi0, WithinAbs(0.3, 1e-15));

  // planted odd defect
  double planted = 0.0;
  for (auto& q : snaps)
    for (std::size_t j = 0; j < g.n; ++j) q.values[j] += 1e-3 * g.x(j) * std::exp(-g.x(j) * g.x(j));
  for (std::size_t j = 0; j < g.n; ++j)
    planted = std::max(planted, 2e-3 * std::abs(g.x(j)) * std::exp(-g.x(j) * g.x(j)));
  CHECK_THAT(parity_report(snaps, times).x_even_defect, WithinRel(planted, 1e-10));

  times.back() += 0.1;
  CHECK_THROWS_AS(parity_report(snaps, times), StructureError);
}

TEST_CASE("odex residual") {
  FocusFrame f;
  ComplexField1D zero(Grid1D::symmetric(10.0, 128));
  auto z = odex_residual(zero, 0.0, f);
  CHECK(z.counted == 0);
  for (auto r : z.residual) CHECK(r == cplx(0.0));

  // the t = 0 PIII profile solves the x-ODE
  f.phi0 = 0.3;
  const auto sol = p3_sine_solve(p3_y_for(f, 60.0) + 1.0, 1e-3);
  std::vector<double> x;
  for (int k = -1200; k <= 1200; ++k) x.push_back(0.05 * k);
  auto j = r0_slice_jets(f, sol, x);
  auto r = odex_residual(j, f);
  CHECK(r.counted > 2000);
  CHECK(r.max_abs <= 1e-6);
  // the factor-2 nonlocal term does not
  CHECK(odex_residual(j, f, 2.0).max_abs > 1e-2);
}

TEST_CASE("qunt residual") {
  std::vector<double> t;
  for (int k = -10; k <= 10; ++k) t.push_back(0.1 * k);
  auto z = qunt_residual(std::vector<cplx>(t.size()), t);
  CHECK(z.max_abs == 0.0);
  CHECK(z.times.size() == t.size() - 4);

  FocusFrame f;
  auto s = oracle::qunt_solve(std::polar(f.focal_amplitude(), 0.2), 0.01, 200);
  CHECK(qunt_residual(s.q, s.t).max_abs < 1e-7);
  // q_t(0) = (2i/3)|q|²q = (i/12)e^{iφ0} for a = ½
  CHECK(std::abs(s.q_t[200] - cplx(0, 1.0 / 12.0) * std::polar(1.0, 0.2)) < 1e-15);

  CHECK_THROWS_AS(qunt_residual(std::vector<cplx>(6), std::vector<double>(6)), StructureError);
  t[3] += 0.01;
  CHECK_THROWS_AS(qunt_residual(std::vector<cplx>(t.size()), t), StructureError);
}

TEST_CASE("xi extraction") {
  FocusFrame f;
  std::vector<double> t;
  std::vector<cplx> q;
  const double R = 0.7;
  for (int k = -20; k <= 20; ++k) {
    t.push_back(0.05 * k);
    q.push_back(std::polar(R, 1.1));
  }
  auto xi = xi_extract(q, t, f);
  CHECK(xi.times.size() == t.size() - 4);
  for (std::size_t k = 0; k < xi.times.size(); ++k)
    CHECK(std::abs(xi.xi[k] - cplx(0.0, 4.0 * R * R * xi.times[k] / 0.125)) < 1e-12);
  CHECK(xi.xi[xi.times.size() / 2] == cplx(0.0));

  q[7] = 0.0;
  CHECK_THROWS_AS(xi_extract(q, t, f), DomainError);
}

TEST_CASE("xi extracted from the exact t-reduction converges to the PIII form") {
  FocusFrame f;
  std::vector<double> res;
  for (double h : {0.02, 0.01}) {
    auto s = oracle::qunt_solve(std::polar(f.focal_amplitude(), 0.2), h, static_cast<int>(1.5 / h));
    auto xi = xi_extract(s.q, s.t, f);
    res.push_back(p3_xi_residual(xi.xi, xi.times, f).rms);
  }
  CHECK(res[1] < 1e-3);
  CHECK(res[0] / res[1] > 3.0);
}

TEST_CASE("checks on a short candidate run") {
  auto c = check_candidate(small_run(), 8.0, 1.0);
  CHECK(c.t0 == -4.0);
  CHECK(std::isfinite(c.odex_rms));
  CHECK(std::isfinite(c.qunt_rms));
  CHECK(c.det_error >= 0.0);
  CHECK(c.focal_amplitude > 0.0);
}
