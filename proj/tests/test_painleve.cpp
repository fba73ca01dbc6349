#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <sfocus/painleve.hpp>

using namespace sfocus;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
FocusFrame half() { return FocusFrame{}; }
const P3Solution& shared_solution() {
  static const P3Solution s = p3_sine_solve(p3_y_for(half(), 120.0) + 1.0, 1e-3);
  return s;
}
} // namespace

TEST_CASE("sine-PIII series matches the hand-derived coefficients") {
  P3Series s(20);
  CHECK(s.u[0] == 0.0);
  CHECK_THAT(s.u[1], WithinRel(0.25, 1e-15));
  CHECK_THAT(s.u[2], WithinAbs(0.0, 1e-18));
  CHECK_THAT(s.u[3], WithinRel(-1.0 / 1152.0, 1e-14));
  CHECK_THAT(s.u[4], WithinAbs(0.0, 1e-18));
  CHECK_THAT(s.u[5], WithinRel(7.0 / 1843200.0, 1e-13));
  CHECK_THAT(s.u[7], WithinRel(-521.0 / 26011238400.0, 1e-12));
  for (std::size_t n = 2; n < s.u.size(); n += 2) CHECK(s.u[n] == 0.0);
}

TEST_CASE("sine-PIII launch values") {
  const auto& s = shared_solution();
  CHECK(s.w()[0] == -0.5 * std::numbers::pi);
  CHECK(s.wp()[0] == 0.0);
  CHECK_THAT(s.w_second_at_origin(), WithinAbs(0.5, 1e-8));
}

TEST_CASE("sine-PIII step refinement converges at fourth order") {
  auto w10 = [](double dy) { return p3_sine_solve(12.0, dy).at(10.0).w; };
  const double e1 = std::abs(w10(0.04) - w10(0.02)), e2 = std::abs(w10(0.02) - w10(0.01));
  CHECK(std::abs(std::log2(e1 / e2) - 4.0) < 0.3);
}

TEST_CASE("integrated trajectory agrees with the series where both apply") {
  const auto& s = shared_solution();
  const P3Series& ser = s.series();
  for (double y : {0.8, 0.9, 1.0}) {
    const double Z = y * y;
    CHECK_THAT(s.at(y).w, WithinAbs(ser.w(Z), 1e-12));
    const auto J = s.jet(Z);
    CHECK_THAT(J.P_Z, WithinAbs(P3Series::eval(ser.P, Z, 1), 1e-10));
    CHECK_THAT(J.P_ZZ, WithinAbs(P3Series::eval(ser.P, Z, 2), 1e-10));
    CHECK_THAT(J.P_ZZZ, WithinAbs(P3Series::eval(ser.P, Z, 3), 1e-9));
    CHECK_THAT(J.I, WithinAbs(P3Series::eval(ser.I, Z), 1e-12));
  }
}

TEST_CASE("t = 0 profile near the focus") {
  const auto& s = shared_solution();
  std::vector<double> x{0.0, 1e-3, -1e-3, 2.5, -2.5};
  auto r = r0_profile(half(), s, x);
  CHECK_THAT(r[0], WithinAbs(0.5, 1e-15));
  CHECK(r[1] == r[2]);
  CHECK(r[3] == r[4]);
  // r = r0 − (2/3)r0³x² + … with r0 = 1/2 from the series above
  CHECK_THAT((r[1] - r[0]) / 1e-6, WithinRel(-1.0 / 12.0, 1e-4));
  std::vector<double> far{1e6};
  CHECK_THROWS_AS(r0_profile(half(), s, far), DomainError);
}

TEST_CASE("arg Gamma series against reference values") {
  CHECK_THAT(arg_gamma_1_plus_iy(0.05), WithinAbs(oracle::arg_gamma_1_plus_i_0_05, 1e-15));
  CHECK_THAT(arg_gamma_1_plus_iy(0.5), WithinAbs(oracle::arg_gamma_1_plus_i_0_5, 1e-14));
  CHECK_THAT(arg_gamma_1_plus_iy(0.9), WithinAbs(oracle::arg_gamma_1_plus_i_0_9, 1e-13));
  CHECK_THROWS_AS(arg_gamma_1_plus_iy(1.0), DomainError);
}

TEST_CASE("large-x constants") {
  auto k = asymptotic_constants(half());
  CHECK_THAT(k.h, WithinRel(oracle::h_half, 1e-14));
  CHECK_THAT(k.b, WithinRel(oracle::b_any, 1e-14));
  CHECK_THAT(k.c, WithinRel(oracle::c_half, 1e-14));
  FocusFrame f13;
  f13.a = 1.3;
  auto k2 = asymptotic_constants(f13);
  CHECK_THAT(k2.h, WithinRel(oracle::h_1_3, 1e-14));
  CHECK_THAT(k2.c, WithinRel(oracle::c_1_3, 1e-14));
  CHECK_THROWS_AS(r0_asymptotic(half(), 0.0), DomainError);
  CHECK(std::abs(r0_asymptotic(half(), 50.0)) <= k.h * std::pow(50.0, -0.75));
}

TEST_CASE("integrated profile follows the large-x envelope") {
  auto e = r0_envelope_comparison(half(), shared_solution(), 20.0, 100.0);
  CHECK(e.peak_x.size() >= 3);
  CHECK(e.max_rel_envelope_error <= 0.05);
  CHECK(std::abs(e.loglog_slope + 0.75) <= 0.02);
}

TEST_CASE("xi residual: manufactured solution") {
  // ξ̂ = 1 + t² + it has an exact residual R(t) = ξ̂'' − rhs(ξ̂, ξ̂')
  FocusFrame f = half();
  const double h = 0.01;
  std::vector<double> t;
  std::vector<cplx> xi;
  for (int k = -300; k <= 300; ++k) {
    t.push_back(k * h);
    xi.push_back(cplx(1.0 + t.back() * t.back(), t.back()));
  }
  auto res = p3_xi_residual(xi, t, f);
  REQUIRE(!res.residual.empty());
  double err = 0.0;
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const double tt = res.times[i];
    const cplx exact = 2.0 - xi_rhs(f.a, tt, cplx(1.0 + tt * tt, tt), cplx(2.0 * tt, 1.0));
    err = std::max(err, std::abs(res.residual[i] - exact));
    CHECK(std::abs(tt) >= 0.1);
  }
  CHECK(err < 1e-9);
  CHECK(res.pairs.size() == res.times.size() / 2);
}

TEST_CASE("xi residual vanishes on the exact t-reduction") {
  // ξ built from the regular solution of the t-ODE through q(0) = (2a³)^{1/2}e^{iφ0}
  // larger a oscillates faster; the residual stencil is fourth order in the spacing
  for (auto [a, h] : {std::pair{0.5, 0.01}, std::pair{1.3, 0.0025}}) {
    FocusFrame f;
    f.a = a;
    const auto s = oracle::qunt_solve(std::polar(f.focal_amplitude(), 0.4), h, static_cast<int>(1.5 / h));
    const auto xi = oracle::xi_from(s, a);
    auto res = p3_xi_residual(xi, s.t, f);
    CHECK(res.max_abs < 1e-5);
    for (const auto& p : res.pairs) CHECK(std::abs(p.at_plus) < 1e-5);
  }
}

TEST_CASE("xi residual guards") {
  std::vector<double> t{-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<cplx> zero(9, 0.0);
  CHECK_THROWS_AS(p3_xi_residual(zero, t, half()), DomainError);
  CHECK_THROWS_AS(p3_xi_residual(std::vector<cplx>(4), std::vector<double>(4), half()), StructureError);
}

TEST_CASE("transition layer: real branch") {
  P2Options o;
  auto s = p2_transition_solve(o);
  CHECK(s.residual_max <= 1e-8);
  CHECK(s.growth_match <= 0.02);
  auto inv = p2_invariants(s);
  CHECK(inv.wronskian_deviation <= 1e-10);
  CHECK(inv.kappa == cplx(-1.0, 0.0));
  CHECK(inv.f_residual <= 1e-6);
  // the ODE as printed with c = 2 produces the constant 2W − 1 = −1 as well
  CHECK(inv.f_residual_printed <= 1e-6);
  // at the growth end |ω| ≈ √(−z/2)
  CHECK_THAT(std::abs(s.omega.front()) / std::sqrt(12.0 / 2.0), WithinAbs(1.0, 0.02));
}

TEST_CASE("transition layer: mirrored sign convention") {
  P2Options o;
  o.n_points = 4001;
  auto a = p2_transition_solve(o);
  o.sign_convention = -1;
  auto b = p2_transition_solve(o);
  for (std::size_t i = 0; i < a.z.size(); i += 97)
    CHECK_THAT(a.omega[i].real(), WithinAbs(b.omega[a.z.size() - 1 - i].real(), 1e-10));
}

TEST_CASE("transition layer: fixed decay seed") {
  P2Options o;
  o.n_points = 4001;
  o.decay_seed = 0.0;
  auto s = p2_transition_solve(o);
  CHECK(s.residual_max <= 1e-8);
  CHECK(s.omega.back().real() == 0.0);
}

TEST_CASE("transition layer: complex branch keeps its Wronskian") {
  P2Options o;
  auto s = p2_transition_march(o, 0.3);
  auto inv = p2_invariants(s);
  CHECK(s.residual_max <= 1e-8);
  CHECK(inv.wronskian_deviation <= 1e-9);
  CHECK_THAT(inv.wronskian.imag(), WithinAbs(0.6, 1e-6));
  CHECK(inv.f_residual <= 1e-5);
}

TEST_CASE("transition layer: option validation") {
  P2Options o;
  o.n_points = 100;
  CHECK_THROWS_AS(p2_transition_solve(o), DomainError);
  o = {};
  o.z_min = 1.0;
  CHECK_THROWS_AS(p2_transition_solve(o), DomainError);
  o = {};
  o.sign_convention = 0;
  CHECK_THROWS_AS(p2_transition_solve(o), DomainError);
}
