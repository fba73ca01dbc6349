#include <catch_amalgamated.hpp>

#include <sfocus/nls.hpp>

#include <numbers>

using namespace sfocus;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
Grid1D soliton_grid() { return Grid1D::symmetric(40.0, 4096); }

double max_error_vs_soliton(const EvolutionState& s) {
  double e = 0.0;
  for (std::size_t j = 0; j < s.field.size(); ++j)
    e = std::max(e, std::abs(s.field.values[j] - soliton_exact(1.0, 0.0, 0.0, s.t, s.field.grid.x(j))));
  return e;
}
} // namespace

TEST_CASE("soliton fixture") {
  auto s = soliton_field(1.0, 0.0, 0.0, soliton_grid());
  CHECK_FALSE(s.boundary_warning);
  CHECK_THAT(s.field.values[s.field.grid.origin_index()].real(), WithinAbs(1.0, 1e-15));
  auto d = conserved_diagnostics(s.field, 1.0);
  CHECK_THAT(d.mass, WithinAbs(2.0, 1e-12));
  CHECK_THAT(d.energy, WithinAbs(-2.0 / 3.0, 1e-10));
  CHECK_THAT(d.momentum, WithinAbs(0.0, 1e-14));

  auto s2 = soliton_field(2.0, 0.0, 0.0, soliton_grid());
  CHECK_THAT(conserved_diagnostics(s2.field, 1.0).mass, WithinAbs(4.0, 1e-12));

  auto narrow = soliton_field(1.0, 0.0, 0.0, Grid1D::symmetric(5.0, 256));
  CHECK(narrow.boundary_warning);
}

TEST_CASE("diagnostics of simple fields") {
  auto g = Grid1D::symmetric(std::numbers::pi, 64);
  auto z = conserved_diagnostics(ComplexField1D(g), 1.0);
  CHECK(z.mass == 0.0);
  CHECK(z.momentum == 0.0);
  CHECK(z.energy == 0.0);

  ComplexField1D pw(g);
  const cplx c(0.6, -0.3);
  for (std::size_t j = 0; j < g.n; ++j) pw.values[j] = c * std::exp(cplx(0, 3.0 * g.x(j)));
  auto d = conserved_diagnostics(pw, 1.0);
  const double L = g.length();
  CHECK_THAT(d.mass, WithinRel(std::norm(c) * L, 1e-13));
  CHECK_THAT(d.momentum, WithinRel(3.0 * std::norm(c) * L, 1e-12));
}

TEST_CASE("plane waves are advanced exactly") {
  auto g = Grid1D::symmetric(std::numbers::pi, 64);
  const cplx c(0.8, 0.2);
  const double kappa = 5.0, dt = 0.013;
  EvolutionState s{ComplexField1D(g), 0.0, 1.0};
  for (std::size_t j = 0; j < g.n; ++j) s.field.values[j] = c * std::exp(cplx(0, kappa * g.x(j)));
  auto out = strang_step(s, dt);
  const cplx rot = std::exp(cplx(0, (2 * std::norm(c) - kappa * kappa) * dt));
  double err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(out.field.values[j] - rot * s.field.values[j]));
  CHECK(err < 1e-12);
  CHECK(out.t == dt);

  EvolutionState zero{ComplexField1D(g), 0.0, 0.3};
  auto zo = strang_step(zero, 0.1);
  for (auto v : zo.field.values) CHECK(v == cplx{});
  CHECK_THROWS_AS(strang_step(zero, 0.0), DomainError);
}

TEST_CASE("soliton run: accuracy, mass drift, reversibility") {
  EvolutionState s0{soliton_field(1.0, 0.0, 0.0, soliton_grid()).field, 0.0, 1.0};
  StrangStepper stepper(s0.field.grid, 1.0);
  auto fwd = evolve(stepper, s0, 1.0, 1e-3, 100);
  const auto& end = fwd.trajectory.back();
  CHECK(end.t == 1.0);
  CHECK(max_error_vs_soliton(end) <= 1e-6);
  CHECK(std::abs(end.field.values[2048] - std::exp(cplx(0, 1.0))) < 1e-6);
  const double m0 = fwd.diagnostics.front().mass;
  for (const auto& d : fwd.diagnostics) CHECK(std::abs(d.mass - m0) / m0 <= 1e-10);
  CHECK(std::abs(fwd.diagnostics.back().energy - fwd.diagnostics.front().energy) / (2.0 / 3.0) <= 1e-6);

  auto back = evolve(stepper, end, 0.0, -1e-3, 1000);
  double err = 0.0;
  for (std::size_t j = 0; j < s0.field.size(); ++j)
    err = std::max(err, std::abs(back.trajectory.back().field.values[j] - s0.field.values[j]));
  CHECK(err <= 1e-8);
}

TEST_CASE("second-order convergence in dt") {
  auto g = Grid1D::symmetric(40.0, 1024);
  auto run = [&](double dt) {
    EvolutionState s{soliton_field(1.0, 0.0, 0.0, g).field, 0.0, 1.0};
    return max_error_vs_soliton(evolve(s, 1.0, dt, 1u << 30).trajectory.back());
  };
  const double slope = std::log2(run(0.02) / run(0.01));
  CHECK(std::abs(slope - 2.0) < 0.2);
}

TEST_CASE("gauge and parity covariance") {
  auto g = Grid1D::symmetric(20.0, 512);
  EvolutionState s{ComplexField1D(g), 0.0, 1.0};
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    s.field.values[j] = cplx(1.2 * std::exp(-x * x), 0.3 * x * x * std::exp(-x * x));
  }
  const cplx gauge = std::polar(1.0, 0.77);
  EvolutionState rotated = s;
  for (auto& v : rotated.field.values) v *= gauge;
  auto a = evolve(s, 0.5, 1e-3, 1000).trajectory.back();
  auto b = evolve(rotated, 0.5, 1e-3, 1000).trajectory.back();
  double gauge_err = 0.0, parity_err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    gauge_err = std::max(gauge_err, std::abs(b.field.values[j] - gauge * a.field.values[j]));
    parity_err = std::max(parity_err, std::abs(a.field.values[j] - a.field.values[g.mirror(j)]));
  }
  CHECK(gauge_err <= 1e-12);
  CHECK(parity_err <= 1e-10);
}

TEST_CASE("evolve bookkeeping") {
  auto g = Grid1D::symmetric(5.0, 64);
  EvolutionState s{ComplexField1D(g), 0.0, 1.0};
  CHECK_THROWS_AS(evolve(s, 1.0, 0.3, 1), StructureError);
  CHECK_THROWS_AS(evolve(s, -1.0, 0.25, 1), StructureError);
  auto r = evolve(s, 1.0, 0.25, 2);
  REQUIRE(r.times.size() == 3);
  CHECK(r.times[1] == 0.5);
  for (const auto& d : r.diagnostics) CHECK(d.mass == 0.0);
  std::size_t calls = 0;
  evolve(s, 1.0, 0.25, 4, {}, [&](const EvolutionState&, std::size_t) { ++calls; });
  CHECK(calls == 4);
}

TEST_CASE("blow-up guard fires on non-finite data") {
  auto g = Grid1D::symmetric(5.0, 64);
  EvolutionState s{ComplexField1D(g), 0.25, 1.0};
  s.field.values[3] = cplx(NAN, 0.0);
  try {
    strang_step(s, 0.1);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time() == 0.25);
  }
}

TEST_CASE("semiclassical scaling is an exact symmetry of the solver") {
  // G(T,X) = q(T/ε³, X/ε²)/ε maps inner solutions to outer ones
  const double eps = 0.5;
  auto gi = Grid1D::symmetric(16.0, 256);
  auto go = Grid1D::symmetric(16.0 * eps * eps, 256);
  EvolutionState inner{ComplexField1D(gi), 0.0, 1.0}, outer{ComplexField1D(go), 0.0, eps};
  for (std::size_t j = 0; j < 256; ++j) {
    const double x = gi.x(j);
    inner.field.values[j] = std::exp(-x * x / 4) * std::exp(cplx(0, 0.2 * x * x));
    outer.field.values[j] = inner.field.values[j] / eps;
  }
  auto qi = evolve(inner, 1.0, 0.01, 1000).trajectory.back();
  auto qo = evolve(outer, std::pow(eps, 3), 0.01 * std::pow(eps, 3), 1000).trajectory.back();
  double err = 0.0;
  for (std::size_t j = 0; j < 256; ++j) err = std::max(err, std::abs(qo.field.values[j] - qi.field.values[j] / eps));
  CHECK(err < 1e-10);
}

TEST_CASE("optional filter leaves resolved data untouched") {
  auto g = soliton_grid();
  EvolutionState s{soliton_field(1.0, 0.0, 0.0, g).field, 0.0, 1.0};
  auto plain = evolve(s, 0.1, 1e-3, 1000).trajectory.back();
  auto filt = evolve(s, 0.1, 1e-3, 1000, StepperOptions{true}).trajectory.back();
  double err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(plain.field.values[j] - filt.field.values[j]));
  CHECK(err < 1e-12);
}
