#include <catch_amalgamated.hpp>

#include <sfocus/asymptotics.hpp>

using namespace sfocus;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("parabola edge") {
  FocusFrame f;
  CHECK_THAT(parabola_s(f), WithinRel(3.0, 1e-15));
  auto [lo, hi] = parabola_edge(f, -8.0);
  CHECK_THAT(hi, WithinRel(3.0 * 4.0, 1e-14));
  CHECK(lo == -hi);
}

TEST_CASE("stationary points at the edge are a double root") {
  FocusFrame f;
  auto r = stationary_points(3.0, f);
  CHECK(r.classification == RootClass::double_root);
  CHECK_THAT(r.roots[0].real(), WithinAbs(-0.5, 1e-14));
  CHECK_THAT(r.roots[1].real(), WithinAbs(1.0, 1e-14));
  CHECK_THAT(r.roots[2].real(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("stationary points at s = 0") {
  FocusFrame f;
  auto r = stationary_points(0.0, f);
  CHECK(r.classification == RootClass::one_real);
  int real_count = 0;
  for (auto z : r.roots)
    if (std::abs(z.imag()) < 1e-14) {
      ++real_count;
      CHECK_THAT(z.real(), WithinAbs(-std::cbrt(0.5), 1e-14));
    }
  CHECK(real_count == 1);
}

TEST_CASE("roots satisfy Vieta and the cubic across s") {
  for (double a : {0.5, 1.3}) {
    FocusFrame f;
    f.a = a;
    for (double s = -10.0; s <= 10.0; s += 0.37) {
      auto r = stationary_points(s, f);
      cplx sum = 0, prod = 1;
      for (auto z : r.roots) {
        sum += z;
        prod *= z;
        CHECK(std::abs(2.0 * z * z * z - s * z * z + r.d) < 1e-10 * std::max(1.0, s * s * s));
      }
      CHECK(std::abs(sum - s / 2.0) < 1e-11 * std::max(1.0, std::abs(s)));
      CHECK(std::abs(prod + r.d / 2.0) < 1e-11 * std::max(1.0, std::abs(s * s * s)));
    }
  }
}

TEST_CASE("classification switches at the edge") {
  FocusFrame f;
  CHECK(stationary_points(3.0 - 1e-6, f).classification == RootClass::one_real);
  CHECK(stationary_points(3.0 + 1e-6, f).classification == RootClass::three_real_distinct);
  CHECK(stationary_points(-5.0, f).classification == RootClass::one_real);
  CHECK(std::string(to_string(RootClass::double_root)) != to_string(RootClass::one_real));
}

TEST_CASE("dip field outside the parabola") {
  FocusFrame f;
  auto d = dip_field(-20.0, 4.0, f);
  CHECK(d.structural);
  auto r = stationary_points(4.0, f);
  cplx sum = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double fj = r.roots[j].real();
    CHECK_THAT(d.phases[j].f, WithinAbs(fj, 1e-14));
    CHECK_THAT(d.phases[j].leading_phase, WithinRel(std::cbrt(-20.0) * (4.0 * fj - fj * fj + 1.0 / fj), 1e-13));
    sum += std::pow(std::abs(fj), 1.5) / std::sqrt(std::abs(fj * fj * fj - 1.0)) *
           std::polar(1.0, d.phases[j].leading_phase);
    CHECK(!d.phases[j].beta);
  }
  CHECK(std::abs(d.value - sum / std::sqrt(20.0)) < 1e-14);
  // even in s
  CHECK(std::abs(dip_field(-20.0, -4.0, f).value - d.value) < 1e-15);
}

TEST_CASE("dip field with constants") {
  FocusFrame f;
  DipConstants k;
  k.beta = {2.0, 2.0, 2.0};
  auto a = dip_field(-20.0, 4.0, f);
  auto b = dip_field(-20.0, 4.0, f, k);
  CHECK(!b.structural);
  CHECK(b.phases[1].beta.value() == 2.0);
  CHECK(std::abs(b.value - 2.0 * a.value) < 1e-14);
  k.beta = {1.0, 1.0, 1.0};
  k.gamma = {1.0, 0.0, 0.0};
  auto c = dip_field(-20.0, 4.0, f, k);
  CHECK(std::abs(c.value - a.value) > 1e-3);
}

TEST_CASE("dip field errors") {
  FocusFrame f;
  CHECK_THROWS_AS(dip_field(-20.0, 1.0, f), ValidityError);
  CHECK_THROWS_AS(dip_field(-20.0, 3.0, f), EdgeDegeneracyError);
  CHECK_THROWS_AS(dip_field(0.0, 4.0, f), SingularTimeError);
}

TEST_CASE("modulation frequencies") {
  FocusFrame f;
  auto m = modulation_frequencies(0.0, f);
  CHECK_THAT(m.h2_plus, WithinRel(1.5, 1e-15));
  CHECK_THAT(m.rate_plus, WithinRel(1.5 * std::sqrt(3.0), 1e-14));
  CHECK_THAT(m.rate_minus, WithinRel(1.5 * std::sqrt(3.0), 1e-14));
  auto p = modulation_frequencies(1.7, f), n = modulation_frequencies(-1.7, f);
  CHECK_THAT(p.h2_plus, WithinRel(n.h2_minus, 1e-14));
  CHECK_THAT(p.rate_plus, WithinRel(n.rate_minus, 1e-14));
  CHECK_THROWS_AS(modulation_frequencies(3.5, f), ValidityError);
}

TEST_CASE("focus scaling") {
  FocusFrame f;
  auto s = focus_scaling_predict(f, 0.1);
  CHECK_THAT(s.peak_amplitude, WithinRel(5.0, 1e-14));
  CHECK_THAT(s.x_width, WithinRel(0.01, 1e-14));
  CHECK_THAT(s.t_width, WithinRel(0.001, 1e-14));
  CHECK_THROWS_AS(focus_scaling_predict(f, 0.0), DomainError);
}
