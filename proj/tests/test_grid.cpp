#include <catch_amalgamated.hpp>

#include <sfocus/finite_difference.hpp>
#include <sfocus/grid.hpp>
#include <sfocus/mollify.hpp>
#include <sfocus/snapshot_io.hpp>
#include <sfocus/spectral.hpp>

#include <numbers>
#include <sstream>

using namespace sfocus;
using Catch::Matchers::WithinAbs;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid1D::symmetric(1.0, 6), DomainError);
  CHECK_THROWS_AS(Grid1D::symmetric(1.0, 12), DomainError);
  CHECK_THROWS_AS((Grid1D{1.0, 0.0, 16}.validate()), DomainError);
  auto g = Grid1D::symmetric(2.0, 16);
  CHECK(g.dx() == 0.25);
  CHECK(g.x(g.origin_index()) == 0.0);
  CHECK(g.x(g.mirror(3)) == -g.x(3));
}

TEST_CASE("field size must match grid") {
  auto g = Grid1D::symmetric(1.0, 8);
  CHECK_THROWS_AS(ComplexField1D(g, std::vector<cplx>(7)), StructureError);
}

TEST_CASE("phase unwrapping walks out from the anchor") {
  std::vector<double> raw;
  for (int j = 0; j < 40; ++j) raw.push_back(std::remainder(0.4 * j, 2 * std::numbers::pi));
  auto u = unwrap_phase(raw, 20);
  for (int j = 0; j < 40; ++j) CHECK_THAT(u[j] - u[20], WithinAbs(0.4 * (j - 20), 1e-12));
}

TEST_CASE("spectral derivative of a trigonometric field") {
  auto g = Grid1D::symmetric(std::numbers::pi, 64);
  SpectralOps ops(g);
  std::vector<cplx> f(g.n);
  for (std::size_t j = 0; j < g.n; ++j) f[j] = std::exp(cplx(0, 3 * g.x(j)));
  auto d1 = ops.derivative(f, 1);
  auto d3 = ops.derivative(f, 3);
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(std::abs(d1[j] - cplx(0, 3) * f[j]) < 1e-12);
    CHECK(std::abs(d3[j] - cplx(0, -27) * f[j]) < 1e-10);
  }
}

TEST_CASE("antiderivative anchored at zero") {
  auto g = Grid1D::symmetric(20.0, 512);
  SpectralOps ops(g);
  std::vector<double> f(g.n);
  for (std::size_t j = 0; j < g.n; ++j) f[j] = 1.0 / std::pow(std::cosh(g.x(j)), 2);
  auto F = ops.antiderivative_from_origin(f);
  for (std::size_t j = 0; j < g.n; j += 7) CHECK_THAT(F[j], WithinAbs(std::tanh(g.x(j)), 1e-12));
  CHECK_THAT(F[g.origin_index()], WithinAbs(0.0, 1e-14));
}

TEST_CASE("fourth-order differences converge at order four") {
  auto err = [](std::size_t n) {
    const double h = 2.0 / static_cast<double>(n - 1);
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = std::sin(1.3 * (-1.0 + j * h));
    auto d = fd::first_derivative4<double>(f, h);
    double e = 0;
    for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(d[j] - 1.3 * std::cos(1.3 * (-1.0 + j * h))));
    return e;
  };
  const double order = std::log2(err(41) / err(81));
  CHECK(order > 3.7);
  CHECK_THROWS_AS(fd::first_derivative4<double>(std::vector<double>(4), 0.1), StructureError);
}

TEST_CASE("mollifier preserves mass and smooths a box") {
  const double dx = 0.01;
  std::vector<double> box(1000, 0.0);
  for (int j = 300; j < 700; ++j) box[j] = 1.0;
  auto m = mollify(box, dx, 0.5);
  double a = 0, b = 0;
  for (int j = 0; j < 1000; ++j) { a += box[j]; b += m[j]; }
  CHECK_THAT(a, WithinAbs(b, 1e-10));
  CHECK(m[300] > 0.4);
  CHECK(m[300] < 0.6);
  CHECK(m[275] < 1e-6);
}

TEST_CASE("SFQ1 round trip and layout") {
  std::vector<cplx> v{{1.5, -2.0}, {0.0, 3.25}, {-1e-300, 7.0}};
  std::stringstream ss;
  write_sfq1(ss, v);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == 4 + 8 + 3 * 16);
  CHECK(bytes.substr(0, 4) == "SFQ1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 3);
  auto back = read_sfq1(ss);
  CHECK(back == v);
  std::stringstream bad("SFQ2xxxx");
  CHECK_THROWS_AS(read_sfq1(bad), StructureError);
}

TEST_CASE("field CSV has the documented columns") {
  auto g = Grid1D::symmetric(1.0, 8);
  ComplexField1D f(g);
  f.values[0] = {0.0, 2.0};
  std::stringstream ss;
  write_field_csv(ss, f);
  std::string header, first;
  std::getline(ss, header);
  std::getline(ss, first);
  CHECK(header == "x,re,im,abs,arg");
  CHECK(first.rfind("-1,0,2,2,", 0) == 0);
}
