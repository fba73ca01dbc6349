#pragma once

#include <sfocus/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace sfocus {

using cplx = std::complex<double>;

/// Uniform periodic grid on [x_min, x_max); n must be a power of two >= 8.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 8;

  static Grid1D symmetric(double half_width, std::size_t n) {
    Grid1D g{-half_width, half_width, n};
    g.validate();
    return g;
  }

  void validate() const {
    if (!(x_max > x_min))
      throw DomainError("Grid1D: x_max must exceed x_min");
    if (n < 8 || (n & (n - 1)) != 0)
      throw DomainError("Grid1D: n must be a power of two >= 8, got " + std::to_string(n));
  }

  double length() const { return x_max - x_min; }
  double dx() const { return length() / static_cast<double>(n); }
  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx(); }

  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
    return xs;
  }

  /// True when the grid is symmetric about 0, so node j mirrors node (n-j) mod n.
  bool is_symmetric() const {
    return std::abs(x_min + x_max) <= 1e-12 * std::max(1.0, length());
  }

  /// Index of the node at x = 0 on a symmetric grid.
  std::size_t origin_index() const {
    if (!is_symmetric()) throw StructureError("Grid1D: grid is not symmetric about 0");
    return n / 2;
  }

  /// Mirror partner of node j (x -> -x) on a symmetric periodic grid.
  std::size_t mirror(std::size_t j) const { return (n - j) % n; }
};

inline bool operator==(const Grid1D& a, const Grid1D& b) {
  return a.x_min == b.x_min && a.x_max == b.x_max && a.n == b.n;
}

/// Complex samples on a Grid1D.
struct ComplexField1D {
  Grid1D grid;
  std::vector<cplx> values;

  ComplexField1D() = default;
  explicit ComplexField1D(const Grid1D& g) : grid(g), values(g.n, cplx{}) {}
  ComplexField1D(const Grid1D& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) throw StructureError("ComplexField1D: size does not match grid");
  }

  std::size_t size() const { return values.size(); }

  std::vector<double> amplitude() const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [](cplx z) { return std::abs(z); });
    return out;
  }

  std::vector<double> phase() const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [](cplx z) { return std::arg(z); });
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (auto z : values) m = std::max(m, std::abs(z));
    return m;
  }
};

/// Removes 2π jumps from a sampled phase, walking outward from `anchor` in
/// both directions; the anchor value is kept.
inline std::vector<double> unwrap_phase(std::span<const double> phase, std::size_t anchor = 0) {
  std::vector<double> out(phase.begin(), phase.end());
  if (out.empty()) return out;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto fix = [&](std::size_t prev, std::size_t cur) {
    double d = out[cur] - out[prev];
    out[cur] -= two_pi * std::round(d / two_pi);
  };
  for (std::size_t j = anchor + 1; j < out.size(); ++j) fix(j - 1, j);
  for (std::size_t j = anchor; j-- > 0;) fix(j + 1, j);
  return out;
}

} // namespace sfocus
