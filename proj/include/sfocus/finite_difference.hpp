#pragma once

#include <sfocus/errors.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace sfocus::fd {

/// Fourth-order first derivative on uniform samples: 5-point central stencil
/// in the interior, 5-point one-sided stencils on the two nodes at each end.
template <class T>
std::vector<T> first_derivative4(std::span<const T> f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw StructureError("first_derivative4: need at least 5 samples");
  std::vector<T> d(n);
  const double c = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
  const std::size_t m = n - 1;
  d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * c;
  d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * c;
  return d;
}

/// Fourth-order central first derivative at node i (needs i-2..i+2).
template <class T>
T central_d1(std::span<const T> f, std::size_t i, double h) {
  return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
}

/// Fourth-order central second derivative at node i (needs i-2..i+2).
template <class T>
T central_d2(std::span<const T> f, std::size_t i, double h) {
  return (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h * h);
}

/// 5-point least-squares (Savitzky–Golay, linear fit) derivative at node i.
template <class T>
T ls5_derivative(std::span<const T> f, std::size_t i, double h) {
  return (-2.0 * f[i - 2] - f[i - 1] + f[i + 1] + 2.0 * f[i + 2]) / (10.0 * h);
}

} // namespace sfocus::fd
