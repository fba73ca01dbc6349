#pragma once

#include <sfocus/errors.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace sfocus {

/// C∞ bump exp(1 - 1/(1-u²)) on |u| < 1, zero elsewhere.
inline double bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

/// Convolves uniformly spaced samples with the normalised bump kernel of total
/// width `width` (support [-width/2, width/2]). The discrete kernel sums to 1,
/// so the discrete integral of f is preserved for data vanishing near the ends.
inline std::vector<double> mollify(std::span<const double> f, double dx, double width) {
  if (!(width > 0.0) || !(dx > 0.0)) throw DomainError("mollify: width and dx must be positive");
  const auto half = static_cast<long>(std::floor(0.5 * width / dx));
  if (half < 1) return {f.begin(), f.end()};
  std::vector<double> kernel(2 * half + 1);
  double sum = 0.0;
  for (long m = -half; m <= half; ++m) {
    const double w = bump(static_cast<double>(m) * dx / (0.5 * width));
    kernel[m + half] = w;
    sum += w;
  }
  for (auto& w : kernel) w /= sum;

  const auto n = static_cast<long>(f.size());
  std::vector<double> out(f.size(), 0.0);
  for (long j = 0; j < n; ++j) {
    if (f[j] == 0.0) continue;
    for (long m = -half; m <= half; ++m) {
      const long i = j + m;
      if (i >= 0 && i < n) out[i] += kernel[m + half] * f[j];
    }
  }
  return out;
}

} // namespace sfocus
