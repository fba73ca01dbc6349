#pragma once

#include <sfocus/fft.hpp>
#include <sfocus/grid.hpp>

#include <memory>
#include <numbers>
#include <vector>

namespace sfocus {

/// Angular wavenumbers in FFTW order for a periodic grid.
inline std::vector<double> wavenumbers(const Grid1D& grid) {
  const std::size_t n = grid.n;
  const double base = 2.0 * std::numbers::pi / grid.length();
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<long>(j);
    const long m = (j <= n / 2) ? jj : jj - static_cast<long>(n);
    k[j] = base * static_cast<double>(m);
  }
  return k;
}

/// Fourier differentiation and integration on one periodic grid.
class SpectralOps {
public:
  explicit SpectralOps(const Grid1D& grid)
      : grid_(grid), fft_(std::make_unique<Fft>(grid.n)), k_(wavenumbers(grid)) {
    grid_.validate();
  }

  const Grid1D& grid() const { return grid_; }
  const std::vector<double>& k() const { return k_; }

  /// d^order f / dx^order; the Nyquist mode is dropped for odd orders.
  std::vector<cplx> derivative(std::span<const cplx> f, int order) {
    std::vector<cplx> a(f.begin(), f.end());
    fft_->forward(a);
    const std::size_t n = grid_.n;
    cplx ik_pow;
    for (std::size_t j = 0; j < n; ++j) {
      ik_pow = std::pow(cplx(0.0, k_[j]), order);
      if (order % 2 == 1 && j == n / 2) ik_pow = 0.0;
      a[j] *= ik_pow / static_cast<double>(n);
    }
    fft_->backward(a);
    return a;
  }

  std::vector<cplx> derivative(const ComplexField1D& f, int order) {
    check(f);
    return derivative(f.values, order);
  }

  /// F(x) = ∫_0^x f(ζ) dζ for periodic samples f: the mean contributes a
  /// linear term, the oscillatory modes are integrated in Fourier space. The
  /// anchor x = 0 need not be a grid node.
  std::vector<double> antiderivative_from_origin(std::span<const double> f) {
    const std::size_t n = grid_.n;
    if (f.size() != n) throw StructureError("antiderivative: size mismatch");
    std::vector<cplx> a(f.begin(), f.end());
    fft_->forward(a);
    const double mean = a[0].real() / static_cast<double>(n);
    // value of the oscillatory antiderivative at x = 0
    cplx at_origin = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 || j == n / 2) {
        a[j] = 0.0;
        continue;
      }
      a[j] /= cplx(0.0, k_[j]) * static_cast<double>(n);
      at_origin += a[j] * std::exp(cplx(0.0, k_[j] * (0.0 - grid_.x_min)));
    }
    fft_->backward(a);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
      out[j] = mean * grid_.x(j) + a[j].real() - at_origin.real();
    return out;
  }

  /// Applies a diagonal Fourier multiplier m(k) in place.
  template <class Multiplier>
  void apply_multiplier(std::span<cplx> f, Multiplier&& m) {
    fft_->forward(f);
    const double inv_n = 1.0 / static_cast<double>(grid_.n);
    for (std::size_t j = 0; j < grid_.n; ++j) f[j] *= m(k_[j], j) * inv_n;
    fft_->backward(f);
  }

private:
  void check(const ComplexField1D& f) const {
    if (!(f.grid == grid_)) throw StructureError("SpectralOps: field lives on another grid");
  }

  Grid1D grid_;
  std::unique_ptr<Fft> fft_;
  std::vector<double> k_;
};

} // namespace sfocus
