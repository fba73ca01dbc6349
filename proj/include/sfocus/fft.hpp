#pragma once

#include <sfocus/grid.hpp>

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <span>

namespace sfocus {

namespace detail {
// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

/// Owning pair of FFTW plans (forward/backward, unnormalised) on a private
/// aligned buffer. One instance per run; not shareable across threads.
class Fft {
public:
  explicit Fft(std::size_t n) : n_(n) {
    buf_ = fftw_alloc_complex(n_);
    if (!buf_) throw Error("Fft: allocation failed");
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n_), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n_), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  ~Fft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  std::size_t size() const { return n_; }

  /// In-place forward transform: X_k = sum_j x_j exp(-2πi jk/n).
  void forward(std::span<cplx> data) { run(fwd_, data); }

  /// In-place backward transform without the 1/n factor.
  void backward(std::span<cplx> data) { run(bwd_, data); }

private:
  void run(fftw_plan plan, std::span<cplx> data) {
    if (data.size() != n_) throw StructureError("Fft: size mismatch");
    std::memcpy(buf_, data.data(), n_ * sizeof(cplx));
    fftw_execute(plan);
    std::memcpy(static_cast<void*>(data.data()), buf_, n_ * sizeof(cplx));
  }

  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

} // namespace sfocus
