#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace decay2d::numerics {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (p) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(p);
    }
  }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

} // namespace detail

/// Unnormalized real-to-half-complex transform of an m x m array (row-major,
/// last index contiguous) and its inverse. Output has m x (m/2 + 1) entries.
class RealFft2d {
public:
  explicit RealFft2d(std::size_t m)
      : m_(m), real_(m * m), spec_(m * (m / 2 + 1)) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int mi = static_cast<int>(m);
    forward_.reset(fftw_plan_dft_r2c_2d(mi, mi, real_.data(),
                                        reinterpret_cast<fftw_complex*>(spec_.data()),
                                        FFTW_ESTIMATE));
    backward_.reset(fftw_plan_dft_c2r_2d(mi, mi, reinterpret_cast<fftw_complex*>(spec_.data()),
                                         real_.data(), FFTW_ESTIMATE));
  }

  std::size_t size() const { return m_; }
  std::size_t spectral_columns() const { return m_ / 2 + 1; }

  /// real buffer -> spectral buffer
  void forward() { fftw_execute(forward_.get()); }
  /// spectral buffer -> real buffer (scaled by m*m, as FFTW leaves it)
  void backward() { fftw_execute(backward_.get()); }

  std::span<double> real() { return real_; }
  std::span<std::complex<double>> spectrum() { return spec_; }

private:
  std::size_t m_;
  std::vector<double> real_;
  std::vector<std::complex<double>> spec_;
  detail::PlanHandle forward_;
  detail::PlanHandle backward_;
};

/// Unnormalized 1D real-to-half-complex transform of length m.
inline std::vector<std::complex<double>> real_fft(std::span<const double> samples) {
  const std::size_t m = samples.size();
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out(m / 2 + 1);
  detail::PlanHandle plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return out;
}

} // namespace decay2d::numerics
