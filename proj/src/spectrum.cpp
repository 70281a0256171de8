#include "emomusic/spectrum.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "emomusic/error.hpp"

namespace emomusic {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  std::size_t n;
  double* in;
  fftw_complex* out;
  fftw_plan plan;

  explicit Impl(std::size_t size) : n(size) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  ~Impl() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
};

RealFft::RealFft(std::size_t size) {
  if (size < 2) throw Error(ErrorKind::InvalidArgument, "FFT size must be at least 2");
  impl_ = std::make_unique<Impl>(size);
}
RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const noexcept { return impl_->n; }

void RealFft::magnitude(std::span<const double> frame, std::span<double> out) {
  std::copy(frame.begin(), frame.end(), impl_->in);
  fftw_execute(impl_->plan);
  for (std::size_t k = 0; k < bins(); ++k) out[k] = std::hypot(impl_->out[k][0], impl_->out[k][1]);
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

}  // namespace emomusic
