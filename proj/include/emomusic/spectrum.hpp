#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace emomusic {

// Magnitude spectrum of real frames of a fixed length, backed by FFTW.
// Each instance owns its buffers and plan, so one instance per worker is
// safe; plan creation itself is serialized internally.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept;
  std::size_t bins() const noexcept { return size() / 2 + 1; }

  // |X[k]| for k = 0..size/2 of `frame` (length == size()).
  void magnitude(std::span<const double> frame, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

}  // namespace emomusic
