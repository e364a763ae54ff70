#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "rail/error.hpp"

namespace rail {

namespace detail {

/// FFTW planning is not thread-safe; executing an existing plan on new arrays
/// is. Plans are created once per size under a lock and live for the process.
class FftPlans {
 public:
  struct Pair {
    fftw_plan forward;
    fftw_plan inverse;
  };

  static const Pair& get(std::size_t n) {
    static FftPlans instance;
    std::lock_guard lock(instance.mutex_);
    auto it = instance.plans_.find(n);
    if (it != instance.plans_.end()) return it->second;
    std::vector<double> real(n);
    std::vector<std::complex<double>> spec(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int len = static_cast<int>(n);
    Pair p{fftw_plan_dft_r2c_1d(len, real.data(), reinterpret_cast<fftw_complex*>(spec.data()), flags),
           fftw_plan_dft_c2r_1d(len, reinterpret_cast<fftw_complex*>(spec.data()), real.data(), flags)};
    return instance.plans_.emplace(n, p).first->second;
  }

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

  std::mutex mutex_;
  std::map<std::size_t, Pair> plans_;
};

inline std::size_t fft_size_for(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline std::vector<std::complex<double>> forward_fft(std::span<const double> x, std::size_t n) {
  std::vector<double> padded(n, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  std::vector<std::complex<double>> spec(n / 2 + 1);
  fftw_execute_dft_r2c(FftPlans::get(n).forward, padded.data(), reinterpret_cast<fftw_complex*>(spec.data()));
  return spec;
}

}  // namespace detail

/// Precomputed spectrum of a received signal, reusable against several
/// templates.
class ReceivedSpectrum {
 public:
  explicit ReceivedSpectrum(std::span<const double> received)
      : length_(received.size()), n_(detail::fft_size_for(received.size())), spec_(detail::forward_fft(received, n_)) {}

  std::size_t length() const noexcept { return length_; }

  /// c[l] = sum_n received[n + l] * tmpl[n] for l = 0 .. length - |tmpl|.
  /// With the transform size >= length, none of these lags wrap.
  std::vector<double> correlate(std::span<const double> tmpl) const {
    if (tmpl.size() > length_) throw Error(Errc::dimension, "template longer than received signal");
    if (tmpl.empty()) throw Error(Errc::dimension, "empty template");
    auto t = detail::forward_fft(tmpl, n_);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = spec_[k] * std::conj(t[k]);
    std::vector<double> full(n_);
    fftw_execute_dft_c2r(detail::FftPlans::get(n_).inverse, reinterpret_cast<fftw_complex*>(t.data()), full.data());
    const std::size_t n_lags = length_ - tmpl.size() + 1;
    std::vector<double> out(n_lags);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t l = 0; l < n_lags; ++l) out[l] = full[l] * scale;
    return out;
  }

 private:
  std::size_t length_;
  std::size_t n_;
  std::vector<std::complex<double>> spec_;
};

inline std::vector<double> cross_correlate(std::span<const double> received, std::span<const double> tmpl) {
  if (tmpl.size() > received.size()) throw Error(Errc::dimension, "template longer than received signal");
  return ReceivedSpectrum(received).correlate(tmpl);
}

}  // namespace rail
