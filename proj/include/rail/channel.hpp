#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "rail/error.hpp"
#include "rail/geometry.hpp"
#include "rail/waveform.hpp"

namespace rail {

struct PathSpec {
  double delay_s = 0.0;
  double gain = 0.0;
  int order = 1;
};

struct ChannelConfig {
  /// +infinity disables noise.
  double snr_db = std::numeric_limits<double>::infinity();
  bool multipath_enabled = true;
  int reflection_order = 1;
  double reflection_coeff = 0.6;
  bool rayleigh_fading = true;
  /// Fading is static per burst; retained for configuration completeness only.
  double max_doppler_hz = 0.0;
  std::uint64_t seed = 0;

  bool noise_enabled() const noexcept { return !(std::isinf(snr_db) && snr_db > 0.0); }

  void validate() const {
    if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0)) {
      throw Error(Errc::invalid_config, "snr_db: must be finite (or +inf to disable noise)");
    }
    if (reflection_order < 0 || reflection_order > 2) {
      throw Error(Errc::invalid_config, "reflection_order: must be 0, 1 or 2");
    }
    if (!(reflection_coeff >= 0.0 && reflection_coeff <= 1.0)) {
      throw Error(Errc::invalid_config, "reflection_coeff: must lie in [0, 1]");
    }
    if (!(max_doppler_hz >= 0.0) || !std::isfinite(max_doppler_hz)) {
      throw Error(Errc::invalid_config, "max_doppler_hz: must be finite and >= 0");
    }
  }
};

namespace detail {

/// Uniform in (0, 1], built from raw engine bits so it does not depend on the
/// standard library's distribution implementation.
inline double unit_open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Rayleigh magnitude with unit mean (sigma = sqrt(2/pi)).
inline double unit_mean_rayleigh(std::mt19937_64& rng) {
  const double sigma = std::sqrt(2.0 / std::numbers::pi);
  return sigma * std::sqrt(-2.0 * std::log(unit_open_uniform(rng)));
}

/// Gaussian via Box-Muller on engine bits; one value per call.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = unit_open_uniform(rng);
  const double u2 = unit_open_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec3 mirror(const Vec3& p, int axis, bool far_wall, const Vec3& dims) {
  Vec3 q = p;
  q[axis] = far_wall ? 2.0 * dims[axis] - p[axis] : -p[axis];
  return q;
}

}  // namespace detail

inline double propagation_delay(const Vec3& tx_pos, const Vec3& rx_pos, double c) {
  if (!(c > 0.0)) throw Error(Errc::invalid_parameter, "speed of sound must be positive");
  return (tx_pos - rx_pos).norm() / c;
}

/// Image-source reflections off the six room faces. A transmitter may sit on
/// a face (beacons are wall-mounted); images that coincide with the source or
/// with an image already emitted are dropped.
inline std::vector<PathSpec> image_method_paths(const RoomGeometry& room, const Vec3& tx_pos, const Vec3& rx_pos,
                                                const ChannelConfig& cfg) {
  room.validate();
  cfg.validate();
  if (!room.contains(tx_pos)) throw Error(Errc::geometry, "transmitter outside room: " + to_string(tx_pos));
  if (!room.strictly_contains(rx_pos)) throw Error(Errc::geometry, "receiver not inside room: " + to_string(rx_pos));
  if (!cfg.multipath_enabled || cfg.reflection_order == 0) return {};

  struct Image {
    Vec3 pos;
    int order;
  };
  std::vector<Image> images;
  auto push_unique = [&](const Vec3& q, int order) {
    constexpr double tol = 1e-12;
    if ((q - tx_pos).norm() <= tol) return;
    for (const auto& im : images) {
      if ((im.pos - q).norm() <= tol) return;
    }
    images.push_back({q, order});
  };

  const Vec3& dims = room.dims_m;
  for (int a = 0; a < 3; ++a) {
    for (bool far : {false, true}) push_unique(detail::mirror(tx_pos, a, far, dims), 1);
  }
  if (cfg.reflection_order >= 2) {
    // Distinct second-order images: reflections off two different axes
    // commute, so one ordering per pair; the two opposite faces of one
    // axis give two distinct images.
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        for (bool fa : {false, true}) {
          for (bool fb : {false, true}) {
            push_unique(detail::mirror(detail::mirror(tx_pos, a, fa, dims), b, fb, dims), 2);
          }
        }
      }
      for (bool first_far : {false, true}) {
        push_unique(detail::mirror(detail::mirror(tx_pos, a, first_far, dims), a, !first_far, dims), 2);
      }
    }
  }

  const double c = room.speed_of_sound_mps;
  const double d_direct = (tx_pos - rx_pos).norm();
  std::mt19937_64 rng(cfg.seed);
  std::vector<PathSpec> paths;
  paths.reserve(images.size());
  for (const auto& im : images) {
    const double d_path = (im.pos - rx_pos).norm();
    double gain = std::pow(cfg.reflection_coeff, im.order) * (d_direct / d_path);
    if (cfg.rayleigh_fading) gain *= detail::unit_mean_rayleigh(rng);
    paths.push_back({d_path / c, std::min(gain, 1.0), im.order});
  }
  return paths;
}

/// Whole-sample delayed copies of `signal`, scaled and summed.
inline SampledSignal apply_channel(const SampledSignal& signal, double direct_delay_s, std::span<const PathSpec> paths,
                                   double direct_gain = 1.0) {
  if (!(signal.sample_rate_hz > 0.0)) throw Error(Errc::invalid_config, "sample rate must be positive");
  auto to_shift = [&](double delay_s) {
    if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) throw Error(Errc::invalid_delay, "delay must be finite and >= 0");
    return static_cast<std::size_t>(std::llround(delay_s * signal.sample_rate_hz));
  };
  struct Tap {
    std::size_t shift;
    double gain;
  };
  std::vector<Tap> taps;
  taps.reserve(paths.size() + 1);
  taps.push_back({to_shift(direct_delay_s), direct_gain});
  for (const auto& p : paths) taps.push_back({to_shift(p.delay_s), p.gain});

  std::size_t max_shift = 0;
  for (const auto& t : taps) max_shift = std::max(max_shift, t.shift);
  SampledSignal out{std::vector<double>(signal.size() + max_shift, 0.0), signal.sample_rate_hz};
  for (const auto& t : taps) {
    if (t.gain == 0.0) continue;
    for (std::size_t n = 0; n < signal.size(); ++n) out.samples[n + t.shift] += t.gain * signal.samples[n];
  }
  return out;
}

/// Mean square over the span between the first and last non-zero sample.
inline double active_power(const SampledSignal& signal) {
  const auto& s = signal.samples;
  auto first = std::find_if(s.begin(), s.end(), [](double v) { return v != 0.0; });
  if (first == s.end()) return 0.0;
  auto last = std::find_if(s.rbegin(), s.rend(), [](double v) { return v != 0.0; }).base();
  double acc = 0.0;
  for (auto it = first; it != last; ++it) acc += *it * *it;
  return acc / static_cast<double>(std::distance(first, last));
}

inline SampledSignal add_awgn(const SampledSignal& signal, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0)) {
    throw Error(Errc::invalid_parameter, "snr_db must be finite or +inf");
  }
  if (std::isinf(snr_db)) return signal;
  if (signal.empty()) throw Error(Errc::undefined_snr, "cannot add noise to an empty signal");
  const double power = active_power(signal);
  if (power <= 0.0) throw Error(Errc::undefined_snr, "signal has zero power");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(derive_seed(seed, stream::noise));
  SampledSignal out = signal;
  for (auto& v : out.samples) v += sigma * detail::standard_normal(rng);
  return out;
}

inline SampledSignal mix(std::span<const SampledSignal> signals) {
  if (signals.empty()) return {};
  const double fs = signals.front().sample_rate_hz;
  std::size_t len = 0;
  for (const auto& s : signals) {
    if (s.sample_rate_hz != fs) throw Error(Errc::invalid_config, "mix: mismatched sample rates");
    len = std::max(len, s.size());
  }
  SampledSignal out{std::vector<double>(len, 0.0), fs};
  for (const auto& s : signals) {
    for (std::size_t n = 0; n < s.size(); ++n) out.samples[n] += s.samples[n];
  }
  return out;
}

}  // namespace rail
