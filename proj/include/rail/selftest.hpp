#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rail/channel.hpp"
#include "rail/codes.hpp"
#include "rail/locate.hpp"
#include "rail/receiver.hpp"
#include "rail/waveform.hpp"

namespace rail {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline CheckResult check_hadamard() {
  for (std::size_t n = 1; n <= 64; n <<= 1) {
    const auto h = hadamard_matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        long dot = 0;
        for (std::size_t k = 0; k < n; ++k) dot += h[i][k] * h[j][k];
        if (dot != (i == j ? static_cast<long>(n) : 0L)) {
          return {"hadamard_orthogonality", false, "H H^T != n I at order " + std::to_string(n)};
        }
      }
    }
  }
  return {"hadamard_orthogonality", true, "orders 1..64"};
}

inline CheckResult check_despread() {
  const auto book = build_codebook(4);
  for (int bit : {-1, 1}) {
    for (const auto& ci : book.codes) {
      for (const auto& cj : book.codes) {
        const double want = ci.tx_id == cj.tx_id ? bit : 0.0;
        if (despread(spread(bit, ci), cj) != want) return {"spread_despread", false, "mismatch"};
      }
    }
  }
  return {"spread_despread", true, "4 codes, both polarities"};
}

inline CheckResult check_distance_arithmetic() {
  const bool ok = distance_from_toa(1000, 340'000.0, 340.0) == 1.0 && distance_from_toa(0, 340'000.0, 340.0) == 0.0 &&
                  distance_from_toa(17'000, 340'000.0, 340.0) == 17.0;
  return {"toa_distance_arithmetic", ok, "d = n / fs * c"};
}

inline CheckResult check_trilateration_oracle() {
  const BeaconSet beacons;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ux(0.05, 4.95), uz(0.05, 3.95);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(ux(rng), ux(rng), uz(rng));
    std::vector<double> d;
    for (const auto& b : beacons.positions) d.push_back((p - b).norm());
    worst = std::max(worst, (trilaterate(beacons, d).xyz_m - p).norm());
  }
  return {"trilateration_exact_distances", worst < 1e-9, "max error " + sci(worst) + " m over 1000 points"};
}

inline CheckResult check_channel_linearity() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  SampledSignal x{std::vector<double>(4096), 340'000.0}, y = x;
  for (auto& v : x.samples) v = n01(rng);
  for (auto& v : y.samples) v = n01(rng);
  const std::vector<PathSpec> paths{{0.001, 0.5, 1}, {0.0023, -0.25, 1}};
  const double a = 1.7, b = -0.3;
  SampledSignal combo = x;
  for (std::size_t i = 0; i < combo.size(); ++i) combo.samples[i] = a * x.samples[i] + b * y.samples[i];
  const auto lhs = apply_channel(combo, 0.004, paths, 1.0);
  const auto hx = apply_channel(x, 0.004, paths, 1.0);
  const auto hy = apply_channel(y, 0.004, paths, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    worst = std::max(worst, std::abs(lhs.samples[i] - (a * hx.samples[i] + b * hy.samples[i])));
  }
  return {"channel_linearity", worst <= 1e-12, "max deviation " + sci(worst)};
}

inline CheckResult check_awgn_calibration() {
  SampledSignal s{std::vector<double>(1'000'000), 340'000.0};
  for (std::size_t i = 0; i < s.size(); ++i) s.samples[i] = std::sin(0.1 * static_cast<double>(i)) + 0.25;
  const auto noisy = add_awgn(s, 20.0, 99);
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ps += s.samples[i] * s.samples[i];
    const double e = noisy.samples[i] - s.samples[i];
    pn += e * e;
  }
  const double snr = 10.0 * std::log10(ps / pn);
  return {"awgn_calibration", std::abs(snr - 20.0) <= 0.2, "measured " + std::to_string(snr) + " dB at 20 dB"};
}

inline CheckResult check_matched_filter_roundtrip() {
  const WaveformConfig cfg;
  const auto book = build_codebook(4);
  for (std::size_t tx = 0; tx < 4; ++tx) {
    const auto tmpl = reference_template(tx, {11 + tx, 23 + tx}, book, cfg);
    for (std::size_t delay : {0UL, 1UL, 3400UL, 12345UL}) {
      const auto rx = apply_channel(tmpl, static_cast<double>(delay) / cfg.sample_rate_hz, {}, 1.0);
      if (matched_filter_toa(rx, tmpl).sample != delay) {
        return {"matched_filter_roundtrip", false, "tx " + std::to_string(tx) + " delay " + std::to_string(delay)};
      }
    }
  }
  return {"matched_filter_roundtrip", true, "4 transmitters, 4 delays"};
}

}  // namespace detail

/// Analytic invariants that must hold in any correct build.
inline std::vector<CheckResult> run_selftest() {
  return {detail::check_hadamard(),           detail::check_despread(),
          detail::check_distance_arithmetic(), detail::check_trilateration_oracle(),
          detail::check_channel_linearity(),   detail::check_awgn_calibration(),
          detail::check_matched_filter_roundtrip()};
}

}  // namespace rail
