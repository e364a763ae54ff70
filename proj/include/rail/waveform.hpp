#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rail/codes.hpp"
#include "rail/error.hpp"
#include "rail/seeding.hpp"

namespace rail {

struct SampledSignal {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

struct WaveformConfig {
  double sample_rate_hz = 340'000.0;
  std::vector<double> hop_centers_hz{22'500.0, 27'500.0, 32'500.0, 37'500.0, 42'500.0, 47'500.0};
  double hop_bandwidth_hz = 5'000.0;
  double chip_duration_s = 4.0e-4;
  std::size_t code_length = 4;
  std::size_t n_symbols = 16;
  double phase_rad = 0.0;

  std::size_t n_channels() const noexcept { return hop_centers_hz.size(); }
  double symbol_duration_s() const noexcept { return static_cast<double>(code_length) * chip_duration_s; }

  std::size_t samples_per_chip() const {
    return static_cast<std::size_t>(std::llround(chip_duration_s * sample_rate_hz));
  }
  std::size_t samples_per_symbol() const { return samples_per_chip() * code_length; }
  std::size_t burst_samples() const { return samples_per_symbol() * n_symbols; }

  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
      throw Error(Errc::invalid_config, key + ": " + why);
    };
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) fail("sample_rate_hz", "must be positive");
    if (hop_centers_hz.empty()) fail("hop_centers_hz", "needs at least one channel");
    if (!(hop_bandwidth_hz > 0.0)) fail("hop_bandwidth_hz", "must be positive");
    if (code_length == 0) fail("code_length", "must be >= 1");
    if (n_symbols == 0) fail("n_symbols", "must be >= 1");
    if (!std::isfinite(phase_rad)) fail("phase_rad", "must be finite");
    const double f_max = *std::max_element(hop_centers_hz.begin(), hop_centers_hz.end());
    if (sample_rate_hz < 2.0 * f_max + hop_bandwidth_hz) {
      fail("sample_rate_hz", "below 2*max(hop_centers_hz) + hop_bandwidth_hz");
    }
    std::vector<double> sorted = hop_centers_hz;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() <= 0.0) fail("hop_centers_hz", "must be positive");
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] - sorted[i - 1] < hop_bandwidth_hz * (1.0 - 1e-9)) {
        fail("hop_centers_hz", "centers closer than hop_bandwidth_hz");
      }
    }
    const double spc = chip_duration_s * sample_rate_hz;
    if (!(chip_duration_s > 0.0) || std::abs(spc - std::round(spc)) > 1e-6 || std::round(spc) < 8.0) {
      fail("chip_duration_s", "chip_duration_s * sample_rate_hz must be an integer >= 8");
    }
  }
};

struct HopSchedule {
  std::size_t tx_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hop_indices;
};

struct DataBits {
  std::vector<int> bits;
  std::uint64_t seed = 0;
};

/// Seeds that, together with the codebook and config, fully determine one
/// transmitter's burst. The receiver holds the same values.
struct TxSeeds {
  std::uint64_t bits_seed = 0;
  std::uint64_t hop_seed = 0;
};

inline HopSchedule make_hop_schedule(std::size_t tx_id, std::uint64_t seed, std::size_t n_symbols,
                                     std::size_t n_channels) {
  if (n_channels == 0) throw Error(Errc::invalid_config, "hop schedule needs n_channels >= 1");
  if (n_symbols == 0) throw Error(Errc::invalid_config, "hop schedule needs n_symbols >= 1");
  std::mt19937_64 rng(derive_seed(seed, {stream::hop_schedule, tx_id}));
  HopSchedule s{tx_id, seed, std::vector<std::size_t>(n_symbols)};
  // Plain modulo keeps the sequence independent of the standard library's
  // distribution implementation; the bias is ~n_channels / 2^64.
  for (auto& idx : s.hop_indices) idx = static_cast<std::size_t>(rng() % n_channels);
  return s;
}

inline DataBits make_data_bits(std::uint64_t seed, std::size_t n_symbols) {
  if (n_symbols == 0) throw Error(Errc::invalid_config, "data bits need n_symbols >= 1");
  std::mt19937_64 rng(derive_seed(seed, stream::data_bits));
  DataBits d{std::vector<int>(n_symbols), seed};
  for (auto& b : d.bits) b = (rng() >> 63) ? 1 : -1;
  return d;
}

/// BPSK-coded chips on a hopped carrier with rectangular chip pulses. The
/// carrier phase runs continuously in absolute time from the burst start.
inline SampledSignal synthesize_tx(const DataBits& bits, const SpreadingCode& code, const HopSchedule& schedule,
                                   const WaveformConfig& cfg) {
  cfg.validate();
  if (bits.bits.size() != cfg.n_symbols || schedule.hop_indices.size() != cfg.n_symbols) {
    throw Error(Errc::dimension, "bits/schedule length must equal n_symbols");
  }
  if (code.length() != cfg.code_length) throw Error(Errc::dimension, "code length must equal code_length");

  const std::size_t spc = cfg.samples_per_chip();
  const double two_pi = 2.0 * std::numbers::pi;
  SampledSignal out{std::vector<double>(cfg.burst_samples()), cfg.sample_rate_hz};
  std::size_t n = 0;
  for (std::size_t k = 0; k < cfg.n_symbols; ++k) {
    const std::size_t channel = schedule.hop_indices[k];
    if (channel >= cfg.n_channels()) throw Error(Errc::dimension, "hop index out of range");
    const double f = cfg.hop_centers_hz[channel];
    for (std::size_t j = 0; j < cfg.code_length; ++j) {
      const double chip = static_cast<double>(bits.bits[k] * code.chips[j]);
      for (std::size_t s = 0; s < spc; ++s, ++n) {
        const double t = static_cast<double>(n) / cfg.sample_rate_hz;
        out.samples[n] = chip * std::sin(two_pi * f * t + cfg.phase_rad);
      }
    }
  }
  return out;
}

/// The receiver's local copy of a transmitter's undelayed burst.
inline SampledSignal reference_template(std::size_t tx_id, const TxSeeds& seeds, const CodeBook& book,
                                        const WaveformConfig& cfg) {
  if (tx_id >= book.size()) throw Error(Errc::invalid_count, "tx_id outside codebook");
  const auto bits = make_data_bits(seeds.bits_seed, cfg.n_symbols);
  const auto schedule = make_hop_schedule(tx_id, seeds.hop_seed, cfg.n_symbols, cfg.n_channels());
  return synthesize_tx(bits, book[tx_id], schedule, cfg);
}

}  // namespace rail
