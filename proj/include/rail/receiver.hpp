#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rail/correlate.hpp"
#include "rail/error.hpp"
#include "rail/waveform.hpp"

namespace rail {

struct RangeEstimate {
  std::size_t tx_id = 0;
  std::size_t peak_sample = 0;
  double peak_value = 0.0;
  double distance_m = 0.0;
};

struct Peak {
  std::size_t sample = 0;
  double value = 0.0;
};

/// Largest |c[l]|; the first (smallest) lag wins ties.
inline Peak argmax_abs(std::span<const double> corr) {
  Peak best;
  for (std::size_t l = 0; l < corr.size(); ++l) {
    const double v = std::abs(corr[l]);
    if (v > best.value) best = {l, v};
  }
  return best;
}

inline void check_pair(const SampledSignal& received, const SampledSignal& tmpl) {
  if (received.sample_rate_hz != tmpl.sample_rate_hz) {
    throw Error(Errc::invalid_config, "received and template sample rates differ");
  }
  if (tmpl.size() > received.size()) throw Error(Errc::dimension, "template longer than received signal");
}

inline Peak matched_filter_toa(const SampledSignal& received, const SampledSignal& tmpl) {
  check_pair(received, tmpl);
  return argmax_abs(cross_correlate(received.samples, tmpl.samples));
}

inline double distance_from_toa(std::size_t peak_sample, double sample_rate_hz, double c) {
  return static_cast<double>(peak_sample) / sample_rate_hz * c;
}

/// One matched filter per transmitter; the received spectrum is shared.
inline std::vector<RangeEstimate> range_all(const SampledSignal& received, std::span<const SampledSignal> templates,
                                            double sample_rate_hz, double c) {
  std::vector<RangeEstimate> out;
  if (templates.empty()) return out;
  for (const auto& t : templates) check_pair(received, t);
  const ReceivedSpectrum spectrum(received.samples);
  out.reserve(templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const Peak p = argmax_abs(spectrum.correlate(templates[i].samples));
    out.push_back({i, p.sample, p.value, distance_from_toa(p.sample, sample_rate_hz, c)});
  }
  return out;
}

}  // namespace rail
