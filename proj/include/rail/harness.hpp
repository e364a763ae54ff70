#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rail/channel.hpp"
#include "rail/codes.hpp"
#include "rail/error.hpp"
#include "rail/geometry.hpp"
#include "rail/locate.hpp"
#include "rail/receiver.hpp"
#include "rail/seeding.hpp"
#include "rail/waveform.hpp"

namespace rail {

enum class TrajectoryKind { static_point, line, circle, random_waypoint };

inline const char* to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::static_point: return "static";
    case TrajectoryKind::line: return "line";
    case TrajectoryKind::circle: return "circle";
    case TrajectoryKind::random_waypoint: return "random-waypoint";
  }
  return "?";
}

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::random_waypoint;
  Vec3 point{2.5, 2.5, 1.0};  // static
  Vec3 start{1.0, 1.0, 1.0};  // line
  Vec3 end{4.0, 4.0, 3.0};
  double center_x = 2.5;      // circle, horizontal at `height`
  double center_y = 2.5;
  double radius = 1.5;
  double height = 1.5;
  std::size_t waypoints = 100;  // random-waypoint
  std::size_t n_points = 100;
  double margin_m = 0.3;
};

struct ScenarioConfig {
  RoomGeometry room;
  BeaconSet beacons;
  WaveformConfig waveform;
  ChannelConfig channel;
  /// room_height_m is taken from room.dims_m.z() when a trial runs.
  HeightSensorModel height_sensor;
  double fusion_alpha = 0.8;
  std::size_t n_trials = 100;
  std::uint64_t master_seed = 1;
  TrajectorySpec trajectory;

  void validate() const {
    room.validate();
    waveform.validate();
    channel.validate();
    if (beacons.size() < 4) throw Error(Errc::invalid_config, "beacons: at least 4 required");
    for (const auto& b : beacons.positions) {
      if (!room.contains(b)) throw Error(Errc::invalid_config, "beacons: " + to_string(b) + " outside room");
    }
    const std::size_t order = next_power_of_two(beacons.size());
    if (waveform.code_length != order) {
      throw Error(Errc::invalid_config, "code_length: must equal codebook order " + std::to_string(order) + " for " +
                                            std::to_string(beacons.size()) + " beacons");
    }
    if (!(fusion_alpha >= 0.0 && fusion_alpha <= 1.0)) throw Error(Errc::invalid_config, "fusion_alpha: must lie in [0, 1]");
    if (n_trials == 0) throw Error(Errc::invalid_config, "n_trials: must be >= 1");
    if (!(height_sensor.timing_noise_std_s >= 0.0) || !std::isfinite(height_sensor.timing_noise_std_s)) {
      throw Error(Errc::invalid_config, "height_timing_noise_std_s: must be finite and >= 0");
    }
  }
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  bool ok = true;
  std::string failure;
  Vec3 true_pos = Vec3::Zero();
  Vec3 est_pos = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  Vec3 est_pos_fused = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  double err_x = 0.0, err_y = 0.0, err_z = 0.0, err_z_fused = 0.0;
  double err_3d = 0.0, err_3d_fused = 0.0;
  std::vector<double> d_err;

  double err_xy() const { return std::hypot(err_x, err_y); }
};

struct ColumnStats {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

struct SummaryStats {
  std::size_t n_trials = 0;
  std::size_t n_failed = 0;
  ColumnStats err_x, err_y, err_z, err_z_fused, err_xy, err_3d, err_3d_fused, d_err;
};

struct SweepRow {
  double snr_db = 0.0;
  SummaryStats stats;
};

/// Points of the configured path. Every point must sit inside the room shrunk
/// by `margin_m`.
inline std::vector<Vec3> generate_trajectory(const TrajectorySpec& spec, const RoomGeometry& room, std::uint64_t seed) {
  room.validate();
  if (spec.n_points == 0) throw Error(Errc::invalid_config, "trajectory_points: must be >= 1");
  if (!(spec.margin_m >= 0.0) || 2.0 * spec.margin_m >= room.dims_m.minCoeff()) {
    throw Error(Errc::invalid_config, "trajectory_margin: leaves no room interior");
  }
  auto require_inside = [&](const Vec3& p, const char* key) {
    if (!room.contains_with_margin(p, spec.margin_m)) {
      throw Error(Errc::invalid_config, std::string(key) + ": " + to_string(p) + " violates margin " +
                                            std::to_string(spec.margin_m) + " m");
    }
  };
  const std::size_t n = spec.n_points;
  std::vector<Vec3> pts;
  pts.reserve(n);
  switch (spec.kind) {
    case TrajectoryKind::static_point:
      require_inside(spec.point, "trajectory_point");
      pts.assign(n, spec.point);
      break;
    case TrajectoryKind::line: {
      require_inside(spec.start, "trajectory_start");
      require_inside(spec.end, "trajectory_end");
      for (std::size_t i = 0; i < n; ++i) {
        const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        pts.push_back(spec.start + s * (spec.end - spec.start));
      }
      break;
    }
    case TrajectoryKind::circle: {
      if (!(spec.radius >= 0.0)) throw Error(Errc::invalid_config, "trajectory_radius: must be >= 0");
      const Vec3 lo(spec.center_x - spec.radius, spec.center_y - spec.radius, spec.height);
      const Vec3 hi(spec.center_x + spec.radius, spec.center_y + spec.radius, spec.height);
      require_inside(lo, "trajectory_radius");
      require_inside(hi, "trajectory_radius");
      for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        pts.emplace_back(spec.center_x + spec.radius * std::cos(th), spec.center_y + spec.radius * std::sin(th),
                         spec.height);
      }
      break;
    }
    case TrajectoryKind::random_waypoint: {
      if (spec.waypoints == 0) throw Error(Errc::invalid_config, "trajectory_waypoints: must be >= 1");
      std::mt19937_64 rng(derive_seed(seed, stream::trajectory));
      std::vector<Vec3> way(spec.waypoints);
      for (auto& w : way) {
        for (int a = 0; a < 3; ++a) {
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          w[a] = spec.margin_m + u * (room.dims_m[a] - 2.0 * spec.margin_m);
        }
      }
      // Even spacing in segment parameter; with waypoints == n_points the
      // output is exactly the waypoint list.
      const double segs = static_cast<double>(way.size() - 1);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = n == 1 ? 0.0 : segs * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto k = std::min(static_cast<std::size_t>(s), way.size() - 1);
        const double frac = s - static_cast<double>(k);
        pts.push_back(k + 1 < way.size() ? Vec3(way[k] + frac * (way[k + 1] - way[k])) : way[k]);
      }
      break;
    }
  }
  return pts;
}

/// Trial seed for index i under a master seed.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

inline TxSeeds tx_seeds_for(std::uint64_t trial_seed, std::size_t tx_id) {
  return {derive_seed(trial_seed, {stream::data_bits, tx_id}), derive_seed(trial_seed, {stream::hop_schedule, tx_id})};
}

/// Received composite for one receiver position: every beacon's burst through
/// its direct path and reflections, summed, plus noise.
inline SampledSignal simulate_received(const ScenarioConfig& cfg, const CodeBook& book, const Vec3& rx_pos,
                                       std::uint64_t seed) {
  const double c = cfg.room.speed_of_sound_mps;
  std::vector<SampledSignal> arrivals;
  arrivals.reserve(cfg.beacons.size());
  for (std::size_t i = 0; i < cfg.beacons.size(); ++i) {
    const Vec3& tx = cfg.beacons.positions[i];
    const TxSeeds s = tx_seeds_for(seed, i);
    const auto bits = make_data_bits(s.bits_seed, cfg.waveform.n_symbols);
    const auto hops = make_hop_schedule(i, s.hop_seed, cfg.waveform.n_symbols, cfg.waveform.n_channels());
    const auto burst = synthesize_tx(bits, book[i], hops, cfg.waveform);

    ChannelConfig ch = cfg.channel;
    ch.seed = derive_seed(seed, {stream::fading, cfg.channel.seed, i});
    const auto paths = image_method_paths(cfg.room, tx, rx_pos, ch);
    arrivals.push_back(apply_channel(burst, propagation_delay(tx, rx_pos, c), paths, 1.0));
  }
  const auto composite = mix(arrivals);
  return add_awgn(composite, cfg.channel.snr_db, derive_seed(seed, {stream::noise, cfg.channel.seed}));
}

inline TrialRecord run_trial(const ScenarioConfig& cfg, const Vec3& true_pos, std::uint64_t seed) {
  cfg.validate();
  if (!cfg.room.strictly_contains(true_pos)) {
    throw Error(Errc::out_of_room, "receiver position " + to_string(true_pos) + " not inside room");
  }
  const double c = cfg.room.speed_of_sound_mps;
  const double fs = cfg.waveform.sample_rate_hz;
  const CodeBook book = build_codebook(cfg.beacons.size());

  const SampledSignal received = simulate_received(cfg, book, true_pos, seed);

  std::vector<SampledSignal> templates;
  templates.reserve(cfg.beacons.size());
  for (std::size_t i = 0; i < cfg.beacons.size(); ++i) {
    templates.push_back(reference_template(i, tx_seeds_for(seed, i), book, cfg.waveform));
  }
  const auto ranges = range_all(received, templates, fs, c);

  TrialRecord rec;
  rec.seed = seed;
  rec.snr_db = cfg.channel.snr_db;
  rec.true_pos = true_pos;
  std::vector<double> distances(ranges.size());
  rec.d_err.resize(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    distances[i] = ranges[i].distance_m;
    rec.d_err[i] = std::abs(ranges[i].distance_m - (cfg.beacons.positions[i] - true_pos).norm());
  }

  PositionEstimate est;
  try {
    est = trilaterate(cfg.beacons, distances);
  } catch (const Error& e) {
    if (e.code() != Errc::degenerate_geometry && e.code() != Errc::invalid_range) throw;
    rec.ok = false;
    rec.failure = e.what();
    return rec;
  }

  HeightSensorModel sensor = cfg.height_sensor;
  sensor.room_height_m = cfg.room.dims_m.z();
  const double z_sensor = simulate_height_sensor(true_pos.z(), sensor, seed, c);
  est.z_fused_m = fuse_z(est.xyz_m.z(), z_sensor, cfg.fusion_alpha);

  rec.est_pos = est.xyz_m;
  rec.est_pos_fused = Vec3(est.xyz_m.x(), est.xyz_m.y(), *est.z_fused_m);
  const Vec3 diff = (rec.est_pos - true_pos).cwiseAbs();
  rec.err_x = diff.x();
  rec.err_y = diff.y();
  rec.err_z = diff.z();
  rec.err_z_fused = std::abs(*est.z_fused_m - true_pos.z());
  rec.err_3d = (rec.est_pos - true_pos).norm();
  rec.err_3d_fused = (rec.est_pos_fused - true_pos).norm();
  return rec;
}

namespace detail {

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline ColumnStats column_stats(std::vector<double> v) {
  if (v.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  std::sort(v.begin(), v.end());
  return {sum / static_cast<double>(v.size()), quantile_sorted(v, 0.5), quantile_sorted(v, 0.95)};
}

}  // namespace detail

/// Failed trials are counted but excluded from every column.
inline SummaryStats summarize(const std::vector<TrialRecord>& records) {
  SummaryStats s;
  std::vector<double> ex, ey, ez, ezf, exy, e3, e3f, de;
  for (const auto& r : records) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    ++s.n_trials;
    ex.push_back(r.err_x);
    ey.push_back(r.err_y);
    ez.push_back(r.err_z);
    ezf.push_back(r.err_z_fused);
    exy.push_back(r.err_xy());
    e3.push_back(r.err_3d);
    e3f.push_back(r.err_3d_fused);
    de.insert(de.end(), r.d_err.begin(), r.d_err.end());
  }
  s.err_x = detail::column_stats(std::move(ex));
  s.err_y = detail::column_stats(std::move(ey));
  s.err_z = detail::column_stats(std::move(ez));
  s.err_z_fused = detail::column_stats(std::move(ezf));
  s.err_xy = detail::column_stats(std::move(exy));
  s.err_3d = detail::column_stats(std::move(e3));
  s.err_3d_fused = detail::column_stats(std::move(e3f));
  s.d_err = detail::column_stats(std::move(de));
  return s;
}

struct MonteCarloResult {
  std::vector<TrialRecord> records;
  SummaryStats stats;
};

inline std::size_t default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Trials are independent; any thread count produces the same records.
inline MonteCarloResult monte_carlo(const ScenarioConfig& cfg, std::size_t threads = 1) {
  cfg.validate();
  const auto path = generate_trajectory(cfg.trajectory, cfg.room, derive_seed(cfg.master_seed, stream::trajectory));
  MonteCarloResult result;
  result.records.resize(cfg.n_trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.n_trials && !failed.load();) {
      try {
        auto rec = run_trial(cfg, path[i % path.size()], trial_seed(cfg.master_seed, i));
        rec.trial = i;
        result.records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, cfg.n_trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  result.stats = summarize(result.records);
  return result;
}

inline std::vector<SweepRow> snr_sweep(const ScenarioConfig& cfg, const std::vector<double>& snr_list_db,
                                       std::size_t threads = 1) {
  if (snr_list_db.empty()) throw Error(Errc::invalid_config, "snr list must not be empty");
  std::vector<SweepRow> rows;
  rows.reserve(snr_list_db.size());
  for (double snr : snr_list_db) {
    ScenarioConfig c = cfg;
    c.channel.snr_db = snr;
    rows.push_back({snr, monte_carlo(c, threads).stats});
  }
  return rows;
}

}  // namespace rail
