#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rail/error.hpp"
#include "rail/harness.hpp"

// Scenario files are plain `key = value` lines; `#` starts a comment. Lists
// are comma separated, point lists separate points with `;`. Unknown keys are
// rejected. The same keys are accepted by `--override key=value`.

namespace rail {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] inline void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(Errc::invalid_config, key + ": cannot parse '" + value + "' (" + why + ")");
}

inline double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf" || v == "none" || v == "off") return std::numeric_limits<double>::infinity();
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || std::isnan(d)) bad_value(key, v, "expected a number");
  return d;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-') bad_value(key, v, "expected a non-negative integer");
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "expected a non-negative integer");
  return static_cast<std::uint64_t>(u);
}

inline int parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long l = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "expected an integer");
  return static_cast<int>(l);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "expected true/false");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
  return out;
}

inline Vec3 parse_vec3(const std::string& key, const std::string& v) {
  const auto xs = parse_list(key, v);
  if (xs.size() != 3) bad_value(key, v, "expected x,y,z");
  return {xs[0], xs[1], xs[2]};
}

inline std::string fmt_double(double d) {
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, d);
    if (std::strtod(shorter, nullptr) == d) return shorter;
  }
  return buf;
}

inline std::string fmt_vec3(const Vec3& p) {
  return fmt_double(p.x()) + "," + fmt_double(p.y()) + "," + fmt_double(p.z());
}

inline std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt_double(xs[i]);
  return out;
}

inline TrajectoryKind parse_kind(const std::string& key, const std::string& v) {
  if (v == "static") return TrajectoryKind::static_point;
  if (v == "line") return TrajectoryKind::line;
  if (v == "circle") return TrajectoryKind::circle;
  if (v == "random-waypoint") return TrajectoryKind::random_waypoint;
  bad_value(key, v, "expected static|line|circle|random-waypoint");
}

struct ScenarioKey {
  const char* name;
  const char* doc;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

inline const std::vector<ScenarioKey>& scenario_keys() {
  using S = ScenarioConfig;
  using V = const std::string&;
  static const std::vector<ScenarioKey> keys = {
      {"room_dims", "room extent Lx,Ly,Lz in m",
       [](S& c, V k, V v) { c.room.dims_m = parse_vec3(k, v); }, [](const S& c) { return fmt_vec3(c.room.dims_m); }},
      {"speed_of_sound_mps", "speed of sound in m/s",
       [](S& c, V k, V v) { c.room.speed_of_sound_mps = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.room.speed_of_sound_mps); }},
      {"beacons", "beacon positions x,y,z; separated by ';'",
       [](S& c, V k, V v) {
         c.beacons.positions.clear();
         for (const auto& p : split(v, ';')) c.beacons.positions.push_back(parse_vec3(k, p));
       },
       [](const S& c) {
         std::string out;
         for (std::size_t i = 0; i < c.beacons.size(); ++i) out += (i ? "; " : "") + fmt_vec3(c.beacons.positions[i]);
         return out;
       }},
      {"sample_rate_hz", "sampling rate in Hz",
       [](S& c, V k, V v) { c.waveform.sample_rate_hz = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.waveform.sample_rate_hz); }},
      {"hop_centers_hz", "hop center frequencies in Hz",
       [](S& c, V k, V v) { c.waveform.hop_centers_hz = parse_list(k, v); },
       [](const S& c) { return fmt_list(c.waveform.hop_centers_hz); }},
      {"hop_bandwidth_hz", "bandwidth of one hop channel in Hz",
       [](S& c, V k, V v) { c.waveform.hop_bandwidth_hz = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.waveform.hop_bandwidth_hz); }},
      {"chip_duration_s", "chip duration in s",
       [](S& c, V k, V v) { c.waveform.chip_duration_s = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.waveform.chip_duration_s); }},
      {"code_length", "spreading code length (codebook order)",
       [](S& c, V k, V v) { c.waveform.code_length = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.waveform.code_length); }},
      {"n_symbols", "symbols per ranging burst",
       [](S& c, V k, V v) { c.waveform.n_symbols = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.waveform.n_symbols); }},
      {"phase_rad", "carrier phase offset in rad",
       [](S& c, V k, V v) { c.waveform.phase_rad = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.waveform.phase_rad); }},
      {"snr_db", "receiver SNR in dB, inf disables noise",
       [](S& c, V k, V v) { c.channel.snr_db = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.channel.snr_db); }},
      {"multipath_enabled", "true/false",
       [](S& c, V k, V v) { c.channel.multipath_enabled = parse_bool(k, v); },
       [](const S& c) { return std::string(c.channel.multipath_enabled ? "true" : "false"); }},
      {"reflection_order", "image-method order 0, 1 or 2",
       [](S& c, V k, V v) { c.channel.reflection_order = parse_int(k, v); },
       [](const S& c) { return std::to_string(c.channel.reflection_order); }},
      {"reflection_coeff", "wall reflection coefficient in [0,1]",
       [](S& c, V k, V v) { c.channel.reflection_coeff = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.channel.reflection_coeff); }},
      {"rayleigh_fading", "true/false, Rayleigh gain per reflected path",
       [](S& c, V k, V v) { c.channel.rayleigh_fading = parse_bool(k, v); },
       [](const S& c) { return std::string(c.channel.rayleigh_fading ? "true" : "false"); }},
      {"max_doppler_hz", "maximum Doppler shift in Hz (inert: fading is static per burst)",
       [](S& c, V k, V v) { c.channel.max_doppler_hz = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.channel.max_doppler_hz); }},
      {"channel_seed", "extra seed mixed into fading and noise streams",
       [](S& c, V k, V v) { c.channel.seed = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.channel.seed); }},
      {"height_timing_noise_std_s", "ceiling sensor round-trip timing noise std in s",
       [](S& c, V k, V v) { c.height_sensor.timing_noise_std_s = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.height_sensor.timing_noise_std_s); }},
      {"height_seed", "extra seed for the ceiling sensor noise",
       [](S& c, V k, V v) { c.height_sensor.seed = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.height_sensor.seed); }},
      {"fusion_alpha", "weight of the ceiling sensor in the fused height, [0,1]",
       [](S& c, V k, V v) { c.fusion_alpha = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.fusion_alpha); }},
      {"n_trials", "Monte Carlo trial count",
       [](S& c, V k, V v) { c.n_trials = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.n_trials); }},
      {"master_seed", "root of every random stream",
       [](S& c, V k, V v) { c.master_seed = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.master_seed); }},
      {"trajectory_kind", "static | line | circle | random-waypoint",
       [](S& c, V k, V v) { c.trajectory.kind = parse_kind(k, v); },
       [](const S& c) { return std::string(to_string(c.trajectory.kind)); }},
      {"trajectory_point", "static: x,y,z",
       [](S& c, V k, V v) { c.trajectory.point = parse_vec3(k, v); },
       [](const S& c) { return fmt_vec3(c.trajectory.point); }},
      {"trajectory_start", "line: start x,y,z",
       [](S& c, V k, V v) { c.trajectory.start = parse_vec3(k, v); },
       [](const S& c) { return fmt_vec3(c.trajectory.start); }},
      {"trajectory_end", "line: end x,y,z",
       [](S& c, V k, V v) { c.trajectory.end = parse_vec3(k, v); },
       [](const S& c) { return fmt_vec3(c.trajectory.end); }},
      {"trajectory_center", "circle: center x,y",
       [](S& c, V k, V v) {
         const auto xs = parse_list(k, v);
         if (xs.size() != 2) bad_value(k, v, "expected x,y");
         c.trajectory.center_x = xs[0];
         c.trajectory.center_y = xs[1];
       },
       [](const S& c) { return fmt_double(c.trajectory.center_x) + "," + fmt_double(c.trajectory.center_y); }},
      {"trajectory_radius", "circle: radius in m",
       [](S& c, V k, V v) { c.trajectory.radius = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.trajectory.radius); }},
      {"trajectory_height", "circle: height in m",
       [](S& c, V k, V v) { c.trajectory.height = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.trajectory.height); }},
      {"trajectory_waypoints", "random-waypoint: waypoint count",
       [](S& c, V k, V v) { c.trajectory.waypoints = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.trajectory.waypoints); }},
      {"trajectory_points", "points generated along the trajectory",
       [](S& c, V k, V v) { c.trajectory.n_points = parse_u64(k, v); },
       [](const S& c) { return std::to_string(c.trajectory.n_points); }},
      {"trajectory_margin", "minimum distance of trajectory points from any face, m",
       [](S& c, V k, V v) { c.trajectory.margin_m = parse_double(k, v); },
       [](const S& c) { return fmt_double(c.trajectory.margin_m); }},
  };
  return keys;
}

}  // namespace detail

inline void set_scenario_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : detail::scenario_keys()) {
    if (key == k.name) {
      k.set(cfg, key, value);
      return;
    }
  }
  throw Error(Errc::invalid_config, "unknown key '" + key + "'");
}

/// `key=value`.
inline void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(Errc::invalid_config, "override '" + assignment + "' is not key=value");
  set_scenario_value(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

/// Starts from defaults; every key present overrides one field.
inline ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::invalid_config, "line " + std::to_string(lineno) + ": expected key = value");
    }
    set_scenario_value(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot read scenario file '" + path + "'");
  return parse_scenario(in);
}

/// Every key with its current value and a one-line description.
inline std::string format_scenario(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& k : detail::scenario_keys()) {
    out += "# ";
    out += k.doc;
    out += "\n";
    out += k.name;
    out += " = " + k.get(cfg) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output. Floats use 6 decimals; non-finite values print as `nan`/`inf`.

namespace detail {

inline std::string csv_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for '" + path + "'");
}

}  // namespace detail

inline std::string trials_csv(const std::vector<TrialRecord>& records, std::size_t n_beacons) {
  std::string out =
      "trial,seed,snr_db,true_x,true_y,true_z,est_x,est_y,est_z,est_z_fused,err_x,err_y,err_z,err_z_fused,err_3d,"
      "err_3d_fused";
  for (std::size_t i = 1; i <= n_beacons; ++i) out += ",d_err_" + std::to_string(i);
  out += "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    auto f = [&](double v) { return "," + detail::csv_float(r.ok ? v : nan); };
    out += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + detail::csv_float(r.snr_db);
    for (int a = 0; a < 3; ++a) out += "," + detail::csv_float(r.true_pos[a]);
    out += f(r.est_pos.x()) + f(r.est_pos.y()) + f(r.est_pos.z()) + f(r.est_pos_fused.z());
    out += f(r.err_x) + f(r.err_y) + f(r.err_z) + f(r.err_z_fused) + f(r.err_3d) + f(r.err_3d_fused);
    for (std::size_t i = 0; i < n_beacons; ++i) out += "," + detail::csv_float(i < r.d_err.size() ? r.d_err[i] : nan);
    out += "\n";
  }
  return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "snr_db,n_trials,mean_err_3d,mean_err_3d_fused,mean_err_xy,mean_err_z,mean_err_z_fused,p95_err_3d\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out += detail::csv_float(r.snr_db) + "," + std::to_string(s.n_trials) + "," + detail::csv_float(s.err_3d.mean) + "," +
           detail::csv_float(s.err_3d_fused.mean) + "," + detail::csv_float(s.err_xy.mean) + "," +
           detail::csv_float(s.err_z.mean) + "," + detail::csv_float(s.err_z_fused.mean) + "," +
           detail::csv_float(s.err_3d.p95) + "\n";
  }
  return out;
}

/// Pairs each trajectory point with its unfused estimate.
inline std::string trajectory_csv(const std::vector<TrialRecord>& records) {
  std::string out = "idx,true_x,true_y,true_z,est_x,est_y,est_z\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    for (int a = 0; a < 3; ++a) out += "," + detail::csv_float(r.true_pos[a]);
    for (int a = 0; a < 3; ++a) out += "," + detail::csv_float(r.ok ? r.est_pos[a] : nan);
    out += "\n";
  }
  return out;
}

inline void write_csv(const std::vector<TrialRecord>& records, std::size_t n_beacons, const std::string& path) {
  detail::write_file(path, trials_csv(records, n_beacons));
}

inline void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  detail::write_file(path, sweep_csv(rows));
}

inline void write_trajectory_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  detail::write_file(path, trajectory_csv(records));
}

/// Human-readable summary, one column per line.
inline std::string format_stats(const SummaryStats& s) {
  std::string out = "trials " + std::to_string(s.n_trials) + " (failed " + std::to_string(s.n_failed) + ")\n";
  out += "column            mean        median      p95\n";
  auto row = [&](const char* name, const ColumnStats& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s  %-10s  %-10s  %-10s\n", name, detail::csv_float(c.mean).c_str(),
                  detail::csv_float(c.median).c_str(), detail::csv_float(c.p95).c_str());
    out += buf;
  };
  row("err_x", s.err_x);
  row("err_y", s.err_y);
  row("err_z", s.err_z);
  row("err_z_fused", s.err_z_fused);
  row("err_xy", s.err_xy);
  row("err_3d", s.err_3d);
  row("err_3d_fused", s.err_3d_fused);
  row("d_err", s.d_err);
  return out;
}

}  // namespace rail
