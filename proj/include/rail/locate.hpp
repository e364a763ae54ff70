#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rail/channel.hpp"
#include "rail/error.hpp"
#include "rail/geometry.hpp"
#include "rail/seeding.hpp"

namespace rail {

struct BeaconSet {
  std::vector<Vec3> positions{{2.5, 0.0, 1.5}, {5.0, 2.5, 2.5}, {2.5, 5.0, 2.0}, {0.0, 5.0, 3.0}};

  std::size_t size() const noexcept { return positions.size(); }
};

struct PositionEstimate {
  Vec3 xyz_m = Vec3::Zero();
  std::optional<double> z_fused_m;
  double residual_m = 0.0;
};

struct HeightSensorModel {
  double room_height_m = 4.0;
  double timing_noise_std_s = 3.0e-5;
  std::uint64_t seed = 0;
};

namespace detail {

/// Linearized range equations against the last beacon:
///   A row k = 2 (p_n - p_k),  b_k = d_k^2 - d_n^2 - |p_k|^2 + |p_n|^2.
inline void build_linear_system(std::span<const Vec3> beacons, std::span<const double> distances, Eigen::MatrixXd& a,
                                Eigen::VectorXd& b) {
  const std::size_t n = beacons.size();
  const Vec3& pn = beacons[n - 1];
  const double dn = distances[n - 1];
  a.resize(static_cast<Eigen::Index>(n - 1), 3);
  b.resize(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec3& pk = beacons[k];
    const auto row = static_cast<Eigen::Index>(k);
    a.row(row) = 2.0 * (pn - pk).transpose();
    b(row) = distances[k] * distances[k] - dn * dn - pk.squaredNorm() + pn.squaredNorm();
  }
}

}  // namespace detail

inline double range_residual(std::span<const Vec3> beacons, std::span<const double> distances, const Vec3& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    const double r = (p - beacons[i]).norm() - distances[i];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(beacons.size()));
}

/// Least-squares position from beacon ranges, solved by column-pivoted
/// Householder QR rather than forming (A^T A)^-1 A^T.
inline PositionEstimate trilaterate(const BeaconSet& beacons, std::span<const double> distances) {
  if (beacons.size() < 4) throw Error(Errc::invalid_count, "trilateration needs at least 4 beacons");
  if (distances.size() != beacons.size()) throw Error(Errc::dimension, "one distance per beacon required");
  for (double d : distances) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw Error(Errc::invalid_range, "distances must be finite and >= 0");
  }
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  detail::build_linear_system(beacons.positions, distances, a, b);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw Error(Errc::degenerate_geometry, "beacon geometry is rank deficient (coplanar beacons?)");
  const Vec3 x = qr.solve(b);
  return {x, std::nullopt, range_residual(beacons.positions, distances, x)};
}

inline double height_from_ceiling(double round_trip_t, double c, double room_height) {
  const double d = c * round_trip_t / 2.0;
  if (!(d >= 0.0)) throw Error(Errc::out_of_room, "negative ceiling distance");
  if (d > room_height) throw Error(Errc::out_of_room, "ceiling distance " + std::to_string(d) + " m exceeds room height");
  return room_height - d;
}

/// Upward-facing time-of-flight sensor with Gaussian timing jitter.
inline double simulate_height_sensor(double true_z, const HeightSensorModel& model, std::uint64_t trial_seed,
                                     double c = 340.0) {
  const double h = model.room_height_m;
  if (!(h > 0.0)) throw Error(Errc::invalid_config, "room height must be positive");
  if (!(model.timing_noise_std_s >= 0.0)) throw Error(Errc::invalid_config, "height timing noise std must be >= 0");
  if (!(true_z > 0.0 && true_z < h)) throw Error(Errc::out_of_room, "true height outside (0, H)");
  double t = 2.0 * (h - true_z) / c;
  if (model.timing_noise_std_s > 0.0) {
    std::mt19937_64 rng(derive_seed(model.seed, {stream::height, trial_seed}));
    t += model.timing_noise_std_s * detail::standard_normal(rng);
  }
  const double t_max = 2.0 * h / c;
  return height_from_ceiling(std::clamp(t, 0.0, t_max), c, h);
}

/// Fixed-gain complementary filter.
inline double fuse_z(double z_trilat, double z_sensor, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::invalid_parameter, "fusion alpha must lie in [0, 1]");
  const double z = alpha * z_sensor + (1.0 - alpha) * z_trilat;
  return std::clamp(z, std::min(z_trilat, z_sensor), std::max(z_trilat, z_sensor));
}

}  // namespace rail
