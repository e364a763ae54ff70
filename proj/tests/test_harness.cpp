#include <gtest/gtest.h>

#include <cmath>

#include "rail/harness.hpp"

using namespace rail;

namespace {

ScenarioConfig quiet_config(std::size_t n_trials) {
  ScenarioConfig cfg;
  cfg.channel.multipath_enabled = false;
  cfg.channel.snr_db = std::numeric_limits<double>::infinity();
  cfg.n_trials = n_trials;
  cfg.trajectory.waypoints = n_trials;
  cfg.trajectory.n_points = n_trials;
  return cfg;
}

bool same_record(const TrialRecord& a, const TrialRecord& b) {
  auto eq = [](const Vec3& x, const Vec3& y) {
    for (int i = 0; i < 3; ++i) {
      if (!(x[i] == y[i] || (std::isnan(x[i]) && std::isnan(y[i])))) return false;
    }
    return true;
  };
  return a.trial == b.trial && a.seed == b.seed && a.ok == b.ok && eq(a.true_pos, b.true_pos) &&
         eq(a.est_pos, b.est_pos) && eq(a.est_pos_fused, b.est_pos_fused) && a.err_3d == b.err_3d &&
         a.err_3d_fused == b.err_3d_fused && a.d_err == b.d_err;
}

}  // namespace

TEST(Trajectory, LineInterpolates) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::line;
  s.start = {1, 1, 1};
  s.end = {4, 4, 3};
  s.n_points = 3;
  const auto pts = generate_trajectory(s, RoomGeometry{}, 0);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_LT((pts[0] - Vec3(1, 1, 1)).norm(), 1e-12);
  EXPECT_LT((pts[1] - Vec3(2.5, 2.5, 2)).norm(), 1e-12);
  EXPECT_LT((pts[2] - Vec3(4, 4, 3)).norm(), 1e-12);
}

TEST(Trajectory, CircleOutsideMarginRejected) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::circle;
  s.center_x = s.center_y = 2.5;
  s.radius = 3.0;
  try {
    generate_trajectory(s, RoomGeometry{}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_config);
  }
  s.radius = 2.1;
  const auto pts = generate_trajectory(s, RoomGeometry{}, 0);
  for (const auto& p : pts) EXPECT_NEAR(std::hypot(p.x() - 2.5, p.y() - 2.5), 2.1, 1e-12);
}

TEST(Trajectory, StaticRepeatsPoint) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::static_point;
  s.point = {2.5, 2.5, 1};
  s.n_points = 5;
  const auto pts = generate_trajectory(s, RoomGeometry{}, 0);
  ASSERT_EQ(pts.size(), 5u);
  for (const auto& p : pts) EXPECT_EQ(p, Vec3(2.5, 2.5, 1));
}

TEST(Trajectory, RandomWaypointRespectsMarginAndSeed) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::random_waypoint;
  s.waypoints = 7;
  s.n_points = 50;
  const RoomGeometry room;
  const auto a = generate_trajectory(s, room, 3);
  ASSERT_EQ(a.size(), 50u);
  for (const auto& p : a) EXPECT_TRUE(room.contains_with_margin(p, s.margin_m));
  EXPECT_EQ(a, generate_trajectory(s, room, 3));
  EXPECT_NE(a, generate_trajectory(s, room, 4));
}

TEST(RunTrial, QuantizationFloorWithoutChannelImpairments) {
  const auto cfg = quiet_config(1);
  for (const Vec3& p : {Vec3(2.5, 2.5, 1.0), Vec3(0.4, 4.1, 3.6), Vec3(4.6, 0.3, 0.3)}) {
    const auto r = run_trial(cfg, p, 17);
    ASSERT_TRUE(r.ok);
    for (double d : r.d_err) EXPECT_LE(d, 0.5e-3 + 1e-12);
    // Whole-sample arrivals: the estimate is the exact fix for millimetre-rounded ranges.
    std::vector<double> rounded;
    for (const auto& b : cfg.beacons.positions) rounded.push_back(std::round((b - p).norm() * 1e3) / 1e3);
    EXPECT_LE((r.est_pos - trilaterate(cfg.beacons, rounded).xyz_m).norm(), 1e-9);
  }
}

TEST(RunTrial, DeterministicAndValidated) {
  ScenarioConfig cfg;
  cfg.channel.snr_db = 5.0;
  const auto a = run_trial(cfg, {1.2, 3.4, 2.2}, 99);
  const auto b = run_trial(cfg, {1.2, 3.4, 2.2}, 99);
  EXPECT_TRUE(same_record(a, b));
  try {
    run_trial(cfg, {1.2, 5.4, 2.2}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::out_of_room);
  }
}

TEST(RunTrial, ErrorColumnsAreConsistent) {
  ScenarioConfig cfg;
  cfg.channel.snr_db = 0.0;
  const Vec3 p{3.0, 2.0, 1.7};
  const auto r = run_trial(cfg, p, 5);
  ASSERT_TRUE(r.ok);
  EXPECT_DOUBLE_EQ(r.err_3d, (r.est_pos - p).norm());
  EXPECT_DOUBLE_EQ(r.err_3d_fused, (r.est_pos_fused - p).norm());
  EXPECT_DOUBLE_EQ(r.err_z, std::abs(r.est_pos.z() - p.z()));
  EXPECT_EQ(r.est_pos_fused.x(), r.est_pos.x());
  EXPECT_EQ(r.d_err.size(), 4u);
}

TEST(MonteCarlo, SingleTrialStatsEqualThatTrial) {
  auto cfg = quiet_config(1);
  cfg.channel.snr_db = 10.0;
  const auto mc = monte_carlo(cfg);
  ASSERT_EQ(mc.records.size(), 1u);
  EXPECT_EQ(mc.stats.n_trials, 1u);
  EXPECT_EQ(mc.stats.err_3d.mean, mc.records[0].err_3d);
  EXPECT_EQ(mc.stats.err_3d.median, mc.records[0].err_3d);
  EXPECT_EQ(mc.stats.err_3d.p95, mc.records[0].err_3d);
  EXPECT_EQ(mc.stats.err_z_fused.mean, mc.records[0].err_z_fused);
}

TEST(MonteCarlo, LongerRunExtendsShorterRun) {
  ScenarioConfig cfg;
  cfg.channel.snr_db = 10.0;
  cfg.trajectory.waypoints = 5;
  cfg.trajectory.n_points = 5;
  cfg.n_trials = 6;
  const auto shorter = monte_carlo(cfg);
  cfg.n_trials = 12;
  const auto longer = monte_carlo(cfg);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(same_record(shorter.records[i], longer.records[i])) << i;
  // Points cycle through the trajectory.
  EXPECT_EQ(longer.records[7].true_pos, longer.records[2].true_pos);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  ScenarioConfig cfg;
  cfg.channel.snr_db = 5.0;
  cfg.n_trials = 16;
  const auto one = monte_carlo(cfg, 1);
  const auto four = monte_carlo(cfg, 4);
  for (std::size_t i = 0; i < cfg.n_trials; ++i) EXPECT_TRUE(same_record(one.records[i], four.records[i]));
  EXPECT_EQ(one.stats.err_3d.mean, four.stats.err_3d.mean);
}

TEST(MonteCarlo, NoiseOffMeanWithinQuantizationFloor) {
  const auto cfg = quiet_config(100);
  const auto mc = monte_carlo(cfg);
  EXPECT_EQ(mc.stats.n_failed, 0u);
  EXPECT_LE(mc.stats.err_3d.mean, 2e-3);
  for (const auto& r : mc.records) {
    EXPECT_TRUE((r.est_pos.array() >= -0.01).all() && (r.est_pos.array() <= cfg.room.dims_m.array() + 0.01).all())
        << r.trial;
  }
}

TEST(Summary, QuantilesAndFailureCounting) {
  std::vector<TrialRecord> recs(5);
  for (int i = 0; i < 5; ++i) recs[static_cast<std::size_t>(i)].err_3d = i;  // 0..4
  recs[4].ok = false;
  const auto s = summarize(recs);
  EXPECT_EQ(s.n_trials, 4u);
  EXPECT_EQ(s.n_failed, 1u);
  EXPECT_DOUBLE_EQ(s.err_3d.mean, 1.5);
  EXPECT_DOUBLE_EQ(s.err_3d.median, 1.5);
  EXPECT_DOUBLE_EQ(s.err_3d.p95, 2.85);
}

TEST(SnrSweep, ShapeAndConsistency) {
  ScenarioConfig cfg;
  cfg.n_trials = 8;
  cfg.trajectory.waypoints = 8;
  cfg.trajectory.n_points = 8;
  const auto one = snr_sweep(cfg, {20.0});
  ASSERT_EQ(one.size(), 1u);
  auto at20 = cfg;
  at20.channel.snr_db = 20.0;
  EXPECT_EQ(one[0].stats.err_3d.mean, monte_carlo(at20).stats.err_3d.mean);

  const auto rows = snr_sweep(cfg, {0.0, 20.0, 20.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].stats.err_3d.mean, rows[2].stats.err_3d.mean);
  EXPECT_LE(rows[1].stats.err_3d.mean, rows[0].stats.err_3d.mean);
  EXPECT_THROW(snr_sweep(cfg, {}), Error);
}

TEST(Scenario, ValidationNamesOffendingKey) {
  ScenarioConfig cfg;
  cfg.waveform.code_length = 8;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("code_length"), std::string::npos);
  }
  ScenarioConfig outside;
  outside.beacons.positions[0] = {2.5, -0.1, 1.5};
  EXPECT_THROW(outside.validate(), Error);
}
