#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rail/scenario_io.hpp"

using namespace rail;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(ScenarioFile, EmptyFileYieldsDefaults) {
  const auto cfg = parse_scenario_text("# nothing\n\n");
  const ScenarioConfig def;
  EXPECT_EQ(format_scenario(cfg), format_scenario(def));
}

TEST(ScenarioFile, ParsesEveryValueKind) {
  const auto cfg = parse_scenario_text(
      "room_dims = 6, 5.5, 3\n"
      "beacons = 3,0,1.5; 6,2.5,2.5 ; 3,5.5,2; 0,5.5,2.9  # trailing comment\n"
      "snr_db = inf\n"
      "multipath_enabled = false\n"
      "reflection_order = 2\n"
      "trajectory_kind = circle\n"
      "trajectory_center = 3,2.5\n"
      "master_seed = 18446744073709551615\n");
  EXPECT_EQ(cfg.room.dims_m, Vec3(6, 5.5, 3));
  ASSERT_EQ(cfg.beacons.size(), 4u);
  EXPECT_EQ(cfg.beacons.positions[3], Vec3(0, 5.5, 2.9));
  EXPECT_TRUE(std::isinf(cfg.channel.snr_db));
  EXPECT_FALSE(cfg.channel.multipath_enabled);
  EXPECT_EQ(cfg.channel.reflection_order, 2);
  EXPECT_EQ(cfg.trajectory.kind, TrajectoryKind::circle);
  EXPECT_EQ(cfg.trajectory.center_x, 3.0);
  EXPECT_EQ(cfg.master_seed, 18446744073709551615ull);
}

TEST(ScenarioFile, UnknownKeyRejectedWithName) {
  try {
    parse_scenario_text("snr_db = 3\nbogus_key = 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_config);
    EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
  }
}

TEST(ScenarioFile, MalformedValuesRejected) {
  for (const char* text : {"n_trials = -3\n", "snr_db = loud\n", "room_dims = 1,2\n", "rayleigh_fading = maybe\n",
                           "trajectory_kind = spiral\n", "just a line\n", "fusion_alpha = 0.5x\n"}) {
    EXPECT_THROW(parse_scenario_text(text), Error) << text;
  }
}

TEST(ScenarioFile, FormatParseRoundTrip) {
  // Random configurations survive format -> parse unchanged.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig cfg;
    cfg.room.dims_m = Vec3(4 + u(rng), 4 + u(rng), 3 + u(rng));
    cfg.channel.snr_db = -5 + 30 * u(rng);
    cfg.channel.reflection_coeff = u(rng);
    cfg.channel.rayleigh_fading = u(rng) < 0.5;
    cfg.fusion_alpha = u(rng);
    cfg.master_seed = rng();
    cfg.height_sensor.timing_noise_std_s = 1e-4 * u(rng);
    cfg.beacons.positions[1] = Vec3(u(rng), u(rng), u(rng));
    cfg.trajectory.kind = static_cast<TrajectoryKind>(i % 4);
    const std::string text = format_scenario(cfg);
    EXPECT_EQ(format_scenario(parse_scenario_text(text)), text);
    const auto back = parse_scenario_text(text);
    EXPECT_EQ(back.channel.snr_db, cfg.channel.snr_db);
    EXPECT_EQ(back.room.dims_m, cfg.room.dims_m);
    EXPECT_EQ(back.master_seed, cfg.master_seed);
  }
}

TEST(Overrides, ApplyAndValidate) {
  ScenarioConfig cfg;
  apply_override(cfg, "n_trials=1");
  apply_override(cfg, " fusion_alpha = 0.25 ");
  apply_override(cfg, "snr_db=-3");
  EXPECT_EQ(cfg.n_trials, 1u);
  EXPECT_EQ(cfg.fusion_alpha, 0.25);
  EXPECT_EQ(cfg.channel.snr_db, -3.0);
  EXPECT_THROW(apply_override(cfg, "n_trials"), Error);
  EXPECT_THROW(apply_override(cfg, "nope=1"), Error);
}

TEST(Csv, TrialsHeaderAndRowFormat) {
  TrialRecord r;
  r.trial = 3;
  r.seed = 42;
  r.snr_db = 10;
  r.true_pos = {1, 2, 3};
  r.est_pos = {1.0001, 2, 3};
  r.est_pos_fused = {1.0001, 2, 3.0004};
  r.err_x = 0.0001;
  r.d_err = {0.001, 0, 0, 0};
  TrialRecord failed = r;
  failed.ok = false;
  const auto out = lines(trials_csv({r, failed}, 4));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0],
            "trial,seed,snr_db,true_x,true_y,true_z,est_x,est_y,est_z,est_z_fused,err_x,err_y,err_z,err_z_fused,err_3d,"
            "err_3d_fused,d_err_1,d_err_2,d_err_3,d_err_4");
  EXPECT_EQ(out[1],
            "3,42,10.000000,1.000000,2.000000,3.000000,1.000100,2.000000,3.000000,3.000400,0.000100,0.000000,0.000000,"
            "0.000000,0.000000,0.000000,0.001000,0.000000,0.000000,0.000000");
  EXPECT_NE(out[2].find(",nan,"), std::string::npos);
}

TEST(Csv, SweepAndTrajectoryHeaders) {
  EXPECT_EQ(lines(sweep_csv({}))[0],
            "snr_db,n_trials,mean_err_3d,mean_err_3d_fused,mean_err_xy,mean_err_z,mean_err_z_fused,p95_err_3d");
  EXPECT_EQ(lines(trajectory_csv({}))[0], "idx,true_x,true_y,true_z,est_x,est_y,est_z");
}

TEST(Csv, WriteFailureCarriesPath) {
  try {
    write_csv(std::vector<SweepRow>{}, "/nonexistent-dir/sweep.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/sweep.csv"), std::string::npos);
  }
}

TEST(ScenarioFile, ShippedScenariosLoadAndValidate) {
  const std::filesystem::path dir = RAIL_SCENARIO_DIR;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".scn") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_scenario(entry.path().string()).validate());
    ++n;
  }
  EXPECT_GE(n, 1u);
  const auto def = load_scenario((dir / "default.scn").string());
  EXPECT_EQ(format_scenario(def), format_scenario(ScenarioConfig{}));
}
