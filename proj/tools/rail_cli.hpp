#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rail/harness.hpp"
#include "rail/scenario_io.hpp"
#include "rail/selftest.hpp"

namespace rail::cli {

enum ExitCode : int { ok = 0, selftest_failed = 1, config_error = 2, io_error = 3 };

struct CommonArgs {
  std::string scenario_path;
  std::string output_dir = "./out";
  std::vector<std::string> overrides;
  std::size_t threads = default_thread_count();
};

inline void add_common(CLI::App& sub, CommonArgs& args) {
  sub.add_option("--scenario,-s", args.scenario_path, "scenario file (key = value); defaults apply when omitted");
  sub.add_option("--output-dir,-o", args.output_dir, "directory for CSV output")->capture_default_str();
  sub.add_option("--override", args.overrides, "key=value, repeatable");
  sub.add_option("--threads,-j", args.threads, "worker threads; affects speed only")->check(CLI::PositiveNumber);
}

inline ScenarioConfig load_config(const CommonArgs& args) {
  ScenarioConfig cfg = args.scenario_path.empty() ? ScenarioConfig{} : load_scenario(args.scenario_path);
  for (const auto& o : args.overrides) apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

inline std::string prepare_output(const CommonArgs& args, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(args.output_dir, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory '" + args.output_dir + "': " + ec.message());
  return (std::filesystem::path(args.output_dir) / file).string();
}

inline int cmd_simulate(const CommonArgs& args, std::ostream& out) {
  const auto cfg = load_config(args);
  const auto path = prepare_output(args, "trials.csv");
  const auto result = monte_carlo(cfg, args.threads);
  write_csv(result.records, cfg.beacons.size(), path);
  out << format_stats(result.stats);
  out << "wrote " << path << "\n";
  return ok;
}

inline int cmd_sweep_snr(const CommonArgs& args, const std::string& snr_list, std::ostream& out) {
  const auto cfg = load_config(args);
  const std::string trimmed = detail::trim(snr_list);
  if (trimmed.empty()) throw Error(Errc::invalid_config, "--snr: list must not be empty");
  const auto snrs = detail::parse_list("--snr", trimmed);
  const auto path = prepare_output(args, "sweep.csv");
  const auto rows = snr_sweep(cfg, snrs, args.threads);
  write_csv(rows, path);
  out << "snr_db      mean_err_3d  mean_err_3d_fused\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-10s  %-11s  %s\n", detail::csv_float(r.snr_db).c_str(),
                  detail::csv_float(r.stats.err_3d.mean).c_str(), detail::csv_float(r.stats.err_3d_fused.mean).c_str());
    out << buf;
  }
  out << "wrote " << path << "\n";
  return ok;
}

/// One trial per trajectory point, in path order.
inline int cmd_trajectory(const CommonArgs& args, std::ostream& out) {
  auto cfg = load_config(args);
  cfg.n_trials = cfg.trajectory.n_points;
  const auto path = prepare_output(args, "trajectory.csv");
  const auto result = monte_carlo(cfg, args.threads);
  write_trajectory_csv(result.records, path);
  out << format_stats(result.stats);
  out << "wrote " << path << "\n";
  return ok;
}

inline int cmd_selftest(std::ostream& out) {
  const auto checks = run_selftest();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    out << (c.ok ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
    if (!c.ok) failed.push_back(c.name);
  }
  if (failed.empty()) {
    out << "selftest: " << checks.size() << " checks passed\n";
    return ok;
  }
  out << "selftest: failed:";
  for (const auto& f : failed) out << " " << f;
  out << "\n";
  return selftest_failed;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Acoustic FH-CDMA indoor localization simulator"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string snr_list;

  auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo scenario, write trials.csv");
  add_common(*simulate, args);
  auto* sweep = app.add_subcommand("sweep-snr", "repeat the scenario per SNR, write sweep.csv");
  add_common(*sweep, args);
  sweep->add_option("--snr", snr_list, "comma separated SNR list in dB")->required();
  auto* trajectory = app.add_subcommand("trajectory", "localize each trajectory point, write trajectory.csv");
  add_common(*trajectory, args);
  auto* selftest = app.add_subcommand("selftest", "check the analytic invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(args, out);
    if (sweep->parsed()) return cmd_sweep_snr(args, snr_list, out);
    if (trajectory->parsed()) return cmd_trajectory(args, out);
    if (selftest->parsed()) return cmd_selftest(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::io ? io_error : config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
  return config_error;
}

}  // namespace rail::cli
