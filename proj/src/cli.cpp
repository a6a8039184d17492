#include "lumen/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lumen/evaluation.hpp"
#include "lumen/io.hpp"
#include "lumen/mapper.hpp"
#include "lumen/simulator.hpp"

namespace lumen::cli {

namespace {

namespace fs = std::filesystem;

// Failure carrying the exit code and the category printed to the user.
struct CliFailure {
  ExitCode code;
  std::string category;
  std::string message;
};

spdlog::logger& logger() {
  static auto instance = std::make_shared<spdlog::logger>(
      "lumen", std::make_shared<spdlog::sinks::stderr_sink_st>());
  return *instance;
}

void configure_logging() {
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("LUMEN_LOG_LEVEL")) {
    const std::string v(env);
    if (v == "error") {
      level = spdlog::level::err;
    } else if (v == "warn") {
      level = spdlog::level::warn;
    } else if (v == "info") {
      level = spdlog::level::info;
    } else if (v == "debug") {
      level = spdlog::level::debug;
    } else {
      logger().warn("ignoring LUMEN_LOG_LEVEL='{}' (expected error, warn, info or debug)", v);
    }
  }
  logger().set_level(level);
  logger().set_pattern("lumen [%l] %v");
}

fs::path default_truth_path(const fs::path& log_path) {
  fs::path p = log_path;
  p.replace_extension(".truth.json");
  return p;
}

template <typename Fn>
auto with_input(const fs::path& path, Fn&& fn) {
  std::istringstream in(io::read_file(path));
  return fn(in);
}

template <typename Fn>
void write_output(const fs::path& path, Fn&& fn) {
  std::ostringstream out;
  fn(out);
  io::write_file_atomic(path, out.str());
}

void cmd_simulate(const fs::path& scenario_path, const fs::path& log_path,
                  std::optional<fs::path> truth_path, std::optional<std::uint64_t> seed) {
  sim::ScenarioConfig cfg =
      with_input(scenario_path, [](std::istream& in) { return io::read_scenario(in); });
  if (seed) {
    cfg.noise.seed = *seed;
  }
  const sim::SimulationResult result = sim::synthesize_log(cfg);
  if (result.warning) {
    logger().warn("{}", *result.warning);
  }
  const fs::path truth = truth_path.value_or(default_truth_path(log_path));
  write_output(log_path, [&](std::ostream& out) { io::write_log(out, result.records); });
  write_output(truth, [&](std::ostream& out) { io::write_truth(out, result.truth); });
  std::cout << "wrote " << result.records.size() << " observations to " << log_path.string()
            << " and " << result.truth.size() << " LEDs to " << truth.string() << '\n';
}

void cmd_map(const fs::path& log_path, const fs::path& config_path, const fs::path& map_path,
             bool lenient) {
  const EstimatorConfig cfg =
      with_input(config_path, [](std::istream& in) { return io::read_estimator_config(in); });
  io::ParseOptions options;
  options.strict = !lenient;
  const io::ParsedLog parsed = with_input(log_path, [&](std::istream& in) {
    return io::parse_log(in, cfg.intrinsics, cfg.cam1_to_cam2, options);
  });
  for (const auto& issue : parsed.skipped) {
    logger().warn("skipped line {}: {}", issue.line, issue.message);
  }
  for (const auto& w : parsed.warnings) {
    logger().warn("{}", w);
  }
  if (parsed.observations.empty()) {
    throw CliFailure{kNoObservations, "no observations",
                     "log '" + log_path.string() + "' contains no usable records"};
  }

  LedMapper mapper(cfg);
  for (const auto& obs : parsed.observations) {
    mapper.ingest(obs);
  }
  MapBuildResult built = mapper.build_map();
  for (const auto& s : built.skipped) {
    logger().warn("LED '{}' not mapped: {}", s.led, s.reason);
  }
  if (built.entries.empty()) {
    throw CliFailure{kEstimationFailed, "estimation failed", "no LED could be mapped"};
  }
  logger().info("mapped {} LEDs from {} observations", built.entries.size(),
                parsed.observations.size());
  const io::MapFile map = io::make_map_file(cfg, std::move(built.entries));
  write_output(map_path, [&](std::ostream& out) { io::write_map(out, map); });
  std::cout << "mapped " << map.leds.size() << " LEDs to " << map_path.string() << '\n';
}

void cmd_evaluate(const fs::path& map_path, const fs::path& truth_path,
                  const fs::path& report_path) {
  const io::MapFile map =
      with_input(map_path, [](std::istream& in) { return io::read_map(in); });
  const auto truth = with_input(truth_path, [](std::istream& in) { return io::read_truth(in); });
  const eval::EvaluationReport report = eval::evaluate(map.leds, truth);
  for (const auto& key : report.unmapped) {
    logger().warn("ground-truth LED '{}' has no map entry", key);
  }
  write_output(report_path, [&](std::ostream& out) { eval::write_report(out, report); });
  std::cout << "LEDs evaluated: " << report.per_led.size() << '\n'
            << "mean 3-D error: " << report.mean_3d << " m\n";
  for (const auto& p : report.percentiles) {
    std::cout << "p" << p.percent << " 3-D error: " << p.error_m << " m\n";
  }
}

void cmd_report(const fs::path& report_path, const fs::path& csv_path) {
  const eval::EvaluationReport report =
      with_input(report_path, [](std::istream& in) { return eval::read_report(in); });
  write_output(csv_path, [&](std::ostream& out) { eval::write_cdf_csv(out, report.cdf); });
}

int fail(const CliFailure& f) {
  std::cerr << "lumen: " << f.category << ": " << f.message << '\n';
  return f.code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  configure_logging();

  CLI::App app{"LED mapping from upward-camera observations", "lumen"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string log_out;
  std::string truth_out;
  std::optional<std::uint64_t> seed;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic observation log");
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("-o,--output", log_out, "Observation log to write")->required();
  simulate->add_option("--truth", truth_out,
                       "Ground-truth sidecar (default: <log>.truth.json)");
  simulate->add_option("--seed", seed, "Override the scenario noise seed");

  std::string log_in;
  std::string config_path;
  std::string map_out;
  bool lenient = false;
  auto* map = app.add_subcommand("map", "Estimate the LED map from an observation log");
  map->add_option("log", log_in, "Observation log")->required();
  map->add_option("-c,--config", config_path, "Estimator config JSON")->required();
  map->add_option("-o,--output", map_out, "Map file to write")->required();
  map->add_flag("--lenient", lenient, "Skip malformed log lines instead of aborting");

  std::string map_in;
  std::string truth_in;
  std::string report_out;
  auto* evaluate = app.add_subcommand("evaluate", "Compare a map against ground truth");
  evaluate->add_option("map", map_in, "Map file")->required();
  evaluate->add_option("truth", truth_in, "Ground-truth sidecar")->required();
  evaluate->add_option("-o,--output", report_out, "Evaluation report to write")->required();

  std::string report_in;
  std::string csv_out;
  auto* report = app.add_subcommand("report", "Export the error CDF as CSV");
  report->add_option("report", report_in, "Evaluation report")->required();
  report->add_option("-o,--output", csv_out, "CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (simulate->parsed()) {
      cmd_simulate(scenario_path, log_out,
                   truth_out.empty() ? std::nullopt : std::optional<fs::path>(truth_out), seed);
    } else if (map->parsed()) {
      cmd_map(log_in, config_path, map_out, lenient);
    } else if (evaluate->parsed()) {
      cmd_evaluate(map_in, truth_in, report_out);
    } else if (report->parsed()) {
      cmd_report(report_in, csv_out);
    }
  } catch (const CliFailure& f) {
    return fail(f);
  } catch (const io::IoError& e) {
    return fail({kIoFailure, "io error", e.what()});
  } catch (const io::FormatError& e) {
    return fail({kInvalidInput, "invalid input", e.what()});
  } catch (const std::invalid_argument& e) {
    return fail({kInvalidInput, "invalid input", e.what()});
  } catch (const std::exception& e) {
    return fail({kEstimationFailed, "internal error", e.what()});
  }
  return kOk;
}

}  // namespace lumen::cli
