#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lumen/estimator.hpp"
#include "lumen/geometry.hpp"
#include "lumen/mapper.hpp"
#include "lumen/records.hpp"
#include "lumen/simulator.hpp"

namespace lumen::io {

inline constexpr int kLogSchemaVersion = 1;
inline constexpr int kMapSchemaVersion = 1;
inline constexpr const char* kLogSchemaName = "lumen-observation-log";
inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed or unsupported file content. `line` is 1-based when known.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what, std::optional<std::size_t> line = std::nullopt);
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Observation log: optional schema header line, then one JSON object per line
// with fields t, led, u, v, yaw, x, y, theta.

struct ParseOptions {
  // Strict mode throws on the first malformed line; lenient mode skips it.
  bool strict{true};
};

struct ParseIssue {
  std::size_t line{0};
  std::string message;
};

struct LogReadResult {
  std::vector<ObservationRecord> records;
  std::vector<ParseIssue> skipped;
  std::vector<std::string> warnings;
};

LogReadResult read_log(std::istream& in, const ParseOptions& options = {});
void write_log(std::ostream& out, std::span<const ObservationRecord> records);

/// Converts VO poses through the fixed transform and derives (d_obs, phi_obs).
Observation to_observation(const ObservationRecord& rec, const CameraIntrinsics& intrinsics,
                           const FixedTransform2D& cam1_to_cam2);

struct ParsedLog {
  std::vector<Observation> observations;
  std::vector<ParseIssue> skipped;
  std::vector<std::string> warnings;
};

ParsedLog parse_log(std::istream& in, const CameraIntrinsics& intrinsics,
                    const FixedTransform2D& cam1_to_cam2, const ParseOptions& options = {});

// ---------------------------------------------------------------------------
// Ground-truth sidecar: JSON array of {led, x, y, h}.

std::vector<GroundTruthLed> read_truth(std::istream& in);
void write_truth(std::ostream& out, std::span<const GroundTruthLed> leds);

// ---------------------------------------------------------------------------
// Map file.

struct MapHeader {
  int schema_version{kMapSchemaVersion};
  std::string tool_version{kToolVersion};
  CameraIntrinsics intrinsics;
  double cam_height_h1{0.0};
  FixedTransform2D cam1_to_cam2;
  EstimatorConfig config;

  bool operator==(const MapHeader&) const = default;
};

struct MapFile {
  MapHeader header;
  std::vector<LedMapEntry> leds;

  bool operator==(const MapFile&) const = default;
};

MapFile make_map_file(const EstimatorConfig& cfg, std::vector<LedMapEntry> entries);
MapFile read_map(std::istream& in);
void write_map(std::ostream& out, const MapFile& map);

// ---------------------------------------------------------------------------
// Scenario and estimator configuration files. Missing fields take defaults.

sim::ScenarioConfig read_scenario(std::istream& in);
void write_scenario(std::ostream& out, const sim::ScenarioConfig& cfg);

EstimatorConfig read_estimator_config(std::istream& in);
void write_estimator_config(std::ostream& out, const EstimatorConfig& cfg);

// ---------------------------------------------------------------------------
// File helpers.

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace lumen::io
