#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lumen/estimator.hpp"

namespace lumen {

/// Final 3-D estimate for one LED.
struct LedMapEntry {
  std::string led;
  double x_hat{0.0};
  double y_hat{0.0};
  double height{0.0};
  std::size_t n_observations{0};
  double rms_residual{0.0};

  bool operator==(const LedMapEntry&) const = default;
};

struct SkippedTrack {
  std::string led;
  std::string reason;
};

struct MapBuildResult {
  std::vector<LedMapEntry> entries;  // sorted by LED key
  std::vector<SkippedTrack> skipped;
};

/// Entries for every track with a converged position and a height; the rest
/// are listed in `skipped` with a reason.
MapBuildResult build_map(std::span<const LedTrack> tracks, const EstimatorConfig& cfg);

/// Routes observations to per-LED tracks and keeps each track current.
class LedMapper {
 public:
  explicit LedMapper(EstimatorConfig cfg);

  void ingest(const Observation& obs);

  const EstimatorConfig& config() const { return cfg_; }
  const std::map<LedKey, LedTrack>& tracks() const { return tracks_; }
  std::vector<LedTrack> track_list() const;
  MapBuildResult build_map() const;

 private:
  EstimatorConfig cfg_;
  std::map<LedKey, LedTrack> tracks_;
};

}  // namespace lumen
