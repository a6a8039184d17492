#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "lumen/estimator.hpp"
#include "lumen/io.hpp"
#include "lumen/mapper.hpp"
#include "lumen/simulator.hpp"

namespace lumen::testing {

inline EstimatorConfig estimator_for(const sim::ScenarioConfig& sc) {
  EstimatorConfig cfg;
  cfg.intrinsics = sc.intrinsics;
  cfg.cam_height_h1 = sc.cam_height_h1;
  cfg.cam1_to_cam2 = sc.cam1_to_cam2;
  return cfg;
}

inline std::vector<Observation> observations_of(const std::vector<ObservationRecord>& records,
                                                const EstimatorConfig& cfg) {
  std::vector<Observation> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(io::to_observation(r, cfg.intrinsics, cfg.cam1_to_cam2));
  }
  return out;
}

inline std::map<LedKey, std::vector<Observation>> group_by_led(
    const std::vector<Observation>& obs) {
  std::map<LedKey, std::vector<Observation>> out;
  for (const auto& o : obs) {
    out[o.led_key].push_back(o);
  }
  return out;
}

/// Runs every LED of a log through one-shot batch processing.
inline std::vector<LedTrack> batch_tracks(const std::vector<Observation>& obs,
                                          const EstimatorConfig& cfg) {
  std::vector<LedTrack> out;
  for (const auto& [key, list] : group_by_led(obs)) {
    out.push_back(process_batch(key, list, cfg));
  }
  return out;
}

/// Lawnmower scenario with randomized LED heights and positions. Every LED
/// sits on a Cam2 sample point in the interior of a straight lane, so the
/// noise-free rough position is exact.
inline sim::ScenarioConfig random_lattice_scenario(std::mt19937_64& rng, int n_leds = 4) {
  sim::ScenarioConfig sc = sim::default_scenario();
  std::uniform_int_distribution<int> lane_dist(0, 3);
  std::uniform_int_distribution<int> step_dist(5, 35);  // 0.5 .. 3.5 m along the lane
  std::uniform_real_distribution<double> height_dist(2.0, 3.0);
  std::uniform_real_distribution<double> h1_dist(0.3, 0.6);
  sc.cam_height_h1 = h1_dist(rng);
  sc.leds.clear();
  std::map<std::pair<int, int>, bool> used;
  while (static_cast<int>(sc.leds.size()) < n_leds) {
    const int lane = lane_dist(rng);
    const int step = step_dist(rng);
    if (used[{lane, step}]) {
      continue;
    }
    used[{lane, step}] = true;
    sc.leds.push_back({"led-" + std::to_string(sc.leds.size()), step * 0.1, lane * 1.0,
                       height_dist(rng)});
  }
  return sc;
}

}  // namespace lumen::testing
