#include "lumen/mapper.hpp"

#include <algorithm>
#include <cmath>

#include "lumen/cost.hpp"

namespace lumen {

MapBuildResult build_map(std::span<const LedTrack> tracks, const EstimatorConfig& cfg) {
  MapBuildResult out;
  for (const auto& track : tracks) {
    const std::string& key = track.led_key.value;
    if (track.observations.size() < cfg.min_obs_for_solve) {
      out.skipped.push_back({key, "fewer than min_obs_for_solve observations"});
      continue;
    }
    if (!track.rough_position) {
      out.skipped.push_back({key, "no observation passed the alternative-position threshold"});
      continue;
    }
    if (!track.height || !track.k_refined) {
      out.skipped.push_back({key, "no usable scale samples"});
      continue;
    }
    if (!track.optimized_position || !track.last_solve) {
      out.skipped.push_back({key, "position was never solved"});
      continue;
    }
    if (!track.last_solve->converged) {
      out.skipped.push_back(
          {key, std::string("solver did not converge (") +
                    to_string(track.last_solve->status) + ")"});
      continue;
    }

    const auto eval = evaluate_cost(track.observations, *track.optimized_position,
                                    *track.k_refined, cfg.solver, cfg.distance_epsilon);
    LedMapEntry entry;
    entry.led = key;
    entry.x_hat = track.optimized_position->x;
    entry.y_hat = track.optimized_position->y;
    entry.height = *track.height;
    entry.n_observations = track.observations.size();
    entry.rms_residual =
        eval.used > 0 ? std::sqrt(2.0 * eval.cost / static_cast<double>(eval.used)) : 0.0;
    out.entries.push_back(std::move(entry));
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const LedMapEntry& a, const LedMapEntry& b) { return a.led < b.led; });
  std::sort(out.skipped.begin(), out.skipped.end(),
            [](const SkippedTrack& a, const SkippedTrack& b) { return a.led < b.led; });
  return out;
}

LedMapper::LedMapper(EstimatorConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void LedMapper::ingest(const Observation& obs) {
  auto [it, inserted] = tracks_.try_emplace(obs.led_key);
  if (inserted) {
    it->second.led_key = obs.led_key;
  }
  update(it->second, obs, cfg_);
}

std::vector<LedTrack> LedMapper::track_list() const {
  std::vector<LedTrack> out;
  out.reserve(tracks_.size());
  for (const auto& [key, track] : tracks_) {
    out.push_back(track);
  }
  return out;
}

MapBuildResult LedMapper::build_map() const {
  const auto list = track_list();
  return lumen::build_map(list, cfg_);
}

}  // namespace lumen
