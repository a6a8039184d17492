#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lumen/cost.hpp"
#include "lumen/estimator.hpp"
#include "lumen/mapper.hpp"
#include "lumen/simulator.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace lumen {
namespace {

using testing::estimator_for;
using testing::group_by_led;
using testing::observations_of;

const CameraIntrinsics kCam{320.0, 240.0, 600.0};

// Observation whose polar pair is exactly (d, phi) with zero yaw.
Observation polar_observation(Vec2 cam, double d, double phi, const std::string& key = "a") {
  const PixelPoint px{kCam.c_x + d * std::sin(phi), kCam.c_y + d * std::cos(phi)};
  return make_observation(px, 0.0, kCam, {cam.x, cam.y, 0.0}, LedKey(key), 0.0);
}

TEST(AcceptAlternative, ThresholdIsStrict) {
  Observation obs = polar_observation({1.2, 3.4}, 0.0, 0.0);
  EXPECT_EQ(accept_alternative(obs, 40.0), (Vec2{1.2, 3.4}));
  obs.d_obs = 40.0;
  EXPECT_FALSE(accept_alternative(obs, 40.0).has_value());
  obs.d_obs = 39.9;
  EXPECT_EQ(accept_alternative(obs, 40.0), (Vec2{1.2, 3.4}));
}

TEST(RoughPosition, Examples) {
  EstimatorConfig cfg;
  LedTrack track;
  EXPECT_FALSE(rough_position(track, cfg).has_value());
  track.alt_positions = {{2, 3}};
  EXPECT_EQ(rough_position(track, cfg), (Vec2{2, 3}));
  track.alt_positions = {{1, 1}, {1, 1}, {1, 1}};
  EXPECT_EQ(rough_position(track, cfg), (Vec2{1, 1}));
  track.alt_positions.assign(30, Vec2{0, 0});
  track.alt_positions.push_back({10, 10});
  EXPECT_EQ(rough_position(track, cfg), (Vec2{0, 0}));
}

TEST(SampleK, Examples) {
  Observation obs = polar_observation({1.0, 0.0}, 100.0, 0.3);
  EXPECT_DOUBLE_EQ(*sample_k(obs, {0.0, 0.0}, 1e-3), 100.0);
  obs.cam2_pose_pre = {1e-9, 0.0, 0.0};
  EXPECT_FALSE(sample_k(obs, {0.0, 0.0}, 1e-3).has_value());
}

TEST(SampleK, NoiseFreeScaleIsFocalOverHeight) {
  sim::ScenarioConfig sc = sim::default_scenario();
  sc.leds = {{"a", 1.0, 0.0, 2.4}};  // H2 = 2.0
  const auto cfg = estimator_for(sc);
  const auto obs = observations_of(sim::synthesize_log(sc).records, cfg);
  ASSERT_GE(obs.size(), 50u);
  int counted = 0;
  for (const auto& o : obs) {
    if (auto k = sample_k(o, {1.0, 0.0}, cfg.distance_epsilon)) {
      EXPECT_NEAR(*k, 300.0, 1e-9);
      ++counted;
    }
  }
  EXPECT_GE(counted, 50);
}

TEST(RefineK, Examples) {
  EstimatorConfig cfg;
  LedTrack track;
  EXPECT_FALSE(refine_k(track, cfg).has_value());
  track.k_samples = {300, 300, 300};
  EXPECT_EQ(*refine_k(track, cfg), 300.0);
  track.k_samples = {250};
  EXPECT_EQ(*refine_k(track, cfg), 250.0);
  track.k_samples.assign(30, 300.0);
  track.k_samples.push_back(3000.0);
  EXPECT_EQ(*refine_k(track, cfg), 300.0);
}

TEST(EstimateHeight, Examples) {
  EXPECT_DOUBLE_EQ(estimate_height(500, 1000, 0.3), 2.3);
  EXPECT_DOUBLE_EQ(estimate_height(300, 600, 0.5), 2.5);
  EXPECT_NEAR(estimate_height(1e9, 600, 0.5), 0.5, 1e-6);
  EXPECT_THROW(estimate_height(0.0, 600, 0.5), std::invalid_argument);
  EXPECT_THROW(estimate_height(-1.0, 600, 0.5), std::invalid_argument);
}

TEST(Posterior, Examples) {
  const auto a = posterior({0, 0}, {3, 4}, 500.0, 1e-3);
  ASSERT_TRUE(a);
  EXPECT_DOUBLE_EQ(a->distance, 2500.0);
  EXPECT_NEAR(a->bearing, std::atan2(-3.0, -4.0), 1e-12);
  EXPECT_NEAR(a->bearing, -2.498, 1e-3);

  const auto b = posterior({0, 1}, {0, 0}, 1.0, 1e-3);
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->distance, 1.0);
  EXPECT_EQ(b->bearing, 0.0);

  EXPECT_FALSE(posterior({0, 0}, {0, 1e-4}, 1.0, 1e-3).has_value());
}

TEST(Posterior, ReproducesNoiseFreeObservation) {
  sim::ScenarioConfig sc = sim::default_scenario();
  sc.cam1_to_cam2 = {0.05, 0.02, 0.4};
  const auto cfg = estimator_for(sc);
  const auto obs = observations_of(sim::synthesize_log(sc).records, cfg);
  for (const auto& o : obs) {
    const auto& led = *std::find_if(sc.leds.begin(), sc.leds.end(),
                                    [&](const auto& l) { return l.led == o.led_key.value; });
    const double k = sc.intrinsics.f / (led.h - sc.cam_height_h1);
    const auto pos = posterior(o.cam2_pose_pre.position(), {led.x, led.y}, k, 1e-3);
    if (!pos) {
      continue;
    }
    ASSERT_NEAR(pos->distance, o.d_obs, 1e-9);
    ASSERT_NEAR(wrap_angle(pos->bearing - o.phi_obs), 0.0, 1e-9);
  }
}

TEST(Residual, WrapsAngleDifference) {
  const Vec2 p{0.0, 0.0};
  const Vec2 cam{std::sin(3.1), std::cos(3.1)};  // bearing(cam - p) = 3.1
  Observation obs = polar_observation(cam, 1.0, -3.1);
  ASSERT_NEAR(obs.phi_obs, -3.1, 1e-12);
  const auto r = residual(obs, p, 1.0, 1e-3);
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->ang, -6.2 + kTwoPi, 1e-12);
  EXPECT_NEAR(r->ang, 0.0832, 1e-4);
  EXPECT_NEAR(r->dist, 0.0, 1e-12);
}

TEST(Residual, UndefinedBearingContributesNoAngle) {
  const Observation obs = polar_observation({1.0, 1.0}, 0.0, 0.0);
  ASSERT_FALSE(obs.bearing_defined);
  const auto r = residual(obs, {0.3, -0.2}, 300.0, 1e-3);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ang, 0.0);
  EXPECT_TRUE(r->ang_jacobian.isZero());
  EXPECT_FALSE(residual(obs, {1.0, 1.0}, 300.0, 1e-3).has_value());
}

TEST(CostJ1, Examples) {
  EstimatorConfig cfg;
  LedTrack track;
  track.k_refined = 200.0;
  // LED at (1, 2); the camera sits 0.5 m along bearing 0.7 from it.
  const Vec2 led{1.0, 2.0};
  const Vec2 cam = led + Vec2{0.5 * std::sin(0.7), 0.5 * std::cos(0.7)};
  track.observations = {polar_observation(cam, 100.0, 0.7)};
  EXPECT_NEAR(cost_j1(track, led, cfg), 0.0, 1e-20);

  track.observations.push_back(polar_observation({0.0, 0.0}, 250.0, -1.0));
  const Vec2 p{0.4, 0.9};
  const double single = cost_j1(track, p, cfg);
  track.observations.insert(track.observations.end(), track.observations.begin(),
                            track.observations.end());
  EXPECT_NEAR(cost_j1(track, p, cfg), 2.0 * single, 1e-9 * single);
}

TEST(CostJ1, RejectsUnusableTracks) {
  EstimatorConfig cfg;
  LedTrack track;
  track.observations = {polar_observation({0.0, 0.0}, 10.0, 0.0)};
  EXPECT_THROW(cost_j1(track, {1, 1}, cfg), std::invalid_argument);
  track.k_refined = 300.0;
  EXPECT_THROW(cost_j1(track, {0, 0}, cfg), std::invalid_argument);
}

TEST(CostJ1, AnalyticGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> radius(0.0, 2.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  int checked = 0;
  while (checked < 100) {
    EstimatorConfig cfg;
    const LedTrack track = testing::random_noisy_track(rng, cfg);
    ASSERT_TRUE(track.k_refined && track.rough_position);
    for (int i = 0; i < 5; ++i) {
      const double r = radius(rng);
      const double a = angle(rng);
      const Vec2 p = *track.rough_position + Vec2{r * std::cos(a), r * std::sin(a)};
      if (!testing::smooth_cost_point(track, p, cfg)) {
        continue;
      }
      const auto analytic = evaluate_cost(track.observations, p, *track.k_refined, cfg.solver,
                                          cfg.distance_epsilon)
                                .gradient;
      const auto numeric = testing::central_difference_gradient(track, p, cfg);
      const double rel = (analytic - numeric).norm() / std::max(numeric.norm(), 1.0);
      ASSERT_LT(rel, 1e-6) << "at (" << p.x << ", " << p.y << ")";
      ++checked;
    }
  }
}

TEST(SolvePosition, NoiseFreeScenarioRecoversTruth) {
  const sim::ScenarioConfig sc = sim::default_scenario();
  const auto cfg = estimator_for(sc);
  const auto tracks = testing::batch_tracks(observations_of(sim::synthesize_log(sc).records, cfg), cfg);
  ASSERT_EQ(tracks.size(), 4u);
  for (const auto& track : tracks) {
    const auto& led = *std::find_if(sc.leds.begin(), sc.leds.end(),
                                    [&](const auto& l) { return l.led == track.led_key.value; });
    ASSERT_TRUE(track.optimized_position && track.last_solve);
    EXPECT_TRUE(track.last_solve->converged);
    EXPECT_LT((*track.optimized_position - Vec2{led.x, led.y}).norm(), 1e-6);
    EXPECT_NEAR(*track.height, led.h, 1e-9);
  }
}

TEST(SolvePosition, FixedPointConvergesImmediately) {
  const sim::ScenarioConfig sc = sim::default_scenario();
  const auto cfg = estimator_for(sc);
  const auto tracks = testing::batch_tracks(observations_of(sim::synthesize_log(sc).records, cfg), cfg);
  for (const auto& track : tracks) {
    const auto again = solve_position(track, cfg, track.optimized_position);
    EXPECT_TRUE(again.converged);
    EXPECT_LE(again.iterations, 2);
    EXPECT_EQ(again.status, SolveStatus::kStepTolerance);
    EXPECT_LT((again.position - *track.optimized_position).norm(), 1e-9);
  }
}

TEST(SolvePosition, BeatsBruteForceGrid) {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 3; ++trial) {
    EstimatorConfig cfg;
    const LedTrack track = testing::random_noisy_track(rng, cfg);
    ASSERT_TRUE(track.optimized_position);
    const double solved = cost_j1(track, *track.optimized_position, cfg);
    const auto grid = testing::grid_minimum(track, *track.rough_position, cfg);
    EXPECT_LE(solved, grid.cost);
  }
}

TEST(SolvePosition, AcceptedCostsNeverIncrease) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    EstimatorConfig cfg;
    LedTrack track = testing::random_noisy_track(rng, cfg);
    // Start far away so the solver has to work.
    const auto r = solve_position(track, cfg, *track.rough_position + Vec2{0.6, -0.5});
    ASSERT_GE(r.accepted_costs.size(), 2u);
    for (std::size_t i = 1; i < r.accepted_costs.size(); ++i) {
      ASSERT_LE(r.accepted_costs[i], r.accepted_costs[i - 1]);
    }
  }
}

TEST(SolvePosition, SingularSystemFallsBackToRoughPosition) {
  EstimatorConfig cfg;
  cfg.solver.angle_weight = 0.0;
  LedTrack track;
  track.led_key = LedKey("a");
  // Every camera on the x axis: only the x direction is constrained.
  for (double x : {1.0, 2.0, 3.0}) {
    track.observations.push_back(polar_observation({x, 0.0}, 300.0 * x, kPi / 2));
  }
  track.rough_position = Vec2{0.0, 0.0};
  track.k_refined = 300.0;
  const auto r = solve_position(track, cfg);
  EXPECT_EQ(r.status, SolveStatus::kSingular);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.position, (Vec2{0.0, 0.0}));
}

TEST(SolvePosition, RequiresInputs) {
  EstimatorConfig cfg;
  LedTrack track;
  EXPECT_THROW(solve_position(track, cfg), std::invalid_argument);
}

TEST(Update, FirstCloseObservationSetsRoughPosition) {
  EstimatorConfig cfg;
  LedTrack track;
  track.led_key = LedKey("a");
  update(track, polar_observation({0.7, -0.2}, 10.0, 0.1), cfg);
  ASSERT_EQ(track.alt_positions.size(), 1u);
  EXPECT_EQ(track.rough_position, (Vec2{0.7, -0.2}));
  EXPECT_FALSE(track.optimized_position.has_value());
}

TEST(Update, SolveGatedByObservationCount) {
  const sim::ScenarioConfig sc = sim::default_scenario();
  auto cfg = estimator_for(sc);
  cfg.min_obs_for_solve = 1000;
  const auto obs = observations_of(sim::synthesize_log(sc).records, cfg);
  LedMapper mapper(cfg);
  for (const auto& o : obs) {
    mapper.ingest(o);
  }
  for (const auto& [key, track] : mapper.tracks()) {
    EXPECT_FALSE(track.optimized_position.has_value());
    EXPECT_TRUE(track.height.has_value());
  }
  const auto built = mapper.build_map();
  EXPECT_TRUE(built.entries.empty());
  EXPECT_EQ(built.skipped.size(), 4u);
}

TEST(Update, RejectsForeignKey) {
  EstimatorConfig cfg;
  LedTrack track;
  track.led_key = LedKey("a");
  EXPECT_THROW(update(track, polar_observation({0, 0}, 1.0, 0.0, "b"), cfg),
               std::invalid_argument);
}

TEST(Update, IncrementalMatchesBatch) {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 5; ++trial) {
    const sim::ScenarioConfig sc = testing::random_lattice_scenario(rng);
    const auto cfg = estimator_for(sc);
    const auto obs = observations_of(sim::synthesize_log(sc).records, cfg);
    LedMapper mapper(cfg);
    for (const auto& o : obs) {
      mapper.ingest(o);
    }
    for (const auto& [key, list] : group_by_led(obs)) {
      const LedTrack batch = process_batch(key, list, cfg);
      const LedTrack& streamed = mapper.tracks().at(key);
      ASSERT_TRUE(batch.optimized_position && streamed.optimized_position);
      EXPECT_LT((*batch.optimized_position - *streamed.optimized_position).norm(), 1e-9);
      EXPECT_NEAR(*batch.height, *streamed.height, 1e-9);
    }
  }
}

TEST(Estimator, NoiseFreeExactnessOnLatticeScenarios) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    sim::ScenarioConfig sc = testing::random_lattice_scenario(rng);
    const auto cfg = estimator_for(sc);
    const auto tracks =
        testing::batch_tracks(observations_of(sim::synthesize_log(sc).records, cfg), cfg);
    ASSERT_EQ(tracks.size(), sc.leds.size());
    for (const auto& track : tracks) {
      const auto& led = *std::find_if(sc.leds.begin(), sc.leds.end(),
                                      [&](const auto& l) { return l.led == track.led_key.value; });
      const double k_true = sc.intrinsics.f / (led.h - sc.cam_height_h1);
      for (double k : track.k_samples) {
        ASSERT_NEAR(k, k_true, 1e-9 * k_true);
      }
      ASSERT_NEAR(*track.height, led.h, 1e-9);
      ASSERT_LT((*track.optimized_position - Vec2{led.x, led.y}).norm(), 1e-6);
    }
  }
}

TEST(Estimator, TranslationEquivariance) {
  sim::ScenarioConfig sc = sim::default_scenario();
  sc.noise = {2.0, 0.01, 0.02, 0.0, 42};
  const auto cfg = estimator_for(sc);
  const auto records = sim::synthesize_log(sc).records;
  const Vec2 offset{12.25, -7.5};
  auto shifted = records;
  for (auto& r : shifted) {
    r.x += offset.x;
    r.y += offset.y;
  }
  const auto base = testing::batch_tracks(observations_of(records, cfg), cfg);
  const auto moved = testing::batch_tracks(observations_of(shifted, cfg), cfg);
  ASSERT_EQ(base.size(), moved.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Vec2 delta = *moved[i].optimized_position - *base[i].optimized_position;
    EXPECT_NEAR(delta.x, offset.x, 1e-6);
    EXPECT_NEAR(delta.y, offset.y, 1e-6);
    EXPECT_NEAR(*moved[i].height, *base[i].height, 1e-6);
  }
}

TEST(Estimator, KeyLabelsAreOpaque) {
  sim::ScenarioConfig sc = sim::default_scenario();
  sc.noise = {2.0, 0.01, 0.02, 0.0, 7};
  const auto cfg = estimator_for(sc);
  auto records = sim::synthesize_log(sc).records;
  const std::map<std::string, std::string> relabel{
      {"led-a", "zz"}, {"led-b", "aa"}, {"led-c", "mm"}, {"led-d", "bb"}};

  LedMapper original(cfg);
  for (const auto& o : observations_of(records, cfg)) original.ingest(o);
  for (auto& r : records) r.led = relabel.at(r.led);
  LedMapper renamed(cfg);
  for (const auto& o : observations_of(records, cfg)) renamed.ingest(o);

  const auto a = original.build_map().entries;
  const auto b = renamed.build_map().entries;
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 4u);
  for (const auto& e : a) {
    const auto& twin = *std::find_if(b.begin(), b.end(),
                                     [&](const auto& x) { return x.led == relabel.at(e.led); });
    EXPECT_EQ(e.x_hat, twin.x_hat);
    EXPECT_EQ(e.y_hat, twin.y_hat);
    EXPECT_EQ(e.height, twin.height);
  }
  EXPECT_TRUE(std::is_sorted(b.begin(), b.end(),
                             [](const auto& x, const auto& y) { return x.led < y.led; }));
}

TEST(BuildMap, Examples) {
  EstimatorConfig cfg;
  EXPECT_TRUE(build_map(std::span<const LedTrack>{}, cfg).entries.empty());

  const sim::ScenarioConfig sc = sim::default_scenario();
  cfg = estimator_for(sc);
  auto tracks = testing::batch_tracks(observations_of(sim::synthesize_log(sc).records, cfg), cfg);
  LedTrack thin;
  thin.led_key = LedKey("thin");
  thin.observations = {polar_observation({0, 0}, 5.0, 0.0, "thin")};
  tracks.push_back(thin);

  const auto built = build_map(tracks, cfg);
  ASSERT_EQ(built.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(built.entries[i].led, sc.leds[i].led);
    EXPECT_NEAR(built.entries[i].height, sc.leds[i].h, 1e-9);
    EXPECT_GE(built.entries[i].n_observations, cfg.min_obs_for_solve);
    EXPECT_LT(built.entries[i].rms_residual, 1e-6);
  }
  ASSERT_EQ(built.skipped.size(), 1u);
  EXPECT_EQ(built.skipped[0].led, "thin");
}

}  // namespace
}  // namespace lumen
