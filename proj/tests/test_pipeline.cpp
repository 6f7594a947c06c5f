#include "corrsync/pipeline.hpp"
#include "corrsync/toy_models.hpp"
#include "doctest.h"

using namespace corrsync;

namespace {

PipelineConfig small_config(int frames) {
  PipelineConfig cfg;
  cfg.n_frames = frames;
  cfg.steps = 20;
  cfg.window_a = {0, 7};
  cfg.window_b = {4, 13};
  cfg.latent_height = cfg.latent_width = 16;
  cfg.decoder = "linear2x";
  cfg.predictor = "seeded-noise";
  return cfg;
}

}  // namespace

TEST_CASE("a single frame never aligns or guides") {
  auto cfg = small_config(1);
  const auto cond = synth_scene(SyntheticSceneSpec::figure(32, 32, 1, 0, 0, 1));
  const auto res = run_pipeline(cfg, cond, SeededNoisePredictor(1), Linear2xDecoder());
  CHECK(res.trace.events.empty());
  CHECK(res.frames.size() == 1);
  CHECK(res.trace.predictor_calls == std::vector<int>{20});
}

TEST_CASE("default windows fire 40 alignments and 50 guidance steps per later frame") {
  PipelineConfig cfg;
  cfg.latent_height = cfg.latent_width = 8;
  cfg.decoder = "identity";
  cfg.predictor = "seeded-noise";
  const auto cond = synth_scene(SyntheticSceneSpec::figure(32, 32, 3, 0, 1, 2));
  const auto res = run_pipeline(cfg, cond, SeededNoisePredictor(0), IdentityDecoder());
  CHECK(res.trace.count(EventKind::align, 1) == 0);
  CHECK(res.trace.count(EventKind::guide, 1) == 0);
  for (int i = 2; i <= 3; ++i) {
    CHECK(res.trace.count(EventKind::align, i) == 40);
    CHECK(res.trace.count(EventKind::guide, i) == 50);
  }
  for (const auto& e : res.trace.events) {
    if (e.kind == EventKind::align) CHECK((e.progress >= 0 && e.progress <= 39));
    if (e.kind == EventKind::guide) CHECK((e.progress >= 20 && e.progress <= 69));
  }
  CHECK(res.trace.to_json()["events"].size() == 180);
}

TEST_CASE("static scene with a zero predictor yields identical frames") {
  PipelineConfig cfg = small_config(3);
  cfg.decoder = "identity";
  cfg.predictor = "zero";
  const auto cond = synth_scene(SyntheticSceneSpec::figure(16, 16, 3, 0, 0, 5));
  const auto res = run_pipeline(cfg, cond, ZeroPredictor(), IdentityDecoder());
  CHECK(res.frames[1] == res.frames[0]);
  CHECK(res.frames[2] == res.frames[0]);
  CHECK(evaluate_consistency(res, cond).h_mse == 0.0);
}

TEST_CASE("runs are deterministic and share the initial latent") {
  const auto cfg = small_config(3);
  const auto cond = synth_scene(SyntheticSceneSpec::figure(32, 32, 3, 0, 2, 6));
  const SeededNoisePredictor pred(cfg.seed);
  const Linear2xDecoder dec;
  const auto a = run_pipeline(cfg, cond, pred, dec);
  const auto b = run_pipeline(cfg, cond, pred, dec);
  CHECK(a.frames == b.frames);
  CHECK(a.trace == b.trace);
  CHECK(a.initial_latents[1] == a.initial_latents[0]);
  CHECK(a.initial_latents[2] == a.initial_latents[0]);
}

TEST_CASE("alignment and guidance reduce inconsistency") {
  auto cfg = small_config(3);
  const auto cond = synth_scene(SyntheticSceneSpec::figure(32, 32, 3, 0, 2, 7));
  const SeededNoisePredictor pred(3);
  const Linear2xDecoder dec;
  const double full = evaluate_consistency(run_pipeline(cfg, cond, pred, dec), cond).h_mse;
  cfg.enable_alignment = cfg.enable_guidance = false;
  const auto base_run = run_pipeline(cfg, cond, pred, dec);
  CHECK(base_run.trace.events.empty());
  const double base = evaluate_consistency(base_run, cond).h_mse;
  CHECK(full < base);
}

TEST_CASE("configuration validation") {
  const auto cond = synth_scene(SyntheticSceneSpec::figure(32, 32, 2, 0, 0, 1));
  auto cfg = small_config(3);
  CHECK_THROWS_AS(run_pipeline(cfg, cond, ZeroPredictor(), Linear2xDecoder()), Error);
  cfg = small_config(2);
  cfg.window_a = {0, 20};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config(2);
  cfg.decoder = "nope";
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config(2);
  cfg.guidance_height = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config(2);
  cfg.latent_height = 64;
  CHECK_THROWS_AS(run_pipeline(cfg, cond, ZeroPredictor(), Linear2xDecoder()), Error);
}
