#include "corrsync/pipeline.hpp"

#include <cmath>
#include <future>
#include <map>

#include "corrsync/rng.hpp"
#include "corrsync/toy_models.hpp"

namespace corrsync {

namespace {

constexpr std::uint64_t kInitStream = 0x1a17;
constexpr std::uint64_t kNoiseStream = 0x2b05;

LatentTensor gaussian_latent(Rng rng, int c, int h, int w) {
  LatentTensor x(c, h, w, 0.0);
  for (auto& v : x.values()) v = rng.normal();
  return x;
}

double l2_norm(const LatentTensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

void PipelineConfig::validate() const {
  require(n_frames >= 1, Errc::invalid_argument, "config: n_frames must be at least 1");
  require(steps >= 1, Errc::invalid_argument, "config: steps must be at least 1");
  require(std::isfinite(delta) && delta >= 0.0, Errc::invalid_argument, "config: delta must be >= 0");
  window_a.validate(steps);
  window_b.validate(steps);
  require(latent_channels >= 3 && latent_height > 0 && latent_width > 0, Errc::invalid_argument,
          "config: latent needs >= 3 channels and positive size");
  require(guidance_height >= 0 && guidance_width >= 0, Errc::invalid_argument,
          "config: guidance size must be non-negative");
  if (schedule) {
    schedule->validate();
    require(schedule->steps == steps, Errc::invalid_argument, "config: schedule length differs from steps");
  }
  const auto dec = make_decoder(decoder);
  (void)make_predictor(predictor, seed);
  const auto [ih, iw] = image_size(*this, *dec);
  const auto [gh, gw] = guidance_size(*this, *dec);
  require(ih % gh == 0 && iw % gw == 0, Errc::invalid_argument,
          "config: guidance resolution must divide the decoded resolution");
}

std::pair<int, int> image_size(const PipelineConfig& cfg, const Decoder& dec) {
  return dec.output_size(cfg.latent_height, cfg.latent_width);
}

std::pair<int, int> guidance_size(const PipelineConfig& cfg, const Decoder& dec) {
  const auto [ih, iw] = image_size(cfg, dec);
  const int gh = cfg.guidance_height > 0 ? cfg.guidance_height : (ih % 2 == 0 ? ih / 2 : ih);
  const int gw = cfg.guidance_width > 0 ? cfg.guidance_width : (iw % 2 == 0 ? iw / 2 : iw);
  return {gh, gw};
}

int Trace::count(EventKind kind, int frame) const {
  int n = 0;
  for (const auto& e : events) n += e.kind == kind && e.frame == frame;
  return n;
}

int Trace::count(EventKind kind) const {
  int n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

nlohmann::json Trace::to_json() const {
  nlohmann::json j;
  j["predictor_calls"] = predictor_calls;
  j["events"] = nlohmann::json::array();
  for (const auto& e : events) {
    nlohmann::json je{{"frame", e.frame},
                      {"t", e.t},
                      {"progress", e.progress},
                      {"kind", e.kind == EventKind::align ? "align" : "guide"},
                      {"pairs", e.pairs}};
    if (e.kind == EventKind::guide) {
      je["omega"] = e.omega;
      je["grad_norm"] = e.grad_norm;
    }
    j["events"].push_back(je);
  }
  return j;
}

std::vector<Mapping> sequence_mappings(const ConditioningSequence& cond, int width, int height) {
  std::vector<EmbeddingMap> scaled;
  scaled.reserve(cond.size());
  for (const auto& e : cond.embeddings) scaled.push_back(downsample(e, width, height));
  std::vector<std::future<Mapping>> jobs;
  for (std::size_t k = 1; k < scaled.size(); ++k)
    jobs.push_back(std::async(std::launch::async, [&, k] { return full_mapping(scaled[k], scaled[k - 1]); }));
  std::vector<Mapping> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const ConditioningSequence& cond,
                            const NoisePredictor& predictor, const Decoder& decoder) {
  cfg.validate();
  cond.validate();
  require(static_cast<int>(cond.size()) == cfg.n_frames, Errc::invalid_argument,
          "pipeline: conditioning length differs from n_frames");
  const int T = cfg.steps;
  const Schedule sched = cfg.schedule ? *cfg.schedule : Schedule::linear(T);
  const auto [gh, gw] = guidance_size(cfg, decoder);
  const auto& emb0 = cond.embeddings.front();
  require(emb0.width() >= cfg.latent_width && emb0.height() >= cfg.latent_height && emb0.width() >= gw &&
              emb0.height() >= gh,
          Errc::invalid_argument, "pipeline: embeddings coarser than latent or guidance grid");

  const bool any_align = cfg.enable_alignment && cfg.n_frames > 1;
  const bool any_guide = cfg.enable_guidance && cfg.n_frames > 1;
  // Mappings depend only on the embeddings, so each pair is solved once per grid.
  std::vector<Mapping> align_maps, guide_maps;
  if (any_align) align_maps = sequence_mappings(cond, cfg.latent_width, cfg.latent_height);
  if (any_guide) guide_maps = sequence_mappings(cond, gw, gh);

  const Rng root(cfg.seed);
  const LatentTensor x_T =
      gaussian_latent(root.split(kInitStream), cfg.latent_channels, cfg.latent_height, cfg.latent_width);

  PipelineResult res;
  res.trace.predictor_calls.assign(cfg.n_frames, 0);
  // Only the predecessor frame's window-A latents and window-B decodes are
  // retained, keyed by progress index.
  std::map<int, LatentTensor> prev_latents, cur_latents;
  std::map<int, FrameImage> prev_decodes, cur_decodes;

  for (int i = 1; i <= cfg.n_frames; ++i) {
    const ConditioningBlob& blob = cond.conditioning[i - 1];
    const bool has_next = i < cfg.n_frames;
    LatentTensor x = x_T;
    res.initial_latents.push_back(x);
    cur_latents.clear();
    cur_decodes.clear();

    for (int t = T; t >= 1; --t) {
      const int p = progress_index(t, T);
      if (any_align && should_align(t, T, cfg.window_a, i)) {
        const Mapping& m = align_maps[i - 2];
        x = align_latent(x, prev_latents.at(p), m);
        res.trace.events.push_back({i, t, p, EventKind::align, m.size(), 0.0, 0.0});
      }
      if (any_align && has_next && cfg.window_a.contains(p)) cur_latents.emplace(p, x);

      const LatentTensor eps = predictor.predict(x, t, blob, i);
      ++res.trace.predictor_calls[i - 1];
      std::optional<LatentTensor> noise;
      if (sched.sigma_at(t) > 0.0) {
        const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(t);
        noise = gaussian_latent(root.split(kNoiseStream).split(key), cfg.latent_channels, cfg.latent_height,
                                cfg.latent_width);
      }
      DdimResult step = ddim_step(x, eps, sched, t, noise ? &*noise : nullptr);

      const bool guide_here = any_guide && step_in_window(t, T, cfg.window_b, i);
      const bool keep_decode = any_guide && has_next && cfg.window_b.contains(p);
      if (guide_here) {
        const Mapping& m = guide_maps[i - 2];
        GuidanceEval ev = evaluate_guidance(decoder, sched, t, step.x0_hat, prev_decodes.at(p), m);
        step.x_prev = guided_update(step.x_prev, ev.grad, cfg.delta);
        res.trace.events.push_back({i, t, p, EventKind::guide, m.size(), ev.omega, l2_norm(ev.grad)});
        if (keep_decode) cur_decodes.emplace(p, std::move(ev.current));
      } else if (keep_decode) {
        cur_decodes.emplace(p, downsample_image(decoder.forward(step.x0_hat), gw, gh));
      }
      x = std::move(step.x_prev);
    }
    res.frames.push_back(decoder.forward(x));
    std::swap(prev_latents, cur_latents);
    std::swap(prev_decodes, cur_decodes);
  }
  return res;
}

MetricReport evaluate_consistency(const PipelineResult& result, const ConditioningSequence& cond) {
  require(!result.frames.empty(), Errc::invalid_argument, "evaluate_consistency: no frames");
  const auto& f0 = result.frames.front();
  const auto maps = sequence_mappings(cond, f0.width(), f0.height());
  return hmse(result.frames, maps);
}

}  // namespace corrsync
