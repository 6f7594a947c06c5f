// Command-line front end: scene synthesis, matching, alignment, guidance,
// metrics, visualisation, full pipeline runs and the LAP scaling benchmark.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrsync/alignment.hpp"
#include "corrsync/embedding.hpp"
#include "corrsync/guidance.hpp"
#include "corrsync/lap_bench.hpp"
#include "corrsync/matching.hpp"
#include "corrsync/metrics.hpp"
#include "corrsync/pipeline.hpp"
#include "corrsync/scene.hpp"
#include "corrsync/tensor_io.hpp"
#include "corrsync/toy_models.hpp"
#include "corrsync/visualize.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace corrsync;

namespace {

std::pair<int, int> parse_pair(const std::string& s, const char* what) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) fail(Errc::invalid_argument, std::string(what) + ": expected a:b, got " + s);
  try {
    std::size_t p1 = 0, p2 = 0;
    const int a = std::stoi(s.substr(0, colon), &p1);
    const int b = std::stoi(s.substr(colon + 1), &p2);
    if (p1 != colon || p2 != s.size() - colon - 1) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    fail(Errc::invalid_argument, std::string(what) + ": expected integers a:b, got " + s);
  }
}

StepWindow parse_window(const std::string& s, const char* what) {
  const auto [lo, hi] = parse_pair(s, what);
  return {lo, hi};
}

std::string numbered(const char* stem, int k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.%s", stem, k, ext);
  return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) fail(Errc::io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, path.string() + ": " + e.what());
  }
}

Tensor depth_tensor(const ConditioningBlob& c) {
  return Tensor::from<double>({static_cast<std::uint64_t>(c.height), static_cast<std::uint64_t>(c.width)}, c.values);
}

ConditioningBlob depth_blob(const Tensor& t, const std::string& prompt) {
  require(t.ndim() == 2, Errc::shape_mismatch, "conditioning grid must be 2-D");
  return {static_cast<int>(t.dim(0)), static_cast<int>(t.dim(1)), t.as_f64(), prompt};
}

// Reads emb_NNN.ctf (and depth_NNN.ctf when present) for frames 0..n-1.
ConditioningSequence load_scene_dir(const fs::path& dir, int n_frames) {
  ConditioningSequence seq;
  if (fs::exists(dir / "scene.json")) {
    const auto j = read_json(dir / "scene.json");
    seq.prompt = j.value("prompt", std::string{});
  }
  for (int k = 0; k < n_frames; ++k) {
    const fs::path emb = dir / numbered("emb", k, "ctf");
    if (!fs::exists(emb)) fail(Errc::io, "missing embedding file " + emb.string());
    seq.embeddings.push_back(EmbeddingMap::from_tensor(read_tensor(emb)));
    const fs::path depth = dir / numbered("depth", k, "ctf");
    if (fs::exists(depth)) {
      seq.conditioning.push_back(depth_blob(read_tensor(depth), seq.prompt));
    } else {
      const auto& e = seq.embeddings.back();
      ConditioningBlob b{e.height(), e.width(), std::vector<double>(e.size()), seq.prompt};
      for (std::size_t i = 0; i < e.size(); ++i) b.values[i] = e.labels()[i] != kBackground ? 1.0 : 0.0;
      seq.conditioning.push_back(std::move(b));
    }
  }
  seq.validate();
  return seq;
}

void write_report(const MetricReport& r, const std::optional<fs::path>& path) {
  for (const auto& p : r.per_pair)
    std::printf("pair %d: pairs=%zu mse=%.9f\n", p.frame, p.count, p.mse);
  std::printf("h_mse %.9f\n", r.h_mse);
  if (!path) return;
  nlohmann::json j;
  j["h_mse"] = r.h_mse;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.per_pair) j["pairs"].push_back({{"frame", p.frame}, {"count", p.count}, {"mse", p.mse}});
  write_json(*path, j);
}

struct SynthArgs {
  int frames = 3, width = 64, height = 64;
  std::string shift = "0:2";
  std::uint64_t seed = 0;
  std::string scene;
  std::string out_dir = ".";
};

SyntheticSceneSpec scene_from(const SynthArgs& a) {
  if (!a.scene.empty()) return SyntheticSceneSpec::from_json(read_json(a.scene));
  const auto [dr, dc] = parse_pair(a.shift, "--shift");
  return SyntheticSceneSpec::figure(a.width, a.height, a.frames, dr, dc, a.seed);
}

int run_synth(const SynthArgs& a) {
  const SyntheticSceneSpec spec = scene_from(a);
  const auto seq = synth_scene(spec);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    write_tensor(dir / numbered("emb", static_cast<int>(k), "ctf"), seq.embeddings[k].to_tensor());
    write_tensor(dir / numbered("depth", static_cast<int>(k), "ctf"), depth_tensor(seq.conditioning[k]));
  }
  write_json(dir / "scene.json", spec.to_json());
  std::printf("wrote %zu frames (%dx%d) to %s\n", seq.size(), spec.width, spec.height, dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrsync: cross-frame correspondence tools for consistent frame sequences"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic moving-figure scene");
  c_synth->add_option("--frames", synth.frames, "Number of frames")->check(CLI::PositiveNumber);
  c_synth->add_option("--width", synth.width, "Canvas width")->check(CLI::PositiveNumber);
  c_synth->add_option("--height", synth.height, "Canvas height")->check(CLI::PositiveNumber);
  c_synth->add_option("--shift", synth.shift, "Per-frame translation row:col");
  c_synth->add_option("--seed", synth.seed, "UV offset seed");
  c_synth->add_option("--scene", synth.scene, "Scene description JSON (overrides the figure options)")
      ->check(CLI::ExistingFile);
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory");

  std::string cur, prev, mapping, out, size;
  auto* c_match = app.add_subcommand("match", "Compute the cross-frame mapping between two embeddings");
  c_match->add_option("--cur", cur, "Embedding of frame i (CTF)")->required()->check(CLI::ExistingFile);
  c_match->add_option("--prev", prev, "Embedding of frame i-1 (CTF)")->required()->check(CLI::ExistingFile);
  c_match->add_option("--size", size, "Downsample both embeddings to width:height first");
  c_match->add_option("--out", out, "Mapping output (CTF, K x 5 int32)")->required();

  auto* c_align = app.add_subcommand("align", "Copy latent values along a mapping");
  c_align->add_option("--cur", cur, "Latent of frame i (CTF)")->required()->check(CLI::ExistingFile);
  c_align->add_option("--prev", prev, "Latent of frame i-1 (CTF)")->required()->check(CLI::ExistingFile);
  c_align->add_option("--mapping", mapping, "Mapping (CTF)")->required()->check(CLI::ExistingFile);
  c_align->add_option("--out", out, "Aligned latent (CTF)")->required();

  std::string latent, decoder_name = "identity", grad_out, update_out;
  double delta = 0.01, alpha = 1.0;
  auto* c_guide = app.add_subcommand("guide", "Evaluate the pixel-wise guidance loss and its gradient");
  c_guide->add_option("--cur", cur, "Current image (CTF, 3 x H x W); ignored with --latent");
  c_guide->add_option("--prev", prev, "Previous image (CTF, 3 x H x W)")->required()->check(CLI::ExistingFile);
  c_guide->add_option("--mapping", mapping, "Mapping (CTF)")->required()->check(CLI::ExistingFile);
  c_guide->add_option("--latent", latent, "Clean-latent prediction to decode instead of --cur")
      ->check(CLI::ExistingFile);
  c_guide->add_option("--decoder", decoder_name, "Decoder used with --latent");
  c_guide->add_option("--alpha", alpha, "Cumulative alpha of the current step")->check(CLI::Range(1e-12, 1.0));
  c_guide->add_option("--delta", delta, "Guidance step size")->check(CLI::NonNegativeNumber);
  c_guide->add_option("--grad-out", grad_out, "Write the gradient (CTF)");
  c_guide->add_option("--update-out", update_out, "Write latent - delta * gradient (CTF, needs --latent)");

  std::vector<std::string> frame_files, mapping_files;
  std::string report;
  auto* c_hmse = app.add_subcommand("hmse", "Mapped-pixel inconsistency of a frame sequence");
  c_hmse->add_option("--frames", frame_files, "Frame images (CTF, 3 x H x W)")->required()->check(CLI::ExistingFile);
  c_hmse->add_option("--mappings", mapping_files, "One mapping per consecutive pair (CTF)")
      ->required()
      ->check(CLI::ExistingFile);
  c_hmse->add_option("--report", report, "Write the report as JSON");

  auto* c_viz = app.add_subcommand("viz", "Render a mapping as two colour-coded PPM panes");
  c_viz->add_option("--cur", cur, "Embedding of frame i (CTF)")->required()->check(CLI::ExistingFile);
  c_viz->add_option("--prev", prev, "Embedding of frame i-1 (CTF)")->required()->check(CLI::ExistingFile);
  c_viz->add_option("--mapping", mapping, "Mapping (CTF)")->required()->check(CLI::ExistingFile);
  c_viz->add_option("--out", out, "Output stem; writes <stem>_cur.ppm and <stem>_prev.ppm")->required();

  PipelineConfig cfg;
  std::string scene_dir, window_a = "0:39", window_b = "20:69", schedule_path, out_dir = "run";
  int latent_size = 64, guidance_size_opt = 0;
  bool no_align = false, no_guide = false;
  SynthArgs psynth;
  auto* c_pipe = app.add_subcommand("pipeline", "Run the full sampling loop over a conditioning sequence");
  c_pipe->add_option("--scene-dir", scene_dir, "Directory written by synth; otherwise a figure is generated")
      ->check(CLI::ExistingDirectory);
  c_pipe->add_option("--scene", psynth.scene, "Scene description JSON")->check(CLI::ExistingFile);
  psynth.width = psynth.height = 0;
  c_pipe->add_option("--width", psynth.width, "Generated canvas width (0: decoded image width)");
  c_pipe->add_option("--height", psynth.height, "Generated canvas height (0: decoded image height)");
  c_pipe->add_option("--shift", psynth.shift, "Generated per-frame translation row:col");
  c_pipe->add_option("--frames", cfg.n_frames, "Number of frames")->check(CLI::PositiveNumber);
  c_pipe->add_option("--steps", cfg.steps, "Denoising steps T")->check(CLI::PositiveNumber);
  c_pipe->add_option("--delta", cfg.delta, "Guidance step size")->check(CLI::NonNegativeNumber);
  c_pipe->add_option("--window-a", window_a, "Alignment window lo:hi (progress indices)");
  c_pipe->add_option("--window-b", window_b, "Guidance window lo:hi (progress indices)");
  c_pipe->add_option("--seed", cfg.seed, "Sampling seed");
  c_pipe->add_option("--decoder", cfg.decoder, "Decoder: identity | linear2x");
  c_pipe->add_option("--predictor", cfg.predictor, "Predictor: zero | seeded-noise | conditioned-linear");
  c_pipe->add_option("--latent-size", latent_size, "Square latent resolution")->check(CLI::PositiveNumber);
  c_pipe->add_option("--latent-channels", cfg.latent_channels, "Latent channels")->check(CLI::Range(3, 64));
  c_pipe->add_option("--guidance-size", guidance_size_opt, "Square guidance resolution (0: half the image)");
  c_pipe->add_option("--schedule", schedule_path, "Schedule JSON with alpha and sigma arrays")
      ->check(CLI::ExistingFile);
  c_pipe->add_flag("--no-align", no_align, "Disable latent alignment");
  c_pipe->add_flag("--no-guide", no_guide, "Disable pixel-wise guidance");
  c_pipe->add_option("--out-dir", out_dir, "Output directory");

  std::vector<int> sizes{128, 256, 512, 1024};
  int reps = 3;
  std::uint64_t bench_seed = 0;
  auto* c_bench = app.add_subcommand("bench-lap", "Measure assignment solver scaling on random square matrices");
  c_bench->add_option("--sizes", sizes, "Matrix sizes")->delimiter(',');
  c_bench->add_option("--reps", reps, "Repetitions per size (median is reported)")->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", bench_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_synth) return run_synth(synth);

    if (*c_match) {
      auto a = EmbeddingMap::from_tensor(read_tensor(cur));
      auto b = EmbeddingMap::from_tensor(read_tensor(prev));
      if (!size.empty()) {
        const auto [w, h] = parse_pair(size, "--size");
        a = downsample(a, w, h);
        b = downsample(b, w, h);
      }
      const Mapping m = full_mapping(a, b);
      write_tensor(out, m.to_tensor());
      std::printf("pairs %zu\n", m.size());
      return 0;
    }

    if (*c_align) {
      const auto x = LatentTensor::from_tensor(read_tensor(cur));
      const auto p = LatentTensor::from_tensor(read_tensor(prev));
      const auto m = Mapping::from_tensor(read_tensor(mapping));
      write_tensor(out, align_latent(x, p, m).to_tensor());
      std::printf("aligned %zu pixels\n", m.size());
      return 0;
    }

    if (*c_guide) {
      const auto prev_img = FrameImage::from_tensor(read_tensor(prev));
      const auto m = Mapping::from_tensor(read_tensor(mapping));
      if (latent.empty()) {
        require(!cur.empty(), Errc::invalid_argument, "guide: --cur or --latent is required");
        const auto cur_img = FrameImage::from_tensor(read_tensor(cur));
        std::printf("omega %.12g\n", guidance_loss(cur_img, prev_img, m));
        if (!grad_out.empty()) write_tensor(grad_out, guidance_pixel_grad(cur_img, prev_img, m).to_tensor());
        return 0;
      }
      const auto x0 = LatentTensor::from_tensor(read_tensor(latent));
      const auto dec = make_decoder(decoder_name);
      Schedule s;
      s.steps = 1;
      s.alpha = {1.0, alpha};
      s.sigma = {0.0};
      const GuidanceEval ev = evaluate_guidance(*dec, s, 1, x0, prev_img, m);
      std::printf("omega %.12g\n", ev.omega);
      if (!grad_out.empty()) write_tensor(grad_out, ev.grad.to_tensor());
      if (!update_out.empty()) write_tensor(update_out, guided_update(x0, ev.grad, delta).to_tensor());
      return 0;
    }

    if (*c_hmse) {
      std::vector<FrameImage> frames;
      std::vector<Mapping> maps;
      for (const auto& f : frame_files) frames.push_back(FrameImage::from_tensor(read_tensor(f)));
      for (const auto& f : mapping_files) maps.push_back(Mapping::from_tensor(read_tensor(f)));
      write_report(hmse(frames, maps), report.empty() ? std::nullopt : std::optional<fs::path>(report));
      return 0;
    }

    if (*c_viz) {
      const auto a = EmbeddingMap::from_tensor(read_tensor(cur));
      const auto b = EmbeddingMap::from_tensor(read_tensor(prev));
      const auto [pa, pb] = viz_mapping(a, b, Mapping::from_tensor(read_tensor(mapping)), out);
      std::printf("wrote %s %s\n", pa.string().c_str(), pb.string().c_str());
      return 0;
    }

    if (*c_pipe) {
      cfg.window_a = parse_window(window_a, "--window-a");
      cfg.window_b = parse_window(window_b, "--window-b");
      cfg.latent_height = cfg.latent_width = latent_size;
      cfg.guidance_height = cfg.guidance_width = guidance_size_opt;
      cfg.enable_alignment = !no_align;
      cfg.enable_guidance = !no_guide;
      if (!schedule_path.empty()) cfg.schedule = Schedule::load(schedule_path);
      ConditioningSequence cond;
      if (!scene_dir.empty()) {
        cond = load_scene_dir(scene_dir, cfg.n_frames);
      } else {
        psynth.frames = cfg.n_frames;
        psynth.seed = cfg.seed;
        const auto [ih, iw] = image_size(cfg, *make_decoder(cfg.decoder));
        if (psynth.width == 0) psynth.width = iw;
        if (psynth.height == 0) psynth.height = ih;
        cond = synth_scene(scene_from(psynth));
      }
      cfg.validate();
      const auto dec = make_decoder(cfg.decoder);
      const auto pred = make_predictor(cfg.predictor, cfg.seed);
      const PipelineResult res = run_pipeline(cfg, cond, *pred, *dec);

      const fs::path dir = out_dir;
      fs::create_directories(dir);
      for (std::size_t k = 0; k < res.frames.size(); ++k) {
        write_tensor(dir / numbered("frame", static_cast<int>(k), "ctf"), res.frames[k].to_tensor());
        write_ppm(dir / numbered("frame", static_cast<int>(k), "ppm"), to_rgb8(res.frames[k]));
      }
      write_json(dir / "trace.json", res.trace.to_json());
      std::printf("frames %zu align_events %d guide_events %d\n", res.frames.size(),
                  res.trace.count(EventKind::align), res.trace.count(EventKind::guide));
      const auto& f0 = res.frames.front();
      const auto& e0 = cond.embeddings.front();
      if (res.frames.size() < 2) return 0;
      if (e0.width() < f0.width() || e0.height() < f0.height()) {
        std::printf("h_mse skipped: embeddings coarser than the decoded frames\n");
        return 0;
      }
      write_report(evaluate_consistency(res, cond), dir / "hmse.json");
      return 0;
    }

    if (*c_bench) {
      const LapScaling s = measure_lap_scaling(sizes, reps, bench_seed);
      for (const auto& p : s.points) std::printf("n %d seconds %.6f\n", p.n, p.seconds);
      std::printf("slope %.4f\n", s.slope);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
