#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrsync/alignment.hpp"
#include "corrsync/guidance.hpp"
#include "corrsync/matching.hpp"
#include "corrsync/metrics.hpp"
#include "corrsync/scene.hpp"
#include "json.hpp"

namespace corrsync {

struct PipelineConfig {
  int n_frames = 3;
  int steps = 100;
  double delta = 0.01;
  StepWindow window_a{0, 39};
  StepWindow window_b{20, 69};
  int latent_channels = 4;
  int latent_height = 64;
  int latent_width = 64;
  /// Resolution of the pixel-wise guidance loss; 0 means half the decoded
  /// resolution (or the full resolution when it is odd).
  int guidance_height = 0;
  int guidance_width = 0;
  std::uint64_t seed = 0;
  std::string decoder = "linear2x";
  std::string predictor = "conditioned-linear";
  bool enable_alignment = true;
  bool enable_guidance = true;
  std::optional<Schedule> schedule;  // defaults to Schedule::linear(steps)

  void validate() const;
};

enum class EventKind { align, guide };

struct TraceEvent {
  int frame = 0;  // 1-based
  int t = 0;
  int progress = 0;
  EventKind kind = EventKind::align;
  std::size_t pairs = 0;
  double omega = 0.0;      // guide only
  double grad_norm = 0.0;  // guide only
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct Trace {
  std::vector<TraceEvent> events;
  std::vector<int> predictor_calls;  // per frame

  int count(EventKind kind, int frame) const;
  int count(EventKind kind) const;
  nlohmann::json to_json() const;
  friend bool operator==(const Trace&, const Trace&) = default;
};

struct PipelineResult {
  std::vector<FrameImage> frames;
  std::vector<LatentTensor> initial_latents;  // x_T of each frame before stepping
  Trace trace;
};

/// Image-resolution dimensions produced by the configured decoder.
std::pair<int, int> image_size(const PipelineConfig& cfg, const Decoder& dec);
std::pair<int, int> guidance_size(const PipelineConfig& cfg, const Decoder& dec);

/// Mappings between consecutive frames with embeddings resampled to w x h;
/// element k relates frame k + 1 to frame k.
std::vector<Mapping> sequence_mappings(const ConditioningSequence& cond, int width, int height);

/// Frame-major, step-minor DDIM sampling from a single shared x_T with
/// latent alignment in window A and pixel-wise guidance in window B for every
/// frame after the first.
PipelineResult run_pipeline(const PipelineConfig& cfg, const ConditioningSequence& cond,
                            const NoisePredictor& predictor, const Decoder& decoder);

/// hmse of the generated frames on image-resolution mappings.
MetricReport evaluate_consistency(const PipelineResult& result, const ConditioningSequence& cond);

}  // namespace corrsync
