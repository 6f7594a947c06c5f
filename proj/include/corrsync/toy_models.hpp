#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "corrsync/guidance.hpp"

namespace corrsync {

/// Channels 0..2 of the latent become R, G, B, clamped to [0, 1]. Further
/// latent channels are ignored. Output resolution equals latent resolution.
class IdentityDecoder final : public Decoder {
 public:
  std::string name() const override { return "identity"; }
  std::pair<int, int> output_size(int h, int w) const override { return {h, w}; }
  FrameImage forward(const LatentTensor& latent) const override;
  LatentTensor vjp(const LatentTensor& latent, const FrameImage& cotangent) const override;
};

/// Fixed 2x linear upsampler: each output pixel bilinearly interpolates
/// channels 0..2 at source coordinate (i + 0.5) / 2 - 0.5 with edge clamping,
/// then clamps to [0, 1].
class Linear2xDecoder final : public Decoder {
 public:
  std::string name() const override { return "linear2x"; }
  std::pair<int, int> output_size(int h, int w) const override { return {2 * h, 2 * w}; }
  FrameImage forward(const LatentTensor& latent) const override;
  LatentTensor vjp(const LatentTensor& latent, const FrameImage& cotangent) const override;
};

class ZeroPredictor final : public NoisePredictor {
 public:
  std::string name() const override { return "zero"; }
  LatentTensor predict(const LatentTensor& x_t, int t, const ConditioningBlob& cond, int frame_number) const override;
};

/// amplitude * N(0, 1), drawn from a stream keyed by (seed, frame, t).
class SeededNoisePredictor final : public NoisePredictor {
 public:
  explicit SeededNoisePredictor(std::uint64_t seed, double amplitude = 0.1) : seed_(seed), amplitude_(amplitude) {}
  std::string name() const override { return "seeded-noise"; }
  LatentTensor predict(const LatentTensor& x_t, int t, const ConditioningBlob& cond, int frame_number) const override;

 private:
  std::uint64_t seed_;
  double amplitude_;
};

/// eps = x_gain * x_t + cond_gain * (-0.5)^c * cond(r, col), where the
/// conditioning grid is nearest-neighbour resampled to the latent grid.
class ConditionedLinearPredictor final : public NoisePredictor {
 public:
  explicit ConditionedLinearPredictor(double x_gain = 0.1, double cond_gain = 0.5)
      : x_gain_(x_gain), cond_gain_(cond_gain) {}
  std::string name() const override { return "conditioned-linear"; }
  LatentTensor predict(const LatentTensor& x_t, int t, const ConditioningBlob& cond, int frame_number) const override;

 private:
  double x_gain_;
  double cond_gain_;
};

std::unique_ptr<Decoder> make_decoder(std::string_view name);
std::unique_ptr<NoisePredictor> make_predictor(std::string_view name, std::uint64_t seed);

std::vector<std::string_view> decoder_names();
std::vector<std::string_view> predictor_names();

}  // namespace corrsync
