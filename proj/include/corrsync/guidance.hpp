#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corrsync/alignment.hpp"
#include "corrsync/image.hpp"
#include "corrsync/matching.hpp"

namespace corrsync {

/// DDIM scheduling arrays. alpha[t] for t in [0, T] (alpha[0] belongs to the
/// clean end of the chain); sigma[t - 1] is the noise scale of step t.
struct Schedule {
  int steps = 0;
  std::vector<double> alpha;
  std::vector<double> sigma;

  /// alpha[t] = prod_{k<=t} (1 - beta_k), beta linear in k over [beta_start,
  /// beta_end], alpha[0] = 1, sigma = 0.
  static Schedule linear(int steps, double beta_start = 8.5e-4, double beta_end = 1.2e-2);
  /// JSON object {"alpha": [T+1 values], "sigma": [T values]}.
  static Schedule load(const std::filesystem::path& path);

  void validate() const;
  double alpha_at(int t) const { return alpha.at(t); }
  double sigma_at(int t) const { return sigma.at(t - 1); }
};

/// Per-frame conditioning signal (a depth-like grid), plus the prompt carried
/// through untouched.
struct ConditioningBlob {
  int height = 0;
  int width = 0;
  std::vector<double> values;
  std::string prompt;
};

class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual std::string name() const = 0;
  /// Image dimensions (height, width) produced for a latent of this size.
  virtual std::pair<int, int> output_size(int latent_height, int latent_width) const = 0;
  virtual FrameImage forward(const LatentTensor& latent) const = 0;
  /// Adjoint of forward's linearization at `latent` applied to `cotangent`.
  virtual LatentTensor vjp(const LatentTensor& latent, const FrameImage& cotangent) const = 0;
};

class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  virtual std::string name() const = 0;
  /// `frame_number` is 1-based. Must be deterministic in all arguments.
  virtual LatentTensor predict(const LatentTensor& x_t, int t, const ConditioningBlob& cond,
                               int frame_number) const = 0;
};

struct DdimResult {
  LatentTensor x_prev;
  LatentTensor x0_hat;
};

/// x0 = (x_t - sqrt(1 - alpha_t) eps) / sqrt(alpha_t).
LatentTensor predict_x0(const LatentTensor& x_t, const LatentTensor& eps_hat, double alpha_t);

/// One deterministic-plus-noise DDIM update from step t to t - 1.
/// `noise` may be null only when sigma_t == 0.
DdimResult ddim_step(const LatentTensor& x_t, const LatentTensor& eps_hat, const Schedule& sched, int t,
                     const LatentTensor* noise = nullptr);

/// Sum over mapped pairs and the three channels of (cur[q] - prev[s])^2.
double guidance_loss(const FrameImage& cur, const FrameImage& prev, const Mapping& m);

/// d(loss)/d(cur): 2 (cur[q] - prev[s]) at mapped q, zero elsewhere.
FrameImage guidance_pixel_grad(const FrameImage& cur, const FrameImage& prev, const Mapping& m);

/// Gradient of the loss with respect to x_t, given the image-space cotangent
/// at the decoder output. The noise prediction is held constant, so the x0
/// Jacobian is 1 / sqrt(alpha_t).
LatentTensor latent_gradient(const Decoder& dec, const LatentTensor& x0_hat, const Schedule& sched, int t,
                             const FrameImage& pixel_grad);

/// x - delta * grad.
LatentTensor guided_update(const LatentTensor& x, const LatentTensor& grad, double delta);

/// Block-mean pooling; input dimensions must be integer multiples.
FrameImage downsample_image(const FrameImage& img, int out_width, int out_height);
/// Adjoint of downsample_image: spreads each cotangent over its block.
FrameImage downsample_image_adjoint(const FrameImage& cotangent, int in_width, int in_height);

struct GuidanceEval {
  double omega = 0.0;
  FrameImage current;  // decoded x0 at guidance resolution
  LatentTensor grad;   // d omega / d x_t
};

/// Decode x0_hat, pool to the resolution of `prev`, evaluate the loss against
/// it on `m`, and pull the gradient back to x_t.
GuidanceEval evaluate_guidance(const Decoder& dec, const Schedule& sched, int t, const LatentTensor& x0_hat,
                               const FrameImage& prev, const Mapping& m);

}  // namespace corrsync
