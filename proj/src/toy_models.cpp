#include "corrsync/toy_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrsync/embedding.hpp"
#include "corrsync/rng.hpp"

namespace corrsync {

namespace {

void require_rgb(const LatentTensor& latent, const char* who) {
  require(latent.channels() >= 3, Errc::shape_mismatch, std::string(who) + ": latent needs at least 3 channels");
}

bool passes_clamp(double x) { return x >= 0.0 && x <= 1.0; }

// Two-tap interpolation weights along one axis of the 2x upsampler.
struct Tap {
  int i0, i1;
  double w0, w1;
};

std::vector<Tap> upsample_taps(int src) {
  std::vector<Tap> taps(2 * src);
  for (int o = 0; o < 2 * src; ++o) {
    const double pos = std::clamp((o + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(pos));
    const int i1 = std::min(i0 + 1, src - 1);
    const double f = pos - i0;
    taps[o] = {i0, i1, 1.0 - f, f};
  }
  return taps;
}

double upsampled(const LatentTensor& x, int c, const Tap& ty, const Tap& tx) {
  return ty.w0 * (tx.w0 * x(c, ty.i0, tx.i0) + tx.w1 * x(c, ty.i0, tx.i1)) +
         ty.w1 * (tx.w0 * x(c, ty.i1, tx.i0) + tx.w1 * x(c, ty.i1, tx.i1));
}

}  // namespace

FrameImage IdentityDecoder::forward(const LatentTensor& latent) const {
  require_rgb(latent, "identity decoder");
  FrameImage img(latent.height(), latent.width());
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < latent.height(); ++r)
      for (int col = 0; col < latent.width(); ++col) img(c, r, col) = std::clamp(latent(c, r, col), 0.0, 1.0);
  return img;
}

LatentTensor IdentityDecoder::vjp(const LatentTensor& latent, const FrameImage& cotangent) const {
  require_rgb(latent, "identity decoder");
  require(cotangent.height() == latent.height() && cotangent.width() == latent.width(), Errc::shape_mismatch,
          "identity decoder: cotangent shape mismatch");
  LatentTensor g(latent.channels(), latent.height(), latent.width(), 0.0);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < latent.height(); ++r)
      for (int col = 0; col < latent.width(); ++col)
        if (passes_clamp(latent(c, r, col))) g(c, r, col) = cotangent(c, r, col);
  return g;
}

FrameImage Linear2xDecoder::forward(const LatentTensor& latent) const {
  require_rgb(latent, "linear2x decoder");
  const auto ty = upsample_taps(latent.height());
  const auto tx = upsample_taps(latent.width());
  FrameImage img(2 * latent.height(), 2 * latent.width());
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < img.height(); ++r)
      for (int col = 0; col < img.width(); ++col)
        img(c, r, col) = std::clamp(upsampled(latent, c, ty[r], tx[col]), 0.0, 1.0);
  return img;
}

LatentTensor Linear2xDecoder::vjp(const LatentTensor& latent, const FrameImage& cotangent) const {
  require_rgb(latent, "linear2x decoder");
  require(cotangent.height() == 2 * latent.height() && cotangent.width() == 2 * latent.width(),
          Errc::shape_mismatch, "linear2x decoder: cotangent shape mismatch");
  const auto ty = upsample_taps(latent.height());
  const auto tx = upsample_taps(latent.width());
  LatentTensor g(latent.channels(), latent.height(), latent.width(), 0.0);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < cotangent.height(); ++r)
      for (int col = 0; col < cotangent.width(); ++col) {
        const Tap& a = ty[r];
        const Tap& b = tx[col];
        if (!passes_clamp(upsampled(latent, c, a, b))) continue;
        const double w = cotangent(c, r, col);
        g(c, a.i0, b.i0) += w * a.w0 * b.w0;
        g(c, a.i0, b.i1) += w * a.w0 * b.w1;
        g(c, a.i1, b.i0) += w * a.w1 * b.w0;
        g(c, a.i1, b.i1) += w * a.w1 * b.w1;
      }
  return g;
}

LatentTensor ZeroPredictor::predict(const LatentTensor& x_t, int, const ConditioningBlob&, int) const {
  return LatentTensor(x_t.channels(), x_t.height(), x_t.width(), 0.0);
}

LatentTensor SeededNoisePredictor::predict(const LatentTensor& x_t, int t, const ConditioningBlob&,
                                           int frame_number) const {
  Rng rng = Rng(seed_).split((static_cast<std::uint64_t>(frame_number) << 32) | static_cast<std::uint32_t>(t));
  LatentTensor eps(x_t.channels(), x_t.height(), x_t.width(), 0.0);
  for (auto& v : eps.values()) v = amplitude_ * rng.normal();
  return eps;
}

LatentTensor ConditionedLinearPredictor::predict(const LatentTensor& x_t, int, const ConditioningBlob& cond,
                                                 int) const {
  LatentTensor eps = x_t;
  for (auto& v : eps.values()) v *= x_gain_;
  if (cond.values.empty()) return eps;
  require(cond.values.size() == static_cast<std::size_t>(cond.height) * cond.width, Errc::shape_mismatch,
          "conditioned-linear: conditioning grid size mismatch");
  require(cond.height >= x_t.height() && cond.width >= x_t.width(), Errc::shape_mismatch,
          "conditioned-linear: conditioning coarser than latent");
  double channel_weight = 1.0;
  for (int c = 0; c < x_t.channels(); ++c, channel_weight *= -0.5)
    for (int r = 0; r < x_t.height(); ++r) {
      const int sr = nearest_source_index(r, cond.height, x_t.height());
      for (int col = 0; col < x_t.width(); ++col) {
        const int sc = nearest_source_index(col, cond.width, x_t.width());
        eps(c, r, col) += cond_gain_ * channel_weight * cond.values[static_cast<std::size_t>(sr) * cond.width + sc];
      }
    }
  return eps;
}

std::unique_ptr<Decoder> make_decoder(std::string_view name) {
  if (name == "identity") return std::make_unique<IdentityDecoder>();
  if (name == "linear2x") return std::make_unique<Linear2xDecoder>();
  fail(Errc::invalid_argument, "unknown decoder: " + std::string(name));
}

std::unique_ptr<NoisePredictor> make_predictor(std::string_view name, std::uint64_t seed) {
  if (name == "zero") return std::make_unique<ZeroPredictor>();
  if (name == "seeded-noise") return std::make_unique<SeededNoisePredictor>(seed);
  if (name == "conditioned-linear") return std::make_unique<ConditionedLinearPredictor>();
  fail(Errc::invalid_argument, "unknown predictor: " + std::string(name));
}

std::vector<std::string_view> decoder_names() { return {"identity", "linear2x"}; }
std::vector<std::string_view> predictor_names() { return {"zero", "seeded-noise", "conditioned-linear"}; }

}  // namespace corrsync
