#include "corrsync/guidance.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace corrsync {

Schedule Schedule::linear(int steps, double beta_start, double beta_end) {
  require(steps >= 1, Errc::invalid_argument, "Schedule::linear: steps must be positive");
  Schedule s;
  s.steps = steps;
  s.alpha.resize(steps + 1);
  s.sigma.assign(steps, 0.0);
  s.alpha[0] = 1.0;
  for (int k = 1; k <= steps; ++k) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(k - 1) / (steps - 1);
    const double beta = beta_start + (beta_end - beta_start) * frac;
    s.alpha[k] = s.alpha[k - 1] * (1.0 - beta);
  }
  s.validate();
  return s;
}

Schedule Schedule::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io, "cannot open schedule: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("schedule JSON: ") + e.what());
  }
  require(j.contains("alpha") && j.contains("sigma"), Errc::format, "schedule JSON needs \"alpha\" and \"sigma\"");
  Schedule s;
  s.alpha = j.at("alpha").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<std::vector<double>>();
  s.steps = static_cast<int>(s.sigma.size());
  s.validate();
  return s;
}

void Schedule::validate() const {
  require(steps >= 1, Errc::invalid_argument, "Schedule: at least one step required");
  require(alpha.size() == static_cast<std::size_t>(steps) + 1 && sigma.size() == static_cast<std::size_t>(steps),
          Errc::shape_mismatch, "Schedule: alpha needs T+1 entries and sigma T entries");
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    require(std::isfinite(alpha[t]) && alpha[t] > 0.0 && alpha[t] <= 1.0, Errc::invalid_argument,
            "Schedule: alpha entries must lie in (0, 1]");
    if (t > 0) require(alpha[t] <= alpha[t - 1], Errc::invalid_argument, "Schedule: alpha must be non-increasing in t");
  }
  for (double s : sigma)
    require(std::isfinite(s) && s >= 0.0, Errc::invalid_argument, "Schedule: sigma entries must be finite and >= 0");
}

LatentTensor predict_x0(const LatentTensor& x_t, const LatentTensor& eps_hat, double alpha_t) {
  require(x_t.same_shape(eps_hat), Errc::shape_mismatch, "predict_x0: shape mismatch");
  require(alpha_t > 0.0, Errc::invalid_argument, "predict_x0: alpha_t must be positive");
  const double a = std::sqrt(1.0 - alpha_t);
  const double b = std::sqrt(alpha_t);
  LatentTensor out = x_t;
  auto& o = out.values();
  const auto& e = eps_hat.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (o[i] - a * e[i]) / b;
  return out;
}

DdimResult ddim_step(const LatentTensor& x_t, const LatentTensor& eps_hat, const Schedule& sched, int t,
                     const LatentTensor* noise) {
  require(t >= 1 && t <= sched.steps, Errc::out_of_range, "ddim_step: step must be in [1, T]");
  require(x_t.same_shape(eps_hat), Errc::shape_mismatch, "ddim_step: eps shape mismatch");
  const double alpha_t = sched.alpha_at(t);
  const double alpha_prev = sched.alpha_at(t - 1);
  const double sigma = sched.sigma_at(t);
  const double radicand = 1.0 - alpha_prev - sigma * sigma;
  require(radicand >= 0.0, Errc::invalid_argument, "ddim_step: 1 - alpha_{t-1} - sigma_t^2 is negative");
  if (sigma > 0.0) {
    require(noise != nullptr, Errc::invalid_argument, "ddim_step: noise required when sigma_t > 0");
    require(noise->same_shape(x_t), Errc::shape_mismatch, "ddim_step: noise shape mismatch");
  }

  DdimResult r{x_t, predict_x0(x_t, eps_hat, alpha_t)};
  const double ca = std::sqrt(alpha_prev);
  const double ce = std::sqrt(radicand);
  auto& xp = r.x_prev.values();
  const auto& x0 = r.x0_hat.values();
  const auto& e = eps_hat.values();
  for (std::size_t i = 0; i < xp.size(); ++i) xp[i] = ca * x0[i] + ce * e[i];
  if (sigma > 0.0) {
    const auto& n = noise->values();
    for (std::size_t i = 0; i < xp.size(); ++i) xp[i] += sigma * n[i];
  }
  return r;
}

namespace {

void check_pairs(const FrameImage& cur, const FrameImage& prev, const Mapping& m, const char* who) {
  if (!cur.same_shape(prev)) fail(Errc::shape_mismatch, std::string(who) + ": image shapes differ");
  for (const auto& p : m.pairs)
    if (!cur.contains(p.q.row, p.q.col) || !prev.contains(p.s.row, p.s.col))
      fail(Errc::out_of_range, std::string(who) + ": mapping coordinate outside image");
}

}  // namespace

double guidance_loss(const FrameImage& cur, const FrameImage& prev, const Mapping& m) {
  check_pairs(cur, prev, m, "guidance_loss");
  double omega = 0.0;
  for (const auto& p : m.pairs)
    for (int c = 0; c < FrameImage::kChannels; ++c) {
      const double d = cur(c, p.q.row, p.q.col) - prev(c, p.s.row, p.s.col);
      omega += d * d;
    }
  return omega;
}

FrameImage guidance_pixel_grad(const FrameImage& cur, const FrameImage& prev, const Mapping& m) {
  check_pairs(cur, prev, m, "guidance_pixel_grad");
  FrameImage g(cur.height(), cur.width(), 0.0);
  for (const auto& p : m.pairs)
    for (int c = 0; c < FrameImage::kChannels; ++c)
      g(c, p.q.row, p.q.col) = 2.0 * (cur(c, p.q.row, p.q.col) - prev(c, p.s.row, p.s.col));
  return g;
}

LatentTensor latent_gradient(const Decoder& dec, const LatentTensor& x0_hat, const Schedule& sched, int t,
                             const FrameImage& pixel_grad) {
  require(t >= 1 && t <= sched.steps, Errc::out_of_range, "latent_gradient: step must be in [1, T]");
  const auto [h, w] = dec.output_size(x0_hat.height(), x0_hat.width());
  require(pixel_grad.height() == h && pixel_grad.width() == w, Errc::shape_mismatch,
          "latent_gradient: cotangent does not match decoder output size");
  LatentTensor g = dec.vjp(x0_hat, pixel_grad);
  const double scale = 1.0 / std::sqrt(sched.alpha_at(t));
  for (auto& x : g.values()) x *= scale;
  return g;
}

LatentTensor guided_update(const LatentTensor& x, const LatentTensor& grad, double delta) {
  require(x.same_shape(grad), Errc::shape_mismatch, "guided_update: shape mismatch");
  require(delta >= 0.0, Errc::invalid_argument, "guided_update: delta must be non-negative");
  LatentTensor out = x;
  auto& o = out.values();
  const auto& g = grad.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= delta * g[i];
  return out;
}

FrameImage downsample_image(const FrameImage& img, int out_width, int out_height) {
  require(out_width > 0 && out_height > 0, Errc::invalid_argument, "downsample_image: zero output dimension");
  require(img.width() % out_width == 0 && img.height() % out_height == 0, Errc::invalid_argument,
          "downsample_image: dimensions must divide evenly");
  if (img.width() == out_width && img.height() == out_height) return img;
  const int fy = img.height() / out_height;
  const int fx = img.width() / out_width;
  const double inv = 1.0 / (fy * fx);
  FrameImage out(out_height, out_width, 0.0);
  for (int c = 0; c < FrameImage::kChannels; ++c)
    for (int r = 0; r < out_height; ++r)
      for (int col = 0; col < out_width; ++col) {
        double acc = 0.0;
        for (int dy = 0; dy < fy; ++dy)
          for (int dx = 0; dx < fx; ++dx) acc += img(c, r * fy + dy, col * fx + dx);
        out(c, r, col) = acc * inv;
      }
  return out;
}

FrameImage downsample_image_adjoint(const FrameImage& cotangent, int in_width, int in_height) {
  require(in_width % cotangent.width() == 0 && in_height % cotangent.height() == 0, Errc::invalid_argument,
          "downsample_image_adjoint: dimensions must divide evenly");
  if (in_width == cotangent.width() && in_height == cotangent.height()) return cotangent;
  const int fy = in_height / cotangent.height();
  const int fx = in_width / cotangent.width();
  const double inv = 1.0 / (fy * fx);
  FrameImage out(in_height, in_width, 0.0);
  for (int c = 0; c < FrameImage::kChannels; ++c)
    for (int r = 0; r < in_height; ++r)
      for (int col = 0; col < in_width; ++col) out(c, r, col) = cotangent(c, r / fy, col / fx) * inv;
  return out;
}

GuidanceEval evaluate_guidance(const Decoder& dec, const Schedule& sched, int t, const LatentTensor& x0_hat,
                               const FrameImage& prev, const Mapping& m) {
  const FrameImage full = dec.forward(x0_hat);
  GuidanceEval ev;
  ev.current = downsample_image(full, prev.width(), prev.height());
  ev.omega = guidance_loss(ev.current, prev, m);
  const FrameImage g_small = guidance_pixel_grad(ev.current, prev, m);
  const FrameImage g_full = downsample_image_adjoint(g_small, full.width(), full.height());
  ev.grad = latent_gradient(dec, x0_hat, sched, t, g_full);
  return ev;
}

}  // namespace corrsync
