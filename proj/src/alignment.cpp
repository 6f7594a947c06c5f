#include "corrsync/alignment.hpp"

#include <cmath>
#include <string>

namespace corrsync {

LatentTensor::LatentTensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  require(channels > 0 && height > 0 && width > 0, Errc::invalid_argument, "LatentTensor: dimensions must be positive");
  values_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

LatentTensor::LatentTensor(int channels, int height, int width, std::vector<double> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  require(channels > 0 && height > 0 && width > 0, Errc::invalid_argument, "LatentTensor: dimensions must be positive");
  require(values_.size() == static_cast<std::size_t>(channels) * height * width, Errc::shape_mismatch,
          "LatentTensor: value count does not match dimensions");
  for (double x : values_) require(std::isfinite(x), Errc::invalid_argument, "LatentTensor: non-finite value");
}

Tensor LatentTensor::to_tensor() const {
  return Tensor::from<double>({static_cast<std::uint64_t>(channels_), static_cast<std::uint64_t>(height_),
                               static_cast<std::uint64_t>(width_)},
                              values_);
}

LatentTensor LatentTensor::from_tensor(const Tensor& t) {
  require(t.dtype() == DType::f64 || t.dtype() == DType::f32, Errc::format, "latent tensor must be f32 or f64");
  require(t.ndim() == 3, Errc::shape_mismatch, "latent tensor must have shape C x H x W");
  return LatentTensor(static_cast<int>(t.dim(0)), static_cast<int>(t.dim(1)), static_cast<int>(t.dim(2)), t.as_f64());
}

void StepWindow::validate(int total_steps) const {
  require(lo >= 0 && lo <= hi && hi < total_steps, Errc::invalid_argument,
          "step window [" + std::to_string(lo) + ", " + std::to_string(hi) + "] invalid for T = " +
              std::to_string(total_steps));
}

int progress_index(int t, int total_steps) {
  require(t >= 1 && t <= total_steps, Errc::out_of_range, "progress_index: step must be in [1, T]");
  return total_steps - t;
}

bool step_in_window(int t, int total_steps, const StepWindow& window, int frame_number) {
  if (frame_number <= 1) return false;
  return window.contains(progress_index(t, total_steps));
}

LatentTensor align_latent(const LatentTensor& cur, const LatentTensor& prev, const Mapping& m) {
  require(cur.same_shape(prev), Errc::shape_mismatch, "align_latent: latent shapes differ");
  for (const auto& p : m.pairs) {
    require(p.q.row >= 0 && p.q.row < cur.height() && p.q.col >= 0 && p.q.col < cur.width() && p.s.row >= 0 &&
                p.s.row < prev.height() && p.s.col >= 0 && p.s.col < prev.width(),
            Errc::out_of_range, "align_latent: mapping coordinate outside latent grid");
  }
  LatentTensor out = cur;
  for (int c = 0; c < cur.channels(); ++c)
    for (const auto& p : m.pairs) out(c, p.q.row, p.q.col) = prev(c, p.s.row, p.s.col);
  return out;
}

}  // namespace corrsync
