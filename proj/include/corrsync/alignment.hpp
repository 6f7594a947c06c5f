#pragma once

#include <vector>

#include "corrsync/matching.hpp"
#include "corrsync/tensor_io.hpp"

namespace corrsync {

/// Per-frame diffusion latent, channel-major (C x H x W).
class LatentTensor {
 public:
  LatentTensor() = default;
  LatentTensor(int channels, int height, int width, double fill = 0.0);
  LatentTensor(int channels, int height, int width, std::vector<double> values);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool same_shape(const LatentTensor& o) const noexcept {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  double operator()(int c, int r, int col) const { return values_[index(c, r, col)]; }
  double& operator()(int c, int r, int col) { return values_[index(c, r, col)]; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Tensor to_tensor() const;  // f64, C x H x W
  static LatentTensor from_tensor(const Tensor& t);

  friend bool operator==(const LatentTensor&, const LatentTensor&) = default;

 private:
  std::size_t index(int c, int r, int col) const {
    return (static_cast<std::size_t>(c) * height_ + r) * width_ + col;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

/// Inclusive range of denoising-progress indices. Progress index p = T - t
/// for DDIM step t in [1, T], so p = 0 is the first (noisiest) step.
struct StepWindow {
  int lo = 0;
  int hi = -1;

  bool contains(int progress) const noexcept { return progress >= lo && progress <= hi; }
  int size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
  void validate(int total_steps) const;
  friend bool operator==(const StepWindow&, const StepWindow&) = default;
};

int progress_index(int t, int total_steps);

/// True when `frame_number` (1-based) has a predecessor and step t falls in
/// the window.
bool step_in_window(int t, int total_steps, const StepWindow& window, int frame_number);

inline bool should_align(int t, int total_steps, const StepWindow& window, int frame_number) {
  return step_in_window(t, total_steps, window, frame_number);
}

/// Copies every channel of prev at s into cur at q for each mapped pair.
/// Values are transferred without arithmetic; unmapped sites keep cur.
LatentTensor align_latent(const LatentTensor& cur, const LatentTensor& prev, const Mapping& m);

}  // namespace corrsync
