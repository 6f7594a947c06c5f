#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "corrsync/tensor_io.hpp"

namespace corrsync {

/// RGB frame, channel-major (3 x H x W), nominal range [0, 1].
class FrameImage {
 public:
  static constexpr int kChannels = 3;

  FrameImage() = default;
  FrameImage(int height, int width, double fill = 0.0);
  FrameImage(int height, int width, std::vector<double> values);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool same_shape(const FrameImage& o) const noexcept { return height_ == o.height_ && width_ == o.width_; }
  bool contains(int r, int c) const noexcept { return r >= 0 && c >= 0 && r < height_ && c < width_; }

  double operator()(int c, int r, int col) const { return values_[index(c, r, col)]; }
  double& operator()(int c, int r, int col) { return values_[index(c, r, col)]; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Tensor to_tensor() const;  // f64, 3 x H x W
  static FrameImage from_tensor(const Tensor& t);

  friend bool operator==(const FrameImage&, const FrameImage&) = default;

 private:
  std::size_t index(int c, int r, int col) const {
    return (static_cast<std::size_t>(c) * height_ + r) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

/// Interleaved 8-bit RGB raster as stored in binary PPM.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // height * width * 3

  friend bool operator==(const Rgb8Image&, const Rgb8Image&) = default;
};

/// Rounds to nearest after clamping to [0, 1].
Rgb8Image to_rgb8(const FrameImage& img);

std::vector<std::uint8_t> encode_ppm(const Rgb8Image& img);
Rgb8Image decode_ppm(const std::vector<std::uint8_t>& bytes);
void write_ppm(const std::filesystem::path& path, const Rgb8Image& img);
Rgb8Image read_ppm(const std::filesystem::path& path);

}  // namespace corrsync
