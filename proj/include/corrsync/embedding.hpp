#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "corrsync/tensor_io.hpp"

namespace corrsync {

inline constexpr int kBackground = 0;
inline constexpr int kMaxPartId = 24;
inline constexpr int kMaxUv = 255;

struct Pixel {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// DensePose-style per-pixel embedding: body-part label (0 = background,
/// 1..24 = parts) plus per-part U/V chart coordinates in 0..255.
/// Storage is row-major, height x width.
class EmbeddingMap {
 public:
  EmbeddingMap() = default;
  /// All-background map with zero UVs.
  EmbeddingMap(int width, int height);
  EmbeddingMap(int width, int height, std::vector<std::uint8_t> labels, std::vector<std::uint8_t> u,
               std::vector<std::uint8_t> v);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(Pixel p) const noexcept { return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_; }

  int label(Pixel p) const { return labels_[index(p)]; }
  int u(Pixel p) const { return u_[index(p)]; }
  int v(Pixel p) const { return v_[index(p)]; }
  void set(Pixel p, int label, int u, int v);

  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  const std::vector<std::uint8_t>& u_coords() const noexcept { return u_; }
  const std::vector<std::uint8_t>& v_coords() const noexcept { return v_; }

  /// u8 tensor of shape 3 x height x width, channels (L, U, V).
  Tensor to_tensor() const;
  static EmbeddingMap from_tensor(const Tensor& t);

  friend bool operator==(const EmbeddingMap&, const EmbeddingMap&) = default;

 private:
  std::size_t index(Pixel p) const { return static_cast<std::size_t>(p.row) * width_ + p.col; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint8_t> u_;
  std::vector<std::uint8_t> v_;
};

struct PartPixelSet {
  int part_id = 0;
  std::vector<Pixel> pixels;  // raster order
};

struct Centroid {
  double row = 0.0;
  double col = 0.0;
};

struct FeatureWeights {
  double u = 1.0;
  double v = 1.0;
  double e = 1.0;
};

/// One [U, V, E] row per pixel of the source part, same order; E is the
/// pixel's Euclidean distance to the part centroid.
struct FeatureMatrix {
  std::vector<std::array<double, 3>> rows;
  std::size_t size() const noexcept { return rows.size(); }
};

PartPixelSet part_pixels(const EmbeddingMap& emb, int part_id);

/// Arithmetic mean of the pixel coordinates.
Centroid centroid(const PartPixelSet& part);

FeatureMatrix feature_matrix(const EmbeddingMap& emb, const PartPixelSet& part, const FeatureWeights& w = {});

/// Nearest-neighbour resampling of all three channels. Output pixel i reads
/// source index floor((i + 0.5) * src / dst) along each axis.
EmbeddingMap downsample(const EmbeddingMap& emb, int out_width, int out_height);

/// Source index sampled for output index `i` when resizing `src` to `dst`.
int nearest_source_index(int i, int src, int dst);

}  // namespace corrsync
