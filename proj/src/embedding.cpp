#include "corrsync/embedding.hpp"

#include <cmath>
#include <string>

namespace corrsync {

namespace {

// u8 storage already bounds U/V to 0..255; only labels need a check.
void check_labels(const std::vector<std::uint8_t>& labels) {
  for (auto l : labels)
    require(l <= kMaxPartId, Errc::out_of_range, "EmbeddingMap: label outside [0, 24]");
}

}  // namespace

EmbeddingMap::EmbeddingMap(int width, int height) : width_(width), height_(height) {
  require(width >= 0 && height >= 0, Errc::invalid_argument, "EmbeddingMap: negative dimension");
  const auto n = static_cast<std::size_t>(width) * height;
  labels_.assign(n, 0);
  u_.assign(n, 0);
  v_.assign(n, 0);
}

EmbeddingMap::EmbeddingMap(int width, int height, std::vector<std::uint8_t> labels, std::vector<std::uint8_t> u,
                           std::vector<std::uint8_t> v)
    : width_(width), height_(height), labels_(std::move(labels)), u_(std::move(u)), v_(std::move(v)) {
  require(width >= 0 && height >= 0, Errc::invalid_argument, "EmbeddingMap: negative dimension");
  const auto n = static_cast<std::size_t>(width) * height;
  require(labels_.size() == n && u_.size() == n && v_.size() == n, Errc::shape_mismatch,
          "EmbeddingMap: channel sizes differ from width*height");
  check_labels(labels_);
}

void EmbeddingMap::set(Pixel p, int label, int u, int v) {
  require(contains(p), Errc::out_of_range, "EmbeddingMap::set: pixel outside grid");
  require(label >= 0 && label <= kMaxPartId, Errc::out_of_range, "EmbeddingMap::set: label outside [0, 24]");
  require(u >= 0 && u <= kMaxUv && v >= 0 && v <= kMaxUv, Errc::out_of_range,
          "EmbeddingMap::set: UV outside [0, 255]");
  const auto i = index(p);
  labels_[i] = static_cast<std::uint8_t>(label);
  u_[i] = static_cast<std::uint8_t>(u);
  v_[i] = static_cast<std::uint8_t>(v);
}

Tensor EmbeddingMap::to_tensor() const {
  std::vector<std::uint8_t> buf;
  buf.reserve(3 * size());
  buf.insert(buf.end(), labels_.begin(), labels_.end());
  buf.insert(buf.end(), u_.begin(), u_.end());
  buf.insert(buf.end(), v_.begin(), v_.end());
  return Tensor::from<std::uint8_t>({3, static_cast<std::uint64_t>(height_), static_cast<std::uint64_t>(width_)}, buf);
}

EmbeddingMap EmbeddingMap::from_tensor(const Tensor& t) {
  require(t.dtype() == DType::u8, Errc::format, "embedding tensor must be u8");
  require(t.ndim() == 3 && t.dim(0) == 3, Errc::shape_mismatch, "embedding tensor must have shape 3 x H x W");
  const int h = static_cast<int>(t.dim(1));
  const int w = static_cast<int>(t.dim(2));
  const auto all = t.values<std::uint8_t>();
  const auto n = static_cast<std::size_t>(w) * h;
  std::vector<std::uint8_t> l(all.begin(), all.begin() + n);
  std::vector<std::uint8_t> u(all.begin() + n, all.begin() + 2 * n);
  std::vector<std::uint8_t> v(all.begin() + 2 * n, all.end());
  return EmbeddingMap(w, h, std::move(l), std::move(u), std::move(v));
}

PartPixelSet part_pixels(const EmbeddingMap& emb, int part_id) {
  require(part_id >= 1 && part_id <= kMaxPartId, Errc::invalid_argument,
          "part_pixels: part id must be in [1, 24]");
  PartPixelSet out{part_id, {}};
  const auto& labels = emb.labels();
  for (int r = 0; r < emb.height(); ++r)
    for (int c = 0; c < emb.width(); ++c)
      if (labels[static_cast<std::size_t>(r) * emb.width() + c] == part_id) out.pixels.push_back({r, c});
  return out;
}

Centroid centroid(const PartPixelSet& part) {
  require(!part.pixels.empty(), Errc::invalid_argument, "centroid: empty pixel set");
  // Integer sums are exact, so the mean is a single correctly rounded division.
  long long sr = 0;
  long long sc = 0;
  for (const auto& p : part.pixels) {
    sr += p.row;
    sc += p.col;
  }
  const auto n = static_cast<double>(part.pixels.size());
  return {static_cast<double>(sr) / n, static_cast<double>(sc) / n};
}

FeatureMatrix feature_matrix(const EmbeddingMap& emb, const PartPixelSet& part, const FeatureWeights& w) {
  require(!part.pixels.empty(), Errc::invalid_argument, "feature_matrix: empty pixel set");
  const Centroid ctr = centroid(part);
  FeatureMatrix fm;
  fm.rows.reserve(part.pixels.size());
  for (const auto& p : part.pixels) {
    require(emb.contains(p) && emb.label(p) == part.part_id, Errc::invalid_argument,
            "feature_matrix: pixel set does not match embedding labels");
    const double e = std::hypot(p.row - ctr.row, p.col - ctr.col);
    fm.rows.push_back({w.u * emb.u(p), w.v * emb.v(p), w.e * e});
  }
  return fm;
}

int nearest_source_index(int i, int src, int dst) {
  // floor((i + 0.5) * src / dst) in exact integer arithmetic.
  return static_cast<int>((static_cast<long long>(2 * i + 1) * src) / (2LL * dst));
}

EmbeddingMap downsample(const EmbeddingMap& emb, int out_width, int out_height) {
  require(out_width > 0 && out_height > 0, Errc::invalid_argument, "downsample: zero output dimension");
  require(out_width <= emb.width() && out_height <= emb.height(), Errc::invalid_argument,
          "downsample: output larger than input");
  if (out_width == emb.width() && out_height == emb.height()) return emb;
  const auto n = static_cast<std::size_t>(out_width) * out_height;
  std::vector<std::uint8_t> l(n), u(n), v(n);
  for (int r = 0; r < out_height; ++r) {
    const int sr = nearest_source_index(r, emb.height(), out_height);
    for (int c = 0; c < out_width; ++c) {
      const int sc = nearest_source_index(c, emb.width(), out_width);
      const auto o = static_cast<std::size_t>(r) * out_width + c;
      const auto s = static_cast<std::size_t>(sr) * emb.width() + sc;
      l[o] = emb.labels()[s];
      u[o] = emb.u_coords()[s];
      v[o] = emb.v_coords()[s];
    }
  }
  return EmbeddingMap(out_width, out_height, std::move(l), std::move(u), std::move(v));
}

}  // namespace corrsync
