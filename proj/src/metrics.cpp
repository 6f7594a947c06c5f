#include "corrsync/metrics.hpp"

#include <string>

namespace corrsync {

MetricReport hmse(std::span<const FrameImage> frames, std::span<const Mapping> mappings) {
  require(frames.size() >= 2, Errc::invalid_argument, "hmse: need at least two frames");
  require(mappings.size() + 1 == frames.size(), Errc::shape_mismatch, "hmse: need exactly one mapping per frame pair");
  MetricReport rep;
  double sum = 0.0;
  for (std::size_t k = 0; k < mappings.size(); ++k) {
    const FrameImage& cur = frames[k + 1];
    const FrameImage& prev = frames[k];
    const Mapping& m = mappings[k];
    require(!m.empty(), Errc::invalid_argument, "hmse: mapping " + std::to_string(k) + " is empty");
    require(cur.same_shape(prev), Errc::shape_mismatch, "hmse: frame shapes differ");
    double acc = 0.0;
    for (const auto& p : m.pairs) {
      require(cur.contains(p.q.row, p.q.col) && prev.contains(p.s.row, p.s.col), Errc::out_of_range,
              "hmse: mapping coordinate outside frame");
      double px = 0.0;
      for (int c = 0; c < FrameImage::kChannels; ++c) {
        const double d = 255.0 * (cur(c, p.q.row, p.q.col) - prev(c, p.s.row, p.s.col));
        px += d * d;
      }
      acc += px / FrameImage::kChannels;
    }
    const double mse = acc / static_cast<double>(m.size());
    rep.per_pair.push_back({static_cast<int>(k + 1), m.size(), mse});
    sum += mse;
  }
  rep.h_mse = sum / static_cast<double>(mappings.size());
  return rep;
}

}  // namespace corrsync
