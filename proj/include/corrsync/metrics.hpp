#pragma once

#include <span>
#include <vector>

#include "corrsync/image.hpp"
#include "corrsync/matching.hpp"

namespace corrsync {

struct PairError {
  int frame = 0;          // 0-based index of the later frame of the pair
  std::size_t count = 0;  // mapped pixel pairs
  double mse = 0.0;
};

struct MetricReport {
  double h_mse = 0.0;
  std::vector<PairError> per_pair;
};

/// Human MSE over a sequence. mappings[k] relates frames[k + 1] (q) to
/// frames[k] (s). Pixels are scaled to 0..255, squared differences are
/// averaged over the three channels and the mapped pairs, and the per-pair
/// errors are averaged over the N - 1 consecutive pairs.
MetricReport hmse(std::span<const FrameImage> frames, std::span<const Mapping> mappings);

}  // namespace corrsync
