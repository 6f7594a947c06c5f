#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace corrsync {

struct LapTiming {
  int n = 0;
  double seconds = 0.0;  // median over repetitions
};

struct LapScaling {
  std::vector<LapTiming> points;
  double slope = 0.0;  // least-squares slope of log(seconds) against log(n)
};

/// Times solve_lap on square matrices with i.i.d. uniform [0, 1) entries.
LapScaling measure_lap_scaling(std::span<const int> sizes, int repetitions, std::uint64_t seed);

double loglog_slope(std::span<const LapTiming> points);

}  // namespace corrsync
