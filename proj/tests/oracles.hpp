#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "corrsync/alignment.hpp"
#include "corrsync/image.hpp"
#include "corrsync/matching.hpp"
#include "corrsync/rng.hpp"

namespace oracle {

using namespace corrsync;

inline double naive_loss(const FrameImage& cur, const FrameImage& prev, const Mapping& m) {
  double total = 0.0;
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    const auto& p = m.pairs[k];
    for (int c = 0; c < 3; ++c) {
      const double a = cur.values()[(static_cast<std::size_t>(c) * cur.height() + p.q.row) * cur.width() + p.q.col];
      const double b =
          prev.values()[(static_cast<std::size_t>(c) * prev.height() + p.s.row) * prev.width() + p.s.col];
      total += (a - b) * (a - b);
    }
  }
  return total;
}

/// Triple loop over frame pairs, mapped pixels and channels.
inline double naive_hmse(const std::vector<FrameImage>& frames, const std::vector<Mapping>& maps) {
  double outer = 0.0;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    double inner = 0.0;
    for (const auto& p : maps[k].pairs) {
      for (int c = 0; c < 3; ++c) {
        const double a = 255.0 * frames[k + 1](c, p.q.row, p.q.col);
        const double b = 255.0 * frames[k](c, p.s.row, p.s.col);
        inner += (a - b) * (a - b) / 3.0;
      }
    }
    outer += inner / static_cast<double>(maps[k].pairs.size());
  }
  return outer / static_cast<double>(maps.size());
}

/// Central finite-difference gradient of a scalar function of a latent.
inline LatentTensor fd_gradient(const LatentTensor& x, const std::function<double(const LatentTensor&)>& f,
                                double h = 1e-6) {
  LatentTensor g(x.channels(), x.height(), x.width(), 0.0);
  LatentTensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe.values()[i];
    probe.values()[i] = orig + h;
    const double fp = f(probe);
    probe.values()[i] = orig - h;
    const double fm = f(probe);
    probe.values()[i] = orig;
    g.values()[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline CostMatrix random_costs(Rng& rng, int rows, int cols, bool integer_valued = false) {
  CostMatrix c(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < cols; ++k)
      c(r, k) = integer_valued ? static_cast<double>(rng.below(4)) : rng.uniform(0.0, 10.0);
  return c;
}

/// Random injective mapping between two h x w grids.
inline Mapping random_mapping(Rng& rng, int h, int w, int count) {
  std::vector<Pixel> all;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) all.push_back({r, c});
  auto shuffled = [&] {
    std::vector<Pixel> v = all;
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    return v;
  };
  const auto qs = shuffled();
  const auto ss = shuffled();
  Mapping m;
  for (int i = 0; i < count; ++i) m.pairs.push_back({qs[i], ss[i], 1});
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

inline FrameImage random_image(Rng& rng, int h, int w, double lo = 0.0, double hi = 1.0) {
  FrameImage img(h, w);
  for (auto& v : img.values()) v = rng.uniform(lo, hi);
  return img;
}

inline LatentTensor random_latent(Rng& rng, int c, int h, int w, double lo = -1.0, double hi = 1.0) {
  LatentTensor x(c, h, w);
  for (auto& v : x.values()) v = rng.uniform(lo, hi);
  return x;
}

}  // namespace oracle
