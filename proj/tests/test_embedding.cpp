#include <cmath>
#include <numeric>

#include "corrsync/embedding.hpp"
#include "corrsync/rng.hpp"
#include "corrsync/scene.hpp"
#include "doctest.h"

using namespace corrsync;

namespace {

EmbeddingMap from_labels(int w, int h, const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> u(labels.size()), v(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    u[i] = static_cast<std::uint8_t>(i * 7 % 256);
    v[i] = static_cast<std::uint8_t>(i * 13 % 256);
  }
  return EmbeddingMap(w, h, labels, u, v);
}

EmbeddingMap random_map(Rng& rng, int w, int h, int max_label) {
  EmbeddingMap e(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      e.set({r, c}, static_cast<int>(rng.below(max_label + 1)), static_cast<int>(rng.below(256)),
            static_cast<int>(rng.below(256)));
  return e;
}

// 64x64 canvas with a single torso disc of radius 6.5 (137 lattice points).
EmbeddingMap torso_disc() {
  SyntheticSceneSpec s;
  s.width = s.height = 64;
  s.anchor_row = s.anchor_col = 30;
  s.parts = {{2, ShapeKind::disc, 0, 0, 6.5, 0, 0, 0.5}};
  s.poses = {{0, 0, 0}};
  return synth_scene(s).embeddings[0];
}

}  // namespace

TEST_CASE("part_pixels basic cases") {
  const EmbeddingMap empty(4, 4);
  CHECK(part_pixels(empty, 1).pixels.empty());

  const auto e = from_labels(2, 2, {1, 1, 2, 1});
  const auto p = part_pixels(e, 1);
  CHECK(p.part_id == 1);
  CHECK(p.pixels == std::vector<Pixel>{{0, 0}, {0, 1}, {1, 1}});

  CHECK_THROWS_AS(part_pixels(e, 0), Error);
  CHECK_THROWS_AS(part_pixels(e, 25), Error);
}

TEST_CASE("part_pixels on the synthetic torso disc") {
  // Lattice points with dr^2 + dc^2 <= 42.25, counted directly.
  int expected = 0;
  for (int dr = -7; dr <= 7; ++dr)
    for (int dc = -7; dc <= 7; ++dc) expected += dr * dr + dc * dc <= 42.25;
  REQUIRE(expected == 137);
  CHECK(part_pixels(torso_disc(), 2).pixels.size() == 137);
}

TEST_CASE("centroid is the coordinate mean") {
  CHECK(centroid({1, {{2, 3}}}).row == 2.0);
  const auto sq = centroid({1, {{0, 0}, {0, 2}, {2, 0}, {2, 2}}});
  CHECK(sq.row == 1.0);
  CHECK(sq.col == 1.0);
  const auto tri = centroid({1, {{2, 3}, {4, 5}, {6, 10}}});
  CHECK(tri.row == 4.0);
  CHECK(tri.col == 6.0);
  CHECK_THROWS_AS(centroid({1, {}}), Error);
}

TEST_CASE("feature_matrix rows") {
  EmbeddingMap e(8, 8);
  e.set({2, 3}, 5, 100, 50);
  e.set({4, 5}, 5, 11, 12);
  const auto fm = feature_matrix(e, part_pixels(e, 5));
  REQUIRE(fm.size() == 2);
  CHECK(fm.rows[0][0] == 100.0);
  CHECK(fm.rows[0][1] == 50.0);
  CHECK(fm.rows[0][2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  EmbeddingMap single(3, 3);
  single.set({1, 1}, 9, 7, 9);
  const auto one = feature_matrix(single, part_pixels(single, 9));
  CHECK(one.rows[0] == std::array<double, 3>{7.0, 9.0, 0.0});

  const FeatureWeights w{2.0, 0.5, 0.0};
  const auto weighted = feature_matrix(e, part_pixels(e, 5), w);
  CHECK(weighted.rows[1] == std::array<double, 3>{22.0, 6.0, 0.0});

  CHECK_THROWS_AS(feature_matrix(e, PartPixelSet{5, {}}), Error);
  CHECK_THROWS_AS(feature_matrix(e, PartPixelSet{6, {{2, 3}}}), Error);
}

TEST_CASE("feature_matrix distance column matches direct recomputation on the disc") {
  const auto emb = torso_disc();
  const auto part = part_pixels(emb, 2);
  const auto fm = feature_matrix(emb, part);
  double sr = 0, sc = 0;
  for (const auto& p : part.pixels) {
    sr += p.row;
    sc += p.col;
  }
  sr /= part.pixels.size();
  sc /= part.pixels.size();
  double expected = 0.0, got = 0.0, min_e = 1e9;
  for (std::size_t i = 0; i < part.pixels.size(); ++i) {
    const double dr = part.pixels[i].row - sr;
    const double dc = part.pixels[i].col - sc;
    expected += std::sqrt(dr * dr + dc * dc);
    got += fm.rows[i][2];
    min_e = std::min(min_e, fm.rows[i][2]);
  }
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  // The disc is symmetric about its centre pixel, which sits exactly on the centroid.
  CHECK(min_e == 0.0);
}

TEST_CASE("part sets form a disjoint cover of the grid") {
  Rng rng(5);
  const auto e = random_map(rng, 17, 13, 24);
  std::vector<int> hits(e.size(), 0);
  for (int j = 1; j <= kMaxPartId; ++j)
    for (const auto& p : part_pixels(e, j).pixels) ++hits[static_cast<std::size_t>(p.row) * 17 + p.col];
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == (e.labels()[i] == 0 ? 0 : 1));
}

TEST_CASE("downsample identity, constants and sampling coordinates") {
  Rng rng(8);
  const auto e = random_map(rng, 9, 7, 24);
  CHECK(downsample(e, 9, 7) == e);

  EmbeddingMap c(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) c.set({r, k}, 3, 10, 20);
  const auto d = downsample(c, 2, 2);
  CHECK(d.width() == 2);
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k < 2; ++k) {
      CHECK(d.label({r, k}) == 3);
      CHECK(d.u({r, k}) == 10);
      CHECK(d.v({r, k}) == 20);
    }

  CHECK_THROWS_AS(downsample(e, 0, 3), Error);
  CHECK_THROWS_AS(downsample(e, 10, 3), Error);
}

TEST_CASE("downsample of a 512x512 scene samples at floor((i + 0.5) * src / dst)") {
  const auto spec = SyntheticSceneSpec::figure(512, 512, 1, 0, 0, 3);
  const auto full = synth_scene(spec).embeddings[0];
  const auto small = downsample(full, 64, 64);
  int body = 0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const int sr = static_cast<int>(std::floor((r + 0.5) * 512.0 / 64.0));
      const int sc = static_cast<int>(std::floor((c + 0.5) * 512.0 / 64.0));
      CHECK(small.label({r, c}) == full.label({sr, sc}));
      CHECK(small.u({r, c}) == full.u({sr, sc}));
      body += small.label({r, c}) != 0;
    }
  CHECK(body > 0);
}

TEST_CASE("downsample commutes with relabelling") {
  Rng rng(21);
  const auto e = random_map(rng, 31, 29, 24);
  std::array<int, 25> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 24; i > 1; --i) std::swap(perm[i], perm[1 + rng.below(i)]);
  auto relabel = [&](const EmbeddingMap& m) {
    std::vector<std::uint8_t> l = m.labels();
    for (auto& x : l) x = static_cast<std::uint8_t>(perm[x]);
    return EmbeddingMap(m.width(), m.height(), l, m.u_coords(), m.v_coords());
  };
  CHECK(downsample(relabel(e), 11, 8) == relabel(downsample(e, 11, 8)));
}

TEST_CASE("EmbeddingMap validation and tensor round trip") {
  CHECK_THROWS_AS(EmbeddingMap(2, 2, {0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(EmbeddingMap(1, 1, {25}, {0}, {0}), Error);
  EmbeddingMap e(3, 2);
  CHECK_THROWS_AS(e.set({0, 0}, 1, 256, 0), Error);
  CHECK_THROWS_AS(e.set({2, 0}, 1, 0, 0), Error);
  Rng rng(2);
  const auto r = random_map(rng, 5, 3, 24);
  const Tensor t = r.to_tensor();
  CHECK(t.dims() == std::vector<std::uint64_t>{3, 3, 5});
  CHECK(EmbeddingMap::from_tensor(t) == r);
}
