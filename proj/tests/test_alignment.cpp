#include <algorithm>

#include "corrsync/alignment.hpp"
#include "corrsync/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace corrsync;

TEST_CASE("align_latent examples") {
  Rng rng(1);
  const auto cur = oracle::random_latent(rng, 4, 6, 5);
  auto prev = oracle::random_latent(rng, 4, 6, 5);

  CHECK(align_latent(cur, prev, Mapping{}) == cur);

  for (int c = 0; c < 4; ++c) prev(c, 3, 2) = 7.5;
  const auto one = align_latent(cur, prev, Mapping{{{{1, 1}, {3, 2}, 1}}});
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 6; ++r)
      for (int k = 0; k < 5; ++k) CHECK(one(c, r, k) == (r == 1 && k == 1 ? 7.5 : cur(c, r, k)));

  Mapping id;
  for (int r = 0; r < 6; ++r)
    for (int k = 0; k < 5; ++k) id.pairs.push_back({{r, k}, {r, k}, 1});
  CHECK(align_latent(cur, prev, id) == prev);
}

TEST_CASE("align_latent properties on random instances") {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const auto cur = oracle::random_latent(rng, 4, 12, 10);
    const auto prev = oracle::random_latent(rng, 4, 12, 10);
    const auto m = oracle::random_mapping(rng, 12, 10, 1 + static_cast<int>(rng.below(100)));
    const auto out = align_latent(cur, prev, m);
    const auto twice = align_latent(out, prev, m);
    CHECK(twice == out);

    std::vector<bool> mapped(120, false);
    for (const auto& p : m.pairs) {
      mapped[static_cast<std::size_t>(p.q.row) * 10 + p.q.col] = true;
      for (int c = 0; c < 4; ++c) CHECK(out(c, p.q.row, p.q.col) == prev(c, p.s.row, p.s.col));
    }
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 12; ++r)
        for (int k = 0; k < 10; ++k)
          if (!mapped[static_cast<std::size_t>(r) * 10 + k]) CHECK(out(c, r, k) == cur(c, r, k));

    // Mapped values form the same multiset in both frames.
    std::vector<double> a, b;
    for (const auto& p : m.pairs)
      for (int c = 0; c < 4; ++c) {
        a.push_back(out(c, p.q.row, p.q.col));
        b.push_back(prev(c, p.s.row, p.s.col));
      }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("align_latent rejects bad inputs") {
  const LatentTensor a(2, 3, 3), b(2, 3, 4);
  CHECK_THROWS_AS(align_latent(a, b, Mapping{}), Error);
  CHECK_THROWS_AS(align_latent(a, a, Mapping{{{{0, 0}, {3, 0}, 1}}}), Error);
  CHECK_THROWS_AS(LatentTensor(1, 1, 1, std::vector<double>{NAN}), Error);
  CHECK_THROWS_AS(LatentTensor(0, 1, 1), Error);
}

TEST_CASE("should_align window gating") {
  const StepWindow a{0, 39};
  for (int t = 1; t <= 100; ++t) CHECK_FALSE(should_align(t, 100, a, 1));
  // progress index 10 is t = 90; progress 40 is t = 60.
  CHECK(progress_index(90, 100) == 10);
  CHECK(should_align(90, 100, a, 2));
  CHECK_FALSE(should_align(60, 100, a, 2));
  CHECK(should_align(61, 100, a, 2));
  int fired = 0;
  for (int t = 1; t <= 100; ++t) fired += should_align(t, 100, a, 3);
  CHECK(fired == 40);
  CHECK(static_cast<double>(fired) / 100.0 == doctest::Approx(0.40));

  CHECK_THROWS_AS(progress_index(0, 100), Error);
  CHECK_THROWS_AS(progress_index(101, 100), Error);
  CHECK_THROWS_AS((StepWindow{5, 4}.validate(100)), Error);
  CHECK_THROWS_AS((StepWindow{0, 100}.validate(100)), Error);
  CHECK_NOTHROW((StepWindow{20, 69}.validate(100)));
}

TEST_CASE("LatentTensor tensor round trip") {
  Rng rng(3);
  const auto x = oracle::random_latent(rng, 4, 3, 2);
  const Tensor t = x.to_tensor();
  CHECK(t.dtype() == DType::f64);
  CHECK(LatentTensor::from_tensor(t) == x);
}
