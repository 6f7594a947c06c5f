#include <filesystem>

#include "corrsync/matching.hpp"
#include "corrsync/scene.hpp"
#include "corrsync/visualize.hpp"
#include "doctest.h"

using namespace corrsync;

namespace {

std::array<std::uint8_t, 3> at(const Rgb8Image& img, int r, int c) {
  const std::size_t o = (static_cast<std::size_t>(r) * img.width + c) * 3;
  return {img.rgb[o], img.rgb[o + 1], img.rgb[o + 2]};
}

}  // namespace

TEST_CASE("empty mapping leaves the previous pane black") {
  const auto seq = synth_scene(SyntheticSceneSpec::figure(48, 48, 2, 0, 2, 1));
  const auto panes = render_mapping(seq.embeddings[1], seq.embeddings[0], Mapping{});
  for (auto b : panes.previous.rgb) CHECK(b == 0);
  bool any = false;
  for (auto b : panes.current.rgb) any = any || b != 0;
  CHECK(any);
}

TEST_CASE("identity mapping gives identical panes") {
  const auto seq = synth_scene(SyntheticSceneSpec::figure(48, 48, 1, 0, 0, 1));
  const auto& e = seq.embeddings[0];
  const auto panes = render_mapping(e, e, full_mapping(e, e));
  CHECK(panes.current == panes.previous);
}

TEST_CASE("shifted scene pane is the translated current pane") {
  const auto seq = synth_scene(SyntheticSceneSpec::figure(64, 64, 2, 0, 6, 2));
  const auto& cur = seq.embeddings[1];
  const auto& prev = seq.embeddings[0];
  const auto panes = render_mapping(cur, prev, full_mapping(cur, prev));
  for (int r = 0; r < 64; ++r)
    for (int c = 6; c < 64; ++c)
      if (cur.label({r, c}) != 0) CHECK(at(panes.previous, r, c - 6) == at(panes.current, r, c));
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      if (prev.label({r, c}) == 0) CHECK(at(panes.previous, r, c) == std::array<std::uint8_t, 3>{0, 0, 0});
}

TEST_CASE("viz_mapping writes both panes") {
  const auto seq = synth_scene(SyntheticSceneSpec::figure(32, 32, 1, 0, 0, 1));
  const auto& e = seq.embeddings[0];
  const auto dir = std::filesystem::temp_directory_path() / "corrsync_viz_test";
  std::filesystem::create_directories(dir);
  const auto [a, b] = viz_mapping(e, e, full_mapping(e, e), dir / "out.ppm");
  CHECK(read_ppm(a) == read_ppm(b));
  CHECK(read_ppm(a).width == 32);
  std::filesystem::remove_all(dir);
}
