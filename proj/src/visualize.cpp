#include "corrsync/visualize.hpp"

#include "corrsync/rng.hpp"

namespace corrsync {

std::array<std::uint8_t, 3> coordinate_color(Pixel p) {
  const std::uint64_t h =
      mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.row)) << 32) | static_cast<std::uint32_t>(p.col));
  // Keep each channel at 32 or above so mapped pixels never read as black.
  return {static_cast<std::uint8_t>(32 + (h & 0xff) % 224), static_cast<std::uint8_t>(32 + ((h >> 8) & 0xff) % 224),
          static_cast<std::uint8_t>(32 + ((h >> 16) & 0xff) % 224)};
}

MappingPanes render_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, const Mapping& m) {
  validate_mapping(m, cur, prev);
  auto blank = [](const EmbeddingMap& e) {
    return Rgb8Image{e.width(), e.height(), std::vector<std::uint8_t>(e.size() * 3, 0)};
  };
  MappingPanes panes{blank(cur), blank(prev)};
  auto paint = [](Rgb8Image& img, Pixel p, const std::array<std::uint8_t, 3>& rgb) {
    const std::size_t o = (static_cast<std::size_t>(p.row) * img.width + p.col) * 3;
    img.rgb[o] = rgb[0];
    img.rgb[o + 1] = rgb[1];
    img.rgb[o + 2] = rgb[2];
  };
  for (int r = 0; r < cur.height(); ++r)
    for (int c = 0; c < cur.width(); ++c)
      if (cur.label({r, c}) != kBackground) paint(panes.current, {r, c}, coordinate_color({r, c}));
  for (const auto& p : m.pairs) paint(panes.previous, p.s, coordinate_color(p.q));
  return panes;
}

std::pair<std::filesystem::path, std::filesystem::path> viz_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev,
                                                                    const Mapping& m, const std::filesystem::path& out) {
  const MappingPanes panes = render_mapping(cur, prev, m);
  const auto stem = out.parent_path() / out.stem();
  std::filesystem::path a = stem.string() + "_cur.ppm";
  std::filesystem::path b = stem.string() + "_prev.ppm";
  write_ppm(a, panes.current);
  write_ppm(b, panes.previous);
  return {a, b};
}

}  // namespace corrsync
