#pragma once

#include <filesystem>
#include <utility>

#include "corrsync/embedding.hpp"
#include "corrsync/image.hpp"
#include "corrsync/matching.hpp"

namespace corrsync {

/// Colour for a pixel coordinate; never pure black.
std::array<std::uint8_t, 3> coordinate_color(Pixel p);

struct MappingPanes {
  Rgb8Image current;   // body pixels of frame i coloured by coordinate hash
  Rgb8Image previous;  // frame i-1 pixels take their partner's colour; unmatched stay black
};

MappingPanes render_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, const Mapping& m);

/// Writes `<stem>_cur.ppm` and `<stem>_prev.ppm` next to `out`; returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> viz_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev,
                                                                    const Mapping& m, const std::filesystem::path& out);

}  // namespace corrsync
