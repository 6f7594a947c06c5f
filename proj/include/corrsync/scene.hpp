#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrsync/embedding.hpp"
#include "corrsync/guidance.hpp"
#include "json.hpp"

namespace corrsync {

enum class ShapeKind { disc, rect };

/// One body part of a synthetic character, in character-local integer
/// coordinates (origin at the character anchor).
struct PartShape {
  int part_id = 1;
  ShapeKind kind = ShapeKind::disc;
  int center_row = 0;
  int center_col = 0;
  double radius = 0.0;  // disc: lattice points with d^2 <= radius^2
  int half_height = 0;  // rect: |dr| <= half_height, |dc| <= half_width
  int half_width = 0;
  double depth = 0.5;
};

/// Rigid pose of the character in one frame: quarter-turn rotation about the
/// anchor followed by a translation. Quarter turns keep pixels on the lattice.
struct Pose {
  int d_row = 0;
  int d_col = 0;
  int quarter_turns = 0;
};

struct SyntheticSceneSpec {
  int width = 64;
  int height = 64;
  int anchor_row = 32;
  int anchor_col = 32;
  std::vector<PartShape> parts;
  std::vector<Pose> poses;  // one per frame
  std::uint64_t uv_seed = 0;
  std::string prompt;

  int n_frames() const noexcept { return static_cast<int>(poses.size()); }

  /// Six-part figure (torso, head, two arms, two legs) sized relative to the
  /// canvas, translated by (step_row, step_col) per frame.
  static SyntheticSceneSpec figure(int width, int height, int n_frames, int step_row, int step_col,
                                   std::uint64_t uv_seed = 0);

  nlohmann::json to_json() const;
  static SyntheticSceneSpec from_json(const nlohmann::json& j);
};

struct ConditioningSequence {
  std::vector<ConditioningBlob> conditioning;  // depth-like grids
  std::vector<EmbeddingMap> embeddings;
  std::string prompt;

  std::size_t size() const noexcept { return embeddings.size(); }
  void validate() const;
};

/// Character-local lattice points covered by a part, raster order.
std::vector<Pixel> part_lattice(const PartShape& part);

/// Canvas position of a character-local point under a pose.
Pixel place(const SyntheticSceneSpec& spec, const Pose& pose, Pixel local);

/// Renders every frame. Parts are painted in listed order and earlier parts
/// keep contested pixels. U/V follow the character-local coordinates (plus a
/// per-part seeded offset, mod 256), so they move rigidly with the character
/// and are pairwise distinct within a part.
ConditioningSequence synth_scene(const SyntheticSceneSpec& spec);

}  // namespace corrsync
