#include "corrsync/scene.hpp"

#include <algorithm>
#include <cmath>

#include "corrsync/rng.hpp"

namespace corrsync {

namespace {

Pixel rotate_quarter(Pixel p, int turns) {
  const int k = ((turns % 4) + 4) % 4;
  for (int i = 0; i < k; ++i) p = {p.col, -p.row};
  return p;
}

void validate_part(const PartShape& p) {
  require(p.part_id >= 1 && p.part_id <= kMaxPartId, Errc::invalid_argument, "scene: part id must be in [1, 24]");
  if (p.kind == ShapeKind::disc) {
    require(p.radius >= 0.0 && 2.0 * std::floor(p.radius) + 1.0 <= 256.0, Errc::invalid_argument,
            "scene: disc radius must keep the part within a 256-pixel UV chart");
  } else {
    require(p.half_height >= 0 && p.half_width >= 0 && 2 * p.half_height + 1 <= 256 && 2 * p.half_width + 1 <= 256,
            Errc::invalid_argument, "scene: rectangle must fit within a 256-pixel UV chart");
  }
  require(p.depth >= 0.0 && p.depth <= 0.75, Errc::invalid_argument, "scene: part depth must lie in [0, 0.75]");
}

}  // namespace

std::vector<Pixel> part_lattice(const PartShape& part) {
  std::vector<Pixel> pts;
  if (part.kind == ShapeKind::disc) {
    const int r = static_cast<int>(std::floor(part.radius));
    const double r2 = part.radius * part.radius;
    for (int dr = -r; dr <= r; ++dr)
      for (int dc = -r; dc <= r; ++dc)
        if (dr * dr + dc * dc <= r2) pts.push_back({part.center_row + dr, part.center_col + dc});
  } else {
    for (int dr = -part.half_height; dr <= part.half_height; ++dr)
      for (int dc = -part.half_width; dc <= part.half_width; ++dc)
        pts.push_back({part.center_row + dr, part.center_col + dc});
  }
  return pts;
}

Pixel place(const SyntheticSceneSpec& spec, const Pose& pose, Pixel local) {
  const Pixel r = rotate_quarter(local, pose.quarter_turns);
  return {spec.anchor_row + pose.d_row + r.row, spec.anchor_col + pose.d_col + r.col};
}

void ConditioningSequence::validate() const {
  require(!embeddings.empty(), Errc::invalid_argument, "conditioning: no frames");
  require(conditioning.size() == embeddings.size(), Errc::shape_mismatch,
          "conditioning: need one conditioning grid per embedding");
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    require(embeddings[i].width() == embeddings[0].width() && embeddings[i].height() == embeddings[0].height(),
            Errc::shape_mismatch, "conditioning: embedding sizes differ between frames");
    const auto& c = conditioning[i];
    require(c.values.size() == static_cast<std::size_t>(c.height) * c.width, Errc::shape_mismatch,
            "conditioning: grid size mismatch");
  }
}

ConditioningSequence synth_scene(const SyntheticSceneSpec& spec) {
  require(spec.width > 0 && spec.height > 0, Errc::invalid_argument, "scene: canvas dimensions must be positive");
  require(!spec.poses.empty(), Errc::invalid_argument, "scene: at least one pose required");
  for (const auto& p : spec.parts) validate_part(p);

  const Rng uv_rng(spec.uv_seed);
  std::vector<std::pair<int, int>> uv_offset;
  std::vector<std::vector<Pixel>> lattices;
  for (const auto& part : spec.parts) {
    Rng r = uv_rng.split(static_cast<std::uint64_t>(part.part_id));
    const int ou = static_cast<int>(r.below(256));
    const int ov = static_cast<int>(r.below(256));
    uv_offset.emplace_back(ou, ov);
    lattices.push_back(part_lattice(part));
  }

  ConditioningSequence seq;
  seq.prompt = spec.prompt;
  for (std::size_t f = 0; f < spec.poses.size(); ++f) {
    const Pose& pose = spec.poses[f];
    EmbeddingMap emb(spec.width, spec.height);
    ConditioningBlob depth{spec.height, spec.width,
                           std::vector<double>(static_cast<std::size_t>(spec.width) * spec.height, 0.0), spec.prompt};
    for (std::size_t k = 0; k < spec.parts.size(); ++k) {
      const PartShape& part = spec.parts[k];
      for (const Pixel& local : lattices[k]) {
        const Pixel at = place(spec, pose, local);
        if (!emb.contains(at))
          fail(Errc::out_of_range, "scene: character exits the canvas in frame " + std::to_string(f));
        if (emb.label(at) != kBackground) continue;
        const int u = ((local.row + uv_offset[k].first) % 256 + 256) % 256;
        const int v = ((local.col + uv_offset[k].second) % 256 + 256) % 256;
        emb.set(at, part.part_id, u, v);
        double d = part.depth;
        if (part.kind == ShapeKind::disc && part.radius > 0.0) {
          const double dr = local.row - part.center_row;
          const double dc = local.col - part.center_col;
          d += 0.25 * (1.0 - (dr * dr + dc * dc) / (part.radius * part.radius));
        }
        depth.values[static_cast<std::size_t>(at.row) * spec.width + at.col] = d;
      }
    }
    seq.embeddings.push_back(std::move(emb));
    seq.conditioning.push_back(std::move(depth));
  }
  return seq;
}

SyntheticSceneSpec SyntheticSceneSpec::figure(int width, int height, int n_frames, int step_row, int step_col,
                                              std::uint64_t uv_seed) {
  require(n_frames >= 1, Errc::invalid_argument, "figure: n_frames must be positive");
  SyntheticSceneSpec s;
  s.width = width;
  s.height = height;
  s.uv_seed = uv_seed;
  const int unit = std::max(1, std::min(width, height) / 16);
  // Centre the swept path of the anchor on the canvas.
  const int span_r = step_row * (n_frames - 1);
  const int span_c = step_col * (n_frames - 1);
  s.anchor_row = height / 2 - span_r / 2;
  s.anchor_col = width / 2 - span_c / 2;
  s.parts = {
      {2, ShapeKind::disc, 0, 0, 1.75 * unit, 0, 0, 0.5},                   // torso
      {23, ShapeKind::disc, -3 * unit, 0, 1.1 * unit, 0, 0, 0.6},           // head
      {15, ShapeKind::rect, -unit / 2, -3 * unit, 0.0, unit / 3, unit, 0.4},  // arm
      {16, ShapeKind::rect, -unit / 2, 3 * unit, 0.0, unit / 3, unit, 0.4},   // arm
      {7, ShapeKind::rect, 3 * unit, -unit, 0.0, unit, unit / 3, 0.45},     // leg
      {8, ShapeKind::rect, 3 * unit, unit, 0.0, unit, unit / 3, 0.45},      // leg
  };
  for (int f = 0; f < n_frames; ++f) s.poses.push_back({f * step_row, f * step_col, 0});
  return s;
}

nlohmann::json SyntheticSceneSpec::to_json() const {
  nlohmann::json j;
  j["width"] = width;
  j["height"] = height;
  j["anchor"] = {anchor_row, anchor_col};
  j["uv_seed"] = uv_seed;
  j["prompt"] = prompt;
  for (const auto& p : parts) {
    nlohmann::json jp{{"part_id", p.part_id},
                      {"kind", p.kind == ShapeKind::disc ? "disc" : "rect"},
                      {"center", {p.center_row, p.center_col}},
                      {"depth", p.depth}};
    if (p.kind == ShapeKind::disc) jp["radius"] = p.radius;
    else jp["half_size"] = {p.half_height, p.half_width};
    j["parts"].push_back(jp);
  }
  for (const auto& p : poses) j["poses"].push_back({{"d_row", p.d_row}, {"d_col", p.d_col}, {"quarter_turns", p.quarter_turns}});
  return j;
}

SyntheticSceneSpec SyntheticSceneSpec::from_json(const nlohmann::json& j) {
  SyntheticSceneSpec s;
  try {
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    const auto anchor = j.at("anchor").get<std::vector<int>>();
    require(anchor.size() == 2, Errc::format, "scene JSON: anchor must be [row, col]");
    s.anchor_row = anchor[0];
    s.anchor_col = anchor[1];
    s.uv_seed = j.value("uv_seed", std::uint64_t{0});
    s.prompt = j.value("prompt", std::string{});
    for (const auto& jp : j.at("parts")) {
      PartShape p;
      p.part_id = jp.at("part_id").get<int>();
      const auto kind = jp.at("kind").get<std::string>();
      require(kind == "disc" || kind == "rect", Errc::format, "scene JSON: part kind must be disc or rect");
      p.kind = kind == "disc" ? ShapeKind::disc : ShapeKind::rect;
      const auto ctr = jp.at("center").get<std::vector<int>>();
      require(ctr.size() == 2, Errc::format, "scene JSON: center must be [row, col]");
      p.center_row = ctr[0];
      p.center_col = ctr[1];
      p.depth = jp.value("depth", 0.5);
      if (p.kind == ShapeKind::disc) {
        p.radius = jp.at("radius").get<double>();
      } else {
        const auto hs = jp.at("half_size").get<std::vector<int>>();
        require(hs.size() == 2, Errc::format, "scene JSON: half_size must be [rows, cols]");
        p.half_height = hs[0];
        p.half_width = hs[1];
      }
      s.parts.push_back(p);
    }
    for (const auto& jp : j.at("poses"))
      s.poses.push_back({jp.value("d_row", 0), jp.value("d_col", 0), jp.value("quarter_turns", 0)});
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("scene JSON: ") + e.what());
  }
  return s;
}

}  // namespace corrsync
