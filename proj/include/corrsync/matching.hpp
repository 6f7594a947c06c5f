#pragma once

#include <utility>
#include <vector>

#include "corrsync/embedding.hpp"
#include "corrsync/tensor_io.hpp"

namespace corrsync {

/// Dense row-major cost matrix; rows index pixels of the current frame's
/// part, columns the previous frame's.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0);
  CostMatrix(int rows, int cols, std::vector<double> values);
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

struct PixelPair {
  Pixel q;  // frame i
  Pixel s;  // frame i-1
  int part_id = 0;
  friend auto operator<=>(const PixelPair&, const PixelPair&) = default;
};

/// Injective, label-consistent set of cross-frame pixel pairs, sorted by q.
struct Mapping {
  std::vector<PixelPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  /// Same pairs with the roles of q and s exchanged, re-sorted.
  Mapping transposed() const;

  /// i32 tensor of shape K x 5: (q_row, q_col, s_row, s_col, part_id).
  Tensor to_tensor() const;
  static Mapping from_tensor(const Tensor& t);

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

CostMatrix cost_matrix(const FeatureMatrix& cur, const FeatureMatrix& prev);

/// Minimum-cost assignment of min(rows, cols) pairs (Hungarian method with
/// shortest augmenting paths). The rectangular case is padded to square with
/// a constant sentinel exceeding every real entry. Among equal-cost optima the
/// lexicographically smallest pair list is returned.
Assignment solve_lap(const CostMatrix& cost);

/// Exhaustive enumeration; min(rows, cols) must not exceed 8.
Assignment brute_force_lap(const CostMatrix& cost);

Mapping part_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, int part_id,
                     const FeatureWeights& weights = {});

/// Union of per-part mappings over parts 1..24. Parts are solved
/// concurrently; the result does not depend on scheduling.
Mapping full_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, const FeatureWeights& weights = {});

/// Throws unless the mapping is injective on both sides, label-consistent
/// with the two embeddings and inside their grids.
void validate_mapping(const Mapping& m, const EmbeddingMap& cur, const EmbeddingMap& prev);

bool is_injective(const Mapping& m);

}  // namespace corrsync
