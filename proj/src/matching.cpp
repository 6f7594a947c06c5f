#include "corrsync/matching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace corrsync {

CostMatrix::CostMatrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  require(rows >= 0 && cols >= 0, Errc::invalid_argument, "CostMatrix: negative dimension");
  data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

CostMatrix::CostMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  require(rows >= 0 && cols >= 0, Errc::invalid_argument, "CostMatrix: negative dimension");
  require(data_.size() == static_cast<std::size_t>(rows) * cols, Errc::shape_mismatch,
          "CostMatrix: value count does not match dimensions");
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(r) * c);
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == c, Errc::shape_mismatch, "CostMatrix::from_rows: ragged rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return CostMatrix(r, c, std::move(flat));
}

CostMatrix cost_matrix(const FeatureMatrix& cur, const FeatureMatrix& prev) {
  require(cur.size() > 0 && prev.size() > 0, Errc::invalid_argument, "cost_matrix: empty feature matrix");
  CostMatrix c(static_cast<int>(cur.size()), static_cast<int>(prev.size()));
  for (int q = 0; q < c.rows(); ++q) {
    const auto& a = cur.rows[q];
    for (int s = 0; s < c.cols(); ++s) {
      const auto& b = prev.rows[s];
      const double d0 = a[0] - b[0];
      const double d1 = a[1] - b[1];
      const double d2 = a[2] - b[2];
      c(q, s) = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
    }
  }
  return c;
}

namespace {

struct SquareSolution {
  std::vector<int> col_of_row;
  std::vector<double> u;  // row potentials, 1-based
  std::vector<double> v;  // column potentials, 1-based
};

// Shortest-augmenting-path Hungarian method on an n x n row-major matrix.
// O(n^3). Potentials satisfy a[i][j] - u[i+1] - v[j+1] >= 0 with equality on
// the returned matching.
SquareSolution hungarian_square(const std::vector<double>& a, int n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      const double* row = a.data() + static_cast<std::size_t>(i0 - 1) * n;
      const double ui0 = u[i0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - ui0 - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  SquareSolution sol;
  sol.col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) sol.col_of_row[p[j] - 1] = j - 1;
  sol.u = std::move(u);
  sol.v = std::move(v);
  return sol;
}

// Every optimal perfect matching uses only edges that are tight under the
// optimal potentials. Walk rows in order and give each the smallest tight
// column that still admits a perfect completion on the unlocked rows; the
// result is the lexicographically smallest optimal matching.
void lexicographic_refine(const std::vector<double>& a, int n, const SquareSolution& sol, double tol,
                          std::vector<int>& col_of_row) {
  std::vector<std::vector<int>> adj(n);
  for (int r = 0; r < n; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * n;
    for (int c = 0; c < n; ++c)
      if (row[c] - sol.u[r + 1] - sol.v[c + 1] <= tol) adj[r].push_back(c);
  }
  std::vector<int> row_of_col(n);
  for (int r = 0; r < n; ++r) row_of_col[col_of_row[r]] = r;

  std::vector<char> locked(n, 0);
  std::vector<int> parent(n, -1);
  std::vector<int> stamp(n, -1);
  std::vector<int> queue;
  queue.reserve(n);
  int epoch = 0;

  for (int r = 0; r < n; ++r) {
    const int current = col_of_row[r];
    for (int c : adj[r]) {
      if (c >= current) break;
      if (locked[c]) continue;
      // Taking c evicts row_of_col[c]; it must reach r's old column through
      // an alternating path over unlocked tight edges.
      const int evicted = row_of_col[c];
      ++epoch;
      stamp[c] = epoch;
      queue.clear();
      queue.push_back(evicted);
      bool found = false;
      for (std::size_t h = 0; h < queue.size() && !found; ++h) {
        const int x = queue[h];
        for (int c2 : adj[x]) {
          if (locked[c2] || stamp[c2] == epoch) continue;
          stamp[c2] = epoch;
          parent[c2] = x;
          if (c2 == current) {
            found = true;
            break;
          }
          queue.push_back(row_of_col[c2]);
        }
      }
      if (!found) continue;
      int col = current;
      for (;;) {
        const int x = parent[col];
        const int previous = col_of_row[x];
        col_of_row[x] = col;
        row_of_col[col] = x;
        if (x == evicted) break;
        col = previous;
      }
      col_of_row[r] = c;
      row_of_col[c] = r;
      break;
    }
    locked[col_of_row[r]] = 1;
  }
}

void check_costs(const CostMatrix& cost, const char* who) {
  for (double x : cost.data())
    if (!std::isfinite(x) || x < 0.0)
      fail(Errc::invalid_argument, std::string(who) + ": cost entries must be finite and non-negative");
}

}  // namespace

Assignment solve_lap(const CostMatrix& cost) {
  check_costs(cost, "solve_lap");
  if (cost.empty()) return {};
  const int rows = cost.rows();
  const int cols = cost.cols();
  const int n = std::max(rows, cols);
  const double max_entry = *std::max_element(cost.data().begin(), cost.data().end());
  const double sentinel = max_entry + 1.0;

  std::vector<double> square(static_cast<std::size_t>(n) * n, sentinel);
  for (int r = 0; r < rows; ++r)
    std::copy_n(cost.data().begin() + static_cast<std::ptrdiff_t>(r) * cols, cols,
                square.begin() + static_cast<std::ptrdiff_t>(r) * n);

  const SquareSolution sol = hungarian_square(square, n);
  std::vector<int> col_of_row = sol.col_of_row;
  const double tol = 1e-10 * std::max(1.0, sentinel);
  lexicographic_refine(square, n, sol, tol, col_of_row);

  Assignment out;
  out.pairs.reserve(std::min(rows, cols));
  for (int r = 0; r < rows; ++r) {
    const int c = col_of_row[r];
    if (c < cols) {
      out.pairs.emplace_back(r, c);
      out.total_cost += cost(r, c);
    }
  }
  return out;
}

Assignment brute_force_lap(const CostMatrix& cost) {
  check_costs(cost, "brute_force_lap");
  if (cost.empty()) return {};
  const int rows = cost.rows();
  const int cols = cost.cols();
  const int k = std::min(rows, cols);
  require(k <= 8, Errc::invalid_argument, "brute_force_lap: min(rows, cols) must be at most 8");
  double count = 1.0;
  for (int i = 0; i < k; ++i) count *= std::max(rows, cols) - i;
  require(count <= 5e7, Errc::invalid_argument, "brute_force_lap: too many injections to enumerate");

  const double max_entry = *std::max_element(cost.data().begin(), cost.data().end());
  const double eps = 1e-12 * std::max(1.0, max_entry);

  // Depth-first over rows; each row takes an unused column (ascending) or,
  // when rows outnumber columns, stays unmatched (tried last). That order
  // visits pair lists lexicographically, so the first optimum found wins ties.
  std::vector<int> choice(rows, -1), best_choice;
  std::vector<char> used(cols, 0);
  double best = std::numeric_limits<double>::infinity();

  auto dfs = [&](auto&& self, int r, int matched, double acc) -> void {
    if (r == rows) {
      if (matched == k && acc < best - eps) {
        best = acc;
        best_choice = choice;
      }
      return;
    }
    for (int c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      choice[r] = c;
      self(self, r + 1, matched + 1, acc + cost(r, c));
      used[c] = 0;
    }
    choice[r] = -1;
    if (rows - r - 1 >= k - matched) self(self, r + 1, matched, acc);
  };
  dfs(dfs, 0, 0, 0.0);

  Assignment out;
  for (int r = 0; r < rows; ++r) {
    if (best_choice[r] >= 0) {
      out.pairs.emplace_back(r, best_choice[r]);
      out.total_cost += cost(r, best_choice[r]);
    }
  }
  return out;
}

Mapping Mapping::transposed() const {
  Mapping t;
  t.pairs.reserve(pairs.size());
  for (const auto& p : pairs) t.pairs.push_back({p.s, p.q, p.part_id});
  std::sort(t.pairs.begin(), t.pairs.end());
  return t;
}

Tensor Mapping::to_tensor() const {
  std::vector<std::int32_t> flat;
  flat.reserve(pairs.size() * 5);
  for (const auto& p : pairs) {
    flat.push_back(p.q.row);
    flat.push_back(p.q.col);
    flat.push_back(p.s.row);
    flat.push_back(p.s.col);
    flat.push_back(p.part_id);
  }
  return Tensor::from<std::int32_t>({static_cast<std::uint64_t>(pairs.size()), 5}, flat);
}

Mapping Mapping::from_tensor(const Tensor& t) {
  require(t.dtype() == DType::i32, Errc::format, "mapping tensor must be i32");
  require(t.ndim() == 2 && t.dim(1) == 5, Errc::shape_mismatch, "mapping tensor must have shape K x 5");
  const auto flat = t.values<std::int32_t>();
  Mapping m;
  m.pairs.reserve(t.dim(0));
  for (std::size_t i = 0; i + 5 <= flat.size(); i += 5)
    m.pairs.push_back({{flat[i], flat[i + 1]}, {flat[i + 2], flat[i + 3]}, flat[i + 4]});
  return m;
}

Mapping part_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, int part_id, const FeatureWeights& weights) {
  require(cur.width() == prev.width() && cur.height() == prev.height(), Errc::shape_mismatch,
          "part_mapping: embedding sizes differ");
  const PartPixelSet q = part_pixels(cur, part_id);
  const PartPixelSet s = part_pixels(prev, part_id);
  Mapping m;
  if (q.pixels.empty() || s.pixels.empty()) return m;
  const CostMatrix c = cost_matrix(feature_matrix(cur, q, weights), feature_matrix(prev, s, weights));
  const Assignment a = solve_lap(c);
  m.pairs.reserve(a.pairs.size());
  for (const auto& [r, col] : a.pairs) m.pairs.push_back({q.pixels[r], s.pixels[col], part_id});
  return m;
}

Mapping full_mapping(const EmbeddingMap& cur, const EmbeddingMap& prev, const FeatureWeights& weights) {
  require(cur.width() == prev.width() && cur.height() == prev.height(), Errc::shape_mismatch,
          "full_mapping: embeddings have different dimensions");
  std::vector<Mapping> per_part(kMaxPartId + 1);
  std::atomic<int> next{1};
  auto worker = [&] {
    for (int j = next++; j <= kMaxPartId; j = next++) per_part[j] = part_mapping(cur, prev, j, weights);
  };
  const unsigned n_threads = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  Mapping out;
  for (const auto& m : per_part) out.pairs.insert(out.pairs.end(), m.pairs.begin(), m.pairs.end());
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

bool is_injective(const Mapping& m) {
  std::vector<Pixel> qs, ss;
  qs.reserve(m.size());
  ss.reserve(m.size());
  for (const auto& p : m.pairs) {
    qs.push_back(p.q);
    ss.push_back(p.s);
  }
  std::sort(qs.begin(), qs.end());
  std::sort(ss.begin(), ss.end());
  return std::adjacent_find(qs.begin(), qs.end()) == qs.end() && std::adjacent_find(ss.begin(), ss.end()) == ss.end();
}

void validate_mapping(const Mapping& m, const EmbeddingMap& cur, const EmbeddingMap& prev) {
  for (const auto& p : m.pairs) {
    require(cur.contains(p.q) && prev.contains(p.s), Errc::out_of_range, "mapping pixel outside embedding grid");
    const int lq = cur.label(p.q);
    require(lq != kBackground && lq == prev.label(p.s), Errc::invalid_argument,
            "mapping pair is not label-consistent");
    require(p.part_id == lq, Errc::invalid_argument, "mapping part id disagrees with label");
  }
  require(is_injective(m), Errc::invalid_argument, "mapping is not injective");
}

}  // namespace corrsync
