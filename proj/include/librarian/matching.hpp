#pragma once

#include <optional>
#include <vector>

#include "librarian/error.hpp"
#include "librarian/features.hpp"

namespace librarian {

/// One-to-one assignment of column keys to row keys. Rows left over when
/// the columns (or a score threshold) run out are reported unassigned.
struct Assignment {
  struct Pair {
    int row_key = 0;
    int col_key = 0;
    double score = 0.0;
  };
  std::vector<Pair> pairs;
  std::vector<int> unassigned_rows;
};

/// Greedy ID assignment: repeatedly take the globally highest remaining
/// score, record the pair, and delete its row and column. This is greedy,
/// not total-score optimal. Ties break on the smallest row index, then the
/// smallest column index. When `min_score` is set, assignment stops once
/// the best remaining score falls below it.
inline Assignment greedy_assign(const ScoreMatrix& m,
                                std::optional<double> min_score = {}) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows == 0 || cols == 0) throw DomainError("greedy_assign: empty matrix");

  Assignment out;
  std::vector<bool> row_done(rows, false), col_done(cols, false);
  const std::size_t n_pairs = rows < cols ? rows : cols;
  for (std::size_t step = 0; step < n_pairs; ++step) {
    std::size_t best_r = 0, best_c = 0;
    double best = 0.0;
    bool found = false;
    for (std::size_t r = 0; r < rows; ++r) {
      if (row_done[r]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (col_done[c]) continue;
        if (!found || m.scores[r][c] > best) {
          best = m.scores[r][c];
          best_r = r;
          best_c = c;
          found = true;
        }
      }
    }
    if (min_score && best < *min_score) break;
    out.pairs.push_back({m.row_keys[best_r], m.col_keys[best_c], best});
    row_done[best_r] = true;
    col_done[best_c] = true;
  }
  for (std::size_t r = 0; r < rows; ++r)
    if (!row_done[r]) out.unassigned_rows.push_back(m.row_keys[r]);
  return out;
}

} // namespace librarian
