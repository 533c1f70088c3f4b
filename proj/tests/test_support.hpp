// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately use different algorithms than the library implementations.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/features.hpp"
#include "librarian/geometry.hpp"
#include "librarian/matching.hpp"
#include "librarian/rng.hpp"
#include "librarian/scenario.hpp"

namespace test_support {

// ---------------------------------------------------------------------------
// Assignment oracles.

// Greedy assignment replayed as a single sweep over globally sorted entries
// (score descending, then row, then column ascending) instead of repeated
// argmax scans.
inline librarian::Assignment greedy_oracle(const librarian::ScoreMatrix& m) {
  struct Entry {
    double score;
    std::size_t r, c;
  };
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      entries.push_back({m.scores[r][c], r, c});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.r != b.r) return a.r < b.r;
    return a.c < b.c;
  });
  std::vector<bool> row_used(m.rows(), false), col_used(m.cols(), false);
  librarian::Assignment out;
  for (const Entry& e : entries) {
    if (row_used[e.r] || col_used[e.c]) continue;
    out.pairs.push_back({m.row_keys[e.r], m.col_keys[e.c], e.score});
    row_used[e.r] = true;
    col_used[e.c] = true;
  }
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (!row_used[r]) out.unassigned_rows.push_back(m.row_keys[r]);
  return out;
}

// Total-score-optimal assignment by exhaustive search (small matrices only).
inline double optimal_assignment(const librarian::ScoreMatrix& m,
                                 std::vector<std::pair<int, int>>* pairs = nullptr) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> cols_free;
  double best = -1.0;
  std::vector<int> best_choice;
  std::vector<int> choice(rows, -1);
  std::vector<bool> used(cols, false);
  const std::size_t depth_max = std::min(rows, cols);

  const auto recurse = [&](auto&& self, std::size_t row, double sum,
                           std::size_t assigned) -> void {
    if (assigned == depth_max || row == rows) {
      if (sum > best) {
        best = sum;
        best_choice.assign(choice.begin(), choice.end());
      }
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      choice[row] = static_cast<int>(c);
      self(self, row + 1, sum + m.scores[row][c], assigned + 1);
      used[c] = false;
      choice[row] = -1;
    }
    if (rows > cols) self(self, row + 1, sum, assigned); // skip this row
  };
  recurse(recurse, 0, 0.0, 0);

  if (pairs) {
    pairs->clear();
    for (std::size_t r = 0; r < rows; ++r)
      if (best_choice[r] >= 0)
        pairs->emplace_back(m.row_keys[r], m.col_keys[best_choice[r]]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Geometry helpers.

// Random quad in [0, span]^2 with every point triple comfortably
// non-collinear (cross-product area above the threshold).
inline std::array<librarian::Point2, 4> random_quad(librarian::Rng& rng,
                                                    double span = 100.0,
                                                    double min_area = 25.0) {
  for (;;) {
    std::array<librarian::Point2, 4> q;
    for (auto& p : q) p = {rng.uniform01() * span, rng.uniform01() * span};
    bool ok = true;
    for (int skip = 0; skip < 4 && ok; ++skip) {
      std::array<librarian::Point2, 3> t;
      int n = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) t[n++] = q[i];
      const double cross = (t[1].x - t[0].x) * (t[2].y - t[0].y) -
                           (t[1].y - t[0].y) * (t[2].x - t[0].x);
      ok = std::abs(cross) >= min_area;
    }
    if (ok) return q;
  }
}

// ---------------------------------------------------------------------------
// Database and scenario fixtures.

inline librarian::BookRecord make_book(int id, double height_mm,
                                       double width_mm, double hue_mean,
                                       const std::string& title = "") {
  librarian::BookRecord r;
  r.id = id;
  r.title = title.empty() ? "book " + std::to_string(id) : title;
  r.height_mm = height_mm;
  r.width_mm = width_mm;
  r.depth_mm = 200.0;
  r.author = "author " + std::to_string(id);
  r.cover_type = id % 2 == 0 ? librarian::CoverType::hard
                             : librarian::CoverType::soft;
  r.count = 1;
  r.spine_color = {hue_mean, 0.02, 0.55 + 0.08 * (id % 4), 0.05, 0.6, 0.1};
  return r;
}

// Five books with distinct heights and well-separated hues.
inline librarian::BookDatabase sample_db() {
  return {make_book(1, 210.0, 45.0, 0.08), make_book(2, 260.0, 50.0, 0.45),
          make_book(3, 180.0, 35.0, 0.78), make_book(4, 240.0, 40.0, 0.28),
          make_book(5, 160.0, 30.0, 0.62)};
}

// Camera in front of the shelf at z = +1800 mm looking back along -z
// (image x right, image y down).
inline librarian::CameraModel front_camera() {
  librarian::CameraModel cam;
  cam.focal_px = 900.0;
  cam.principal_point = {640.0, 360.0};
  cam.pose.rotation = {1, 0, 0, 0, -1, 0, 0, 0, -1};
  cam.pose.translation = {-400.0, 300.0, 1800.0};
  return cam;
}

inline librarian::ShelfGeometry two_level_shelf() {
  librarian::ShelfGeometry shelf;
  shelf.level_width_mm = 800.0;
  shelf.level_height_mm = 300.0;
  shelf.level_depth_mm = 250.0;
  shelf.n_levels = 2;
  return shelf;
}

// Three books standing spine-aligned on the upper level, unsorted.
inline librarian::Scenario demo_scenario() {
  librarian::Scenario s;
  s.scene.shelf = two_level_shelf();
  s.scene.camera = front_camera();
  s.scene.placements = {{1, 1, 120.0, true, true},
                        {2, 1, 300.0, true, true},
                        {3, 1, 520.0, true, true}};
  s.noise = {0.0, 0.0, 512, 7};
  return s;
}

} // namespace test_support
