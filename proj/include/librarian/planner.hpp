#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/error.hpp"
#include "librarian/fusion.hpp"
#include "librarian/geometry.hpp"

namespace librarian {

enum class SortProperty { height };

struct SortCommand {
  SortProperty property = SortProperty::height;
  int target_shelf_level = 0;
};

enum class ActionKind { perception_stop, perception_start, pick_place };

enum class LeanDirection { left, right };

/// Slot a book gets placed into: shelf-frame pose of its left edge on the
/// target level plus the direction it leans (toward its support).
struct PlacePose {
  Point3 position; // left edge, level base, front plane
  double x_mm = 0.0;
  int level = 0;
  LeanDirection lean = LeanDirection::left;
};

struct PlanAction {
  ActionKind kind = ActionKind::pick_place;
  int book_id = kUnknownBookId; // pick_place only
  PlacePose place;              // pick_place only
};

/// Ordered action list: perception_stop first, perception_start last,
/// every pick_place in between.
struct Plan {
  std::vector<PlanAction> actions;
};

struct PlannerConfig {
  double margin_mm = 20.0; // gap between the shelf wall and the first book
  double gap_mm = 5.0;     // gap between neighbouring books
};

inline void validate_plan(const Plan& plan) {
  if (plan.actions.size() < 2)
    throw ValidationError("plan: needs at least perception stop and start");
  if (plan.actions.front().kind != ActionKind::perception_stop)
    throw ValidationError("plan: first action must be perception_stop");
  if (plan.actions.back().kind != ActionKind::perception_start)
    throw ValidationError("plan: last action must be perception_start");
  for (std::size_t i = 1; i + 1 < plan.actions.size(); ++i)
    if (plan.actions[i].kind != ActionKind::pick_place)
      throw ValidationError("plan: action " + std::to_string(i) +
                            " must be pick_place");
}

/// Resolvable belief ids ordered by database height, highest first; ties
/// break on ascending id. Unknown clusters are skipped.
inline std::vector<int> sort_books(const WorldBelief& belief,
                                   const SortCommand& cmd,
                                   const BookDatabase& db) {
  if (cmd.property != SortProperty::height)
    throw DomainError("sort_books: unsupported sort property");
  std::vector<int> ids;
  for (const auto& cluster : belief.clusters) {
    if (cluster.book_id == kUnknownBookId) continue;
    if (!find_book(db, cluster.book_id))
      throw DomainError("sort_books: belief references unknown book id " +
                        std::to_string(cluster.book_id));
    ids.push_back(cluster.book_id);
  }
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double ha = lookup(db, a).height_mm;
    const double hb = lookup(db, b).height_mm;
    if (ha != hb) return ha > hb;
    return a < b;
  });
  return ids;
}

/// Slot pose for the book at `index`, packed left to right: the first book
/// sits `margin_mm` from the left wall, each following one `gap_mm` after
/// the previous book. Leans toward the support on its left.
inline PlacePose target_slot(std::size_t index,
                             const std::vector<double>& placed_widths,
                             double next_width_mm, const ShelfGeometry& shelf,
                             int level, const PlannerConfig& config = {}) {
  if (level < 0 || level >= shelf.n_levels)
    throw DomainError("target_slot: level out of range");
  if (index > placed_widths.size())
    throw DomainError("target_slot: index beyond placed books");
  double x = config.margin_mm;
  for (std::size_t j = 0; j < index; ++j) x += placed_widths[j] + config.gap_mm;
  if (x + next_width_mm > shelf.level_width_mm)
    throw ShelfOverflowError(
        "target_slot: book at index " + std::to_string(index) +
        " does not fit on level " + std::to_string(level));
  PlacePose pose;
  pose.x_mm = x;
  pose.level = level;
  pose.lean = LeanDirection::left;
  pose.position = {x, static_cast<double>(level) * shelf.level_height_mm, 0.0};
  return pose;
}

/// Full sort plan: stop perception, pick and place every resolvable book
/// in height order, restart perception.
inline Plan make_plan(const WorldBelief& belief, const SortCommand& cmd,
                      const BookDatabase& db, const ShelfGeometry& shelf,
                      const PlannerConfig& config = {}) {
  Plan plan;
  plan.actions.push_back({ActionKind::perception_stop, kUnknownBookId, {}});

  const std::vector<int> order = sort_books(belief, cmd, db);
  std::vector<double> placed_widths;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const BookRecord& book = lookup(db, order[i]);
    PlanAction action;
    action.kind = ActionKind::pick_place;
    action.book_id = book.id;
    action.place = target_slot(i, placed_widths, book.width_mm, shelf,
                               cmd.target_shelf_level, config);
    plan.actions.push_back(action);
    placed_widths.push_back(book.width_mm);
  }

  plan.actions.push_back({ActionKind::perception_start, kUnknownBookId, {}});
  return plan;
}

} // namespace librarian
