#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/error.hpp"
#include "librarian/features.hpp"
#include "librarian/fusion.hpp"
#include "librarian/geometry.hpp"
#include "librarian/matching.hpp"
#include "librarian/planner.hpp"
#include "librarian/rng.hpp"

namespace librarian {

/// One physical book on the shelf. Its footprint along the shelf is
/// [x_mm, x_mm + width_mm] with the width taken from the database.
struct Placement {
  int book_id = 0;
  int level = 0;
  double x_mm = 0.0;
  bool standing = true;
  bool spine_aligned = true;
};

/// Ground-truth world state.
struct ShelfScene {
  ShelfGeometry shelf;
  CameraModel camera;
  std::vector<Placement> placements;
};

struct NoiseModel {
  double pos_sigma_mm = 0.0;
  double dropout_prob = 0.0;
  int hist_sample_count = 256;
  std::uint64_t seed = 0;
};

inline void validate_noise(const NoiseModel& noise) {
  if (noise.pos_sigma_mm < 0.0)
    throw ValidationError("noise: pos_sigma_mm must be >= 0");
  if (noise.dropout_prob < 0.0 || noise.dropout_prob > 1.0)
    throw ValidationError("noise: dropout_prob must be in [0, 1]");
  if (noise.hist_sample_count < 1)
    throw ValidationError("noise: hist_sample_count must be >= 1");
}

enum class FailureReason {
  not_standing,
  spine_not_aligned,
  support_too_short,
  out_of_bounds,
  unknown_book,
};

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::not_standing: return "not_standing";
    case FailureReason::spine_not_aligned: return "spine_not_aligned";
    case FailureReason::support_too_short: return "support_too_short";
    case FailureReason::out_of_bounds: return "out_of_bounds";
    case FailureReason::unknown_book: return "unknown_book";
  }
  return "?";
}

struct ActionResult {
  bool ok = true;
  std::optional<FailureReason> failure;

  static ActionResult success() { return {}; }
  static ActionResult fail(FailureReason r) { return {false, r}; }
};

/// Checks placement bounds and the no-overlap invariant on every level.
inline void validate_scene(const ShelfScene& scene, const BookDatabase& db) {
  validate_shelf(scene.shelf);
  validate_camera(scene.camera);
  for (std::size_t i = 0; i < scene.placements.size(); ++i) {
    const Placement& p = scene.placements[i];
    const std::string at = "placements[" + std::to_string(i) + "]";
    const BookRecord* book = find_book(db, p.book_id);
    if (!book)
      throw ValidationError(at + ": book id " + std::to_string(p.book_id) +
                            " not in database");
    if (p.level < 0 || p.level >= scene.shelf.n_levels)
      throw ValidationError(at + ": level out of range");
    if (p.x_mm < 0.0 || p.x_mm + book->width_mm > scene.shelf.level_width_mm)
      throw ValidationError(at + ": outside the shelf level");
    if (book->height_mm > scene.shelf.level_height_mm)
      throw ValidationError(at + ": book taller than the level");
    for (std::size_t j = 0; j < i; ++j) {
      const Placement& q = scene.placements[j];
      if (q.level != p.level) continue;
      const double qw = lookup(db, q.book_id).width_mm;
      if (p.x_mm < q.x_mm + qw && q.x_mm < p.x_mm + book->width_mm)
        throw ValidationError(at + ": overlaps placements[" +
                              std::to_string(j) + "]");
    }
  }
}

namespace detail {

// Front-plane spine rectangle of a standing placement, shelf frame,
// ordered TL, TR, BR, BL.
inline std::array<Point3, 4> spine_rect(const ShelfGeometry& shelf,
                                        const Placement& p,
                                        const BookRecord& book) {
  const double y0 = static_cast<double>(p.level) * shelf.level_height_mm;
  const double y1 = y0 + book.height_mm;
  const double x0 = p.x_mm;
  const double x1 = p.x_mm + book.width_mm;
  return {Point3{x0, y1, 0.0}, Point3{x1, y1, 0.0}, Point3{x1, y0, 0.0},
          Point3{x0, y0, 0.0}};
}

// Homography from source-image pixels of one level to its rectified
// millimetre frame (0,0)-(width,height), y up.
inline Homography level_rectifier(const ShelfScene& scene, int level) {
  const auto corners = shelf_level_corners(scene.shelf, level);
  std::array<Point2, 4> px;
  for (int i = 0; i < 4; ++i) px[i] = project_point(scene.camera, corners[i]);
  const double w = scene.shelf.level_width_mm;
  const double h = scene.shelf.level_height_mm;
  return fit_homography(px, {Point2{0.0, h}, Point2{w, h}, Point2{w, 0.0},
                             Point2{0.0, 0.0}});
}

} // namespace detail

/// Synthesizes one noisy observation of the scene. Every standing placement
/// is detected with probability 1 - dropout; its position gets Gaussian
/// jitter (truncated at 4 sigma), its histogram is sampled from the book's
/// color model, and its id + confidence come from scoring against the
/// database references. Deterministic in (noise.seed, seq).
inline Observation synth_observation(const ShelfScene& scene,
                                     const BookDatabase& db,
                                     const std::vector<HsvHistogram>& refs,
                                     const NoiseModel& noise, int seq,
                                     std::optional<double> min_score = {}) {
  validate_noise(noise);
  Observation obs;
  obs.seq = seq;
  Rng rng(hash_combine(noise.seed, static_cast<std::uint64_t>(seq)));

  std::map<int, Homography> rectifiers;
  for (const auto& p : scene.placements) {
    if (!p.standing) continue; // a lying book shows no spine
    if (rng.uniform01() < noise.dropout_prob) continue;
    const BookRecord& book = lookup(db, p.book_id);

    const auto rect = detail::spine_rect(scene.shelf, p, book);
    // Shelf-frame spine center; z stays on the front plane.
    const Point3 center = {
        p.x_mm + 0.5 * book.width_mm,
        static_cast<double>(p.level) * scene.shelf.level_height_mm +
            0.5 * book.height_mm,
        0.0};

    SpineDetection det;
    const double jx = std::clamp(rng.normal(), -4.0, 4.0) * noise.pos_sigma_mm;
    const double jy = std::clamp(rng.normal(), -4.0, 4.0) * noise.pos_sigma_mm;
    det.position = {center.x + jx, center.y + jy, center.z};

    for (const auto& corner : rect)
      det.polygon_px.push_back(project_point(
          scene.camera, scene.shelf.origin_pose.apply(corner)));

    auto it = rectifiers.find(p.level);
    if (it == rectifiers.end())
      it = rectifiers.emplace(p.level, detail::level_rectifier(scene, p.level))
               .first;
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    for (std::size_t i = 0; i < det.polygon_px.size(); ++i) {
      const Point2 r = apply_homography(it->second, det.polygon_px[i]);
      if (i == 0) {
        min_x = max_x = r.x;
        min_y = max_y = r.y;
      } else {
        min_x = std::min(min_x, r.x);
        max_x = std::max(max_x, r.x);
        min_y = std::min(min_y, r.y);
        max_y = std::max(max_y, r.y);
      }
    }
    det.rect_width_mm = max_x - min_x;
    det.rect_height_mm = max_y - min_y;

    det.histogram =
        sample_spine_histogram(book.spine_color, noise.hist_sample_count, rng);
    obs.detections.push_back(std::move(det));
  }

  if (!obs.detections.empty()) {
    std::vector<HsvHistogram> hists;
    hists.reserve(obs.detections.size());
    for (const auto& d : obs.detections) hists.push_back(d.histogram);
    std::vector<int> ids;
    for (const auto& b : db) ids.push_back(b.id);
    const Assignment a =
        greedy_assign(score_matrix(hists, refs, ids), min_score);
    for (const auto& pair : a.pairs) {
      auto& det = obs.detections[static_cast<std::size_t>(pair.row_key)];
      det.book_id = pair.col_key;
      det.confidence = pair.score;
    }
  }
  return obs;
}

inline Observation synth_observation(const ShelfScene& scene,
                                     const BookDatabase& db,
                                     const NoiseModel& noise, int seq,
                                     std::optional<double> min_score = {}) {
  return synth_observation(scene, db, reference_histograms(db), noise, seq,
                           min_score);
}

/// Executes one plan action against the scene. Pick+place enforces the
/// manipulation preconditions: the book must stand upright with its spine
/// aligned, the slot must lie inside the target level, and the lean support
/// (shelf wall, or the nearest book on the lean side) must not be shorter
/// than the placed book by more than lean_tolerance_mm. The scene mutates
/// only on success. Perception toggles always succeed.
inline ActionResult execute_action(ShelfScene& scene, const PlanAction& action,
                                   const BookDatabase& db,
                                   double lean_tolerance_mm = 30.0) {
  if (action.kind != ActionKind::pick_place) return ActionResult::success();

  auto it = std::find_if(scene.placements.begin(), scene.placements.end(),
                         [&](const Placement& p) {
                           return p.book_id == action.book_id;
                         });
  if (it == scene.placements.end())
    return ActionResult::fail(FailureReason::unknown_book);
  if (!it->standing) return ActionResult::fail(FailureReason::not_standing);
  if (!it->spine_aligned)
    return ActionResult::fail(FailureReason::spine_not_aligned);

  const BookRecord& book = lookup(db, action.book_id);
  const PlacePose& place = action.place;
  if (place.level < 0 || place.level >= scene.shelf.n_levels)
    return ActionResult::fail(FailureReason::out_of_bounds);
  if (place.x_mm < 0.0 ||
      place.x_mm + book.width_mm > scene.shelf.level_width_mm)
    return ActionResult::fail(FailureReason::out_of_bounds);

  // The held book no longer occupies its slot while we check the target.
  for (const auto& other : scene.placements) {
    if (&other == &*it || other.level != place.level) continue;
    const double ow = lookup(db, other.book_id).width_mm;
    if (place.x_mm < other.x_mm + ow && other.x_mm < place.x_mm + book.width_mm)
      return ActionResult::fail(FailureReason::out_of_bounds);
  }

  // Lean support: nearest neighbour on the lean side, else the shelf wall
  // (which can support any height).
  const Placement* support = nullptr;
  for (const auto& other : scene.placements) {
    if (&other == &*it || other.level != place.level) continue;
    const bool on_side = action.place.lean == LeanDirection::left
                             ? other.x_mm < place.x_mm
                             : other.x_mm > place.x_mm;
    if (!on_side) continue;
    if (!support ||
        (action.place.lean == LeanDirection::left ? other.x_mm > support->x_mm
                                                  : other.x_mm < support->x_mm))
      support = &other;
  }
  if (support) {
    const double support_height = lookup(db, support->book_id).height_mm;
    if (book.height_mm - support_height > lean_tolerance_mm)
      return ActionResult::fail(FailureReason::support_too_short);
  }

  it->level = place.level;
  it->x_mm = place.x_mm;
  it->standing = true;
  it->spine_aligned = true;
  return ActionResult::success();
}

struct EpisodeStep {
  PlanAction action;
  ActionResult result;
};

struct EpisodeLog {
  std::vector<EpisodeStep> steps;
  ShelfScene final_scene;
  bool completed = false;
  std::optional<std::size_t> halted_at;
  bool perception_active = true;
};

/// Runs a plan to completion or to its first failure (no recovery).
inline EpisodeLog run_episode(ShelfScene scene, const Plan& plan,
                              const BookDatabase& db,
                              double lean_tolerance_mm = 30.0) {
  validate_plan(plan);
  EpisodeLog log;
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const PlanAction& action = plan.actions[i];
    const ActionResult result =
        execute_action(scene, action, db, lean_tolerance_mm);
    if (action.kind == ActionKind::perception_stop)
      log.perception_active = false;
    else if (action.kind == ActionKind::perception_start)
      log.perception_active = true;
    log.steps.push_back({action, result});
    if (!result.ok) {
      log.halted_at = i;
      break;
    }
  }
  log.completed = !log.halted_at.has_value();
  log.final_scene = std::move(scene);
  return log;
}

} // namespace librarian
