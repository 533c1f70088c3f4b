#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "librarian/error.hpp"
#include "librarian/simulator.hpp"

namespace librarian {

/// Pipeline knobs carried by the scenario file. Noise defaults are artifact
/// choices, not measured sensor figures; override them per scenario.
struct SimulationConfig {
  int window = 10;                     // observations fused per belief
  int prune_min = 4;                   // minimum recognitions per cluster
  double margin_mm = 20.0;             // left-wall margin for placing
  double gap_mm = 5.0;                 // gap between placed books
  double lean_tolerance_mm = 30.0;     // max support height shortfall
  int target_level = 0;                // where sorted books go
  std::optional<double> min_score;     // optional assignment threshold, off
};

struct Scenario {
  ShelfScene scene;
  NoiseModel noise;
  SimulationConfig config;
};

namespace detail {

inline RigidTransform transform_from_json(const nlohmann::json& j,
                                          const std::string& at) {
  RigidTransform t;
  if (j.contains("rotation")) {
    const auto& r = j.at("rotation");
    if (!r.is_array() || r.size() != 9)
      throw ParseError(at + ".rotation: expected 9 numbers (row-major 3x3)");
    for (int i = 0; i < 9; ++i) t.rotation[i] = r[i].get<double>();
  }
  if (j.contains("translation_mm")) {
    const auto& v = j.at("translation_mm");
    if (!v.is_array() || v.size() != 3)
      throw ParseError(at + ".translation_mm: expected 3 numbers");
    t.translation = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }
  return t;
}

inline nlohmann::json transform_to_json(const RigidTransform& t) {
  return {{"rotation", t.rotation},
          {"translation_mm", {t.translation.x, t.translation.y, t.translation.z}}};
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    const auto& shelf = j.at("shelf");
    if (shelf.contains("origin_pose"))
      s.scene.shelf.origin_pose =
          detail::transform_from_json(shelf.at("origin_pose"), "shelf.origin_pose");
    s.scene.shelf.level_width_mm = shelf.at("level_width_mm").get<double>();
    s.scene.shelf.level_height_mm = shelf.at("level_height_mm").get<double>();
    s.scene.shelf.level_depth_mm = shelf.at("level_depth_mm").get<double>();
    s.scene.shelf.n_levels = shelf.at("n_levels").get<int>();

    const auto& cam = j.at("camera");
    s.scene.camera.focal_px = cam.at("focal_px").get<double>();
    const auto& pp = cam.at("principal_point_px");
    s.scene.camera.principal_point = {pp[0].get<double>(), pp[1].get<double>()};
    s.scene.camera.pose =
        detail::transform_from_json(cam.at("pose"), "camera.pose");

    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      s.noise.pos_sigma_mm = n.value("pos_sigma_mm", 0.0);
      s.noise.dropout_prob = n.value("dropout_prob", 0.0);
      s.noise.hist_sample_count = n.value("hist_sample_count", 256);
      s.noise.seed = n.value("seed", std::uint64_t{0});
    }

    for (const auto& p : j.at("placements")) {
      Placement placement;
      placement.book_id = p.at("book_id").get<int>();
      placement.level = p.at("level").get<int>();
      placement.x_mm = p.at("x_mm").get<double>();
      placement.standing = p.value("standing", true);
      placement.spine_aligned = p.value("spine_aligned", true);
      s.scene.placements.push_back(placement);
    }

    if (j.contains("config")) {
      const auto& c = j.at("config");
      s.config.window = c.value("window", 10);
      s.config.prune_min = c.value("prune_min", 4);
      s.config.margin_mm = c.value("margin_mm", 20.0);
      s.config.gap_mm = c.value("gap_mm", 5.0);
      s.config.lean_tolerance_mm = c.value("lean_tolerance_mm", 30.0);
      s.config.target_level = c.value("target_level", 0);
      if (c.contains("min_score"))
        s.config.min_score = c.at("min_score").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  validate_noise(s.noise);
  if (s.config.window < 1)
    throw ValidationError("scenario: config.window must be >= 1");
  if (s.config.prune_min < 0)
    throw ValidationError("scenario: config.prune_min must be >= 0");
  if (s.config.target_level < 0 ||
      s.config.target_level >= s.scene.shelf.n_levels)
    throw ValidationError("scenario: config.target_level out of range");
  return s;
}

/// Loads a scenario.json. Scene validation against the book database is a
/// separate step (validate_scene) since it needs the book dimensions.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

} // namespace librarian
