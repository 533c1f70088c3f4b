#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "librarian/error.hpp"
#include "librarian/fusion.hpp"
#include "librarian/planner.hpp"

namespace librarian {

// ---------------------------------------------------------------------------
// observations.jsonl: one observation per line.

inline nlohmann::json detection_to_json(const SpineDetection& d) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& p : d.polygon_px) poly.push_back({p.x, p.y});
  return {{"polygon_px", poly},
          {"position_mm", {d.position.x, d.position.y, d.position.z}},
          {"rect_w_mm", d.rect_width_mm},
          {"rect_h_mm", d.rect_height_mm},
          {"hist", {{"hue", d.histogram.hue},
                    {"sat", d.histogram.sat},
                    {"val", d.histogram.val}}},
          {"book_id", d.book_id},
          {"confidence", d.confidence}};
}

inline SpineDetection detection_from_json(const nlohmann::json& j) {
  SpineDetection d;
  for (const auto& p : j.at("polygon_px"))
    d.polygon_px.push_back({p[0].get<double>(), p[1].get<double>()});
  const auto& pos = j.at("position_mm");
  d.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
  d.rect_width_mm = j.at("rect_w_mm").get<double>();
  d.rect_height_mm = j.at("rect_h_mm").get<double>();
  const auto& hist = j.at("hist");
  const auto read_channel = [&](const char* name,
                                std::array<double, kHistogramBins>& out) {
    const auto& channel = hist.at(name);
    if (channel.size() != kHistogramBins)
      throw ParseError(std::string("detection: hist.") + name +
                       " must have 20 bins");
    for (std::size_t i = 0; i < kHistogramBins; ++i)
      out[i] = channel[i].get<double>();
  };
  read_channel("hue", d.histogram.hue);
  read_channel("sat", d.histogram.sat);
  read_channel("val", d.histogram.val);
  d.book_id = j.at("book_id").get<int>();
  d.confidence = j.at("confidence").get<double>();
  if (d.confidence < 0.0 || d.confidence > 1.2)
    throw ValidationError("detection: confidence outside [0, 1.2]");
  if (!(d.rect_width_mm > 0.0 && d.rect_height_mm > 0.0))
    throw ValidationError("detection: rectified dimensions must be positive");
  return d;
}

inline void write_observations(const std::vector<Observation>& obs,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write observations file: " + path);
  for (const auto& o : obs) {
    nlohmann::json dets = nlohmann::json::array();
    for (const auto& d : o.detections) dets.push_back(detection_to_json(d));
    out << nlohmann::json{{"seq", o.seq}, {"detections", dets}}.dump() << '\n';
  }
}

inline std::vector<Observation> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open observations file: " + path);
  std::vector<Observation> obs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      Observation o;
      o.seq = j.at("seq").get<int>();
      for (const auto& d : j.at("detections"))
        o.detections.push_back(detection_from_json(d));
      obs.push_back(std::move(o));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return obs;
}

// ---------------------------------------------------------------------------
// belief.json

inline nlohmann::json belief_to_json(const WorldBelief& belief) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : belief.clusters) {
    clusters.push_back(
        {{"book_id", c.book_id},
         {"confidence", c.confidence},
         {"n", c.members.size()},
         {"centroid_mm", {c.centroid.x, c.centroid.y, c.centroid.z}},
         {"est_width_mm", c.est_width_mm},
         {"est_height_mm", c.est_height_mm}});
  }
  return {{"source_window", {belief.first_seq, belief.last_seq}},
          {"clusters", clusters}};
}

/// Reads back the cluster summary written by belief_to_json. Member
/// detections are not serialized; downstream planning never needs them.
inline WorldBelief belief_from_json(const nlohmann::json& j) {
  WorldBelief belief;
  try {
    belief.first_seq = j.at("source_window")[0].get<int>();
    belief.last_seq = j.at("source_window")[1].get<int>();
    for (const auto& c : j.at("clusters")) {
      BookCluster cluster;
      cluster.book_id = c.at("book_id").get<int>();
      cluster.confidence = c.at("confidence").get<double>();
      const auto& ctr = c.at("centroid_mm");
      cluster.centroid = {ctr[0].get<double>(), ctr[1].get<double>(),
                          ctr[2].get<double>()};
      cluster.est_width_mm = c.at("est_width_mm").get<double>();
      cluster.est_height_mm = c.at("est_height_mm").get<double>();
      belief.clusters.push_back(std::move(cluster));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("belief: ") + e.what());
  }
  return belief;
}

inline void write_belief(const WorldBelief& belief, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write belief file: " + path);
  out << belief_to_json(belief).dump(2) << '\n';
}

inline WorldBelief read_belief(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open belief file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return belief_from_json(j);
}

// ---------------------------------------------------------------------------
// plan.json: a bare ordered action array.

inline nlohmann::json plan_to_json(const Plan& plan) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : plan.actions) {
    switch (a.kind) {
      case ActionKind::perception_stop:
        actions.push_back({{"kind", "perception_stop"}});
        break;
      case ActionKind::perception_start:
        actions.push_back({{"kind", "perception_start"}});
        break;
      case ActionKind::pick_place:
        actions.push_back(
            {{"kind", "pick_place"},
             {"book_id", a.book_id},
             {"place_x_mm", a.place.x_mm},
             {"level", a.place.level},
             {"lean", a.place.lean == LeanDirection::left ? "left" : "right"}});
        break;
    }
  }
  return actions;
}

inline Plan plan_from_json(const nlohmann::json& j, const ShelfGeometry& shelf) {
  if (!j.is_array()) throw ParseError("plan: expected a JSON array");
  Plan plan;
  try {
    for (const auto& item : j) {
      PlanAction action;
      const std::string kind = item.at("kind").get<std::string>();
      if (kind == "perception_stop") {
        action.kind = ActionKind::perception_stop;
      } else if (kind == "perception_start") {
        action.kind = ActionKind::perception_start;
      } else if (kind == "pick_place") {
        action.kind = ActionKind::pick_place;
        action.book_id = item.at("book_id").get<int>();
        action.place.x_mm = item.at("place_x_mm").get<double>();
        action.place.level = item.at("level").get<int>();
        const std::string lean = item.at("lean").get<std::string>();
        if (lean == "left")
          action.place.lean = LeanDirection::left;
        else if (lean == "right")
          action.place.lean = LeanDirection::right;
        else
          throw ParseError("plan: lean must be 'left' or 'right'");
        action.place.position = {
            action.place.x_mm,
            static_cast<double>(action.place.level) * shelf.level_height_mm,
            0.0};
      } else {
        throw ParseError("plan: unknown action kind '" + kind + "'");
      }
      plan.actions.push_back(action);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  validate_plan(plan);
  return plan;
}

inline void write_plan(const Plan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plan file: " + path);
  out << plan_to_json(plan).dump(2) << '\n';
}

inline Plan read_plan(const std::string& path, const ShelfGeometry& shelf) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return plan_from_json(j, shelf);
}

} // namespace librarian
