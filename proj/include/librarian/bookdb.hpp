#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "librarian/error.hpp"

namespace librarian {

/// Sentinel for detections / clusters that could not be matched to a book.
inline constexpr int kUnknownBookId = -1;

enum class CoverType { hard, soft };

/// Generative appearance model of a book spine in HSV space. Stands in for
/// the spine photographs a live system would sample pixels from.
struct SpineColorModel {
  double hue_mean = 0.0;   // [0, 1)
  double hue_spread = 0.0; // > 0
  double sat_mean = 0.0;   // [0, 1]
  double sat_spread = 0.0; // > 0
  double val_mean = 0.0;   // [0, 1]
  double val_spread = 0.0; // > 0
};

/// One database row. Dimensions in millimetres; width_mm is the spine width
/// (the footprint along the shelf when the book stands upright).
struct BookRecord {
  int id = 0;
  std::string title;
  double height_mm = 0.0;
  double width_mm = 0.0;
  double depth_mm = 0.0;
  std::string author;
  CoverType cover_type = CoverType::hard;
  int count = 1;
  SpineColorModel spine_color;
};

using BookDatabase = std::vector<BookRecord>;

namespace detail {

inline void validate_record(const BookRecord& r, std::size_t index) {
  const std::string at = "books[" + std::to_string(index) + "]";
  if (r.id < 0) throw ValidationError(at + ": id must be >= 0");
  if (!(r.height_mm > 0.0 && r.width_mm > 0.0 && r.depth_mm > 0.0))
    throw ValidationError(at + ": dimensions must be strictly positive");
  if (r.count < 1) throw ValidationError(at + ": count must be >= 1");
  const SpineColorModel& c = r.spine_color;
  if (!(c.hue_mean >= 0.0 && c.hue_mean < 1.0))
    throw ValidationError(at + ": hue_mean must be in [0, 1)");
  if (!(c.sat_mean >= 0.0 && c.sat_mean <= 1.0))
    throw ValidationError(at + ": sat_mean must be in [0, 1]");
  if (!(c.val_mean >= 0.0 && c.val_mean <= 1.0))
    throw ValidationError(at + ": val_mean must be in [0, 1]");
  if (!(c.hue_spread > 0.0 && c.sat_spread > 0.0 && c.val_spread > 0.0))
    throw ValidationError(at + ": spreads must be strictly positive");
}

inline void expect_keys(const nlohmann::json& obj,
                        const std::set<std::string>& keys,
                        const std::string& at) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!keys.count(key))
      throw ParseError(at + ": unexpected key '" + key + "'");
  }
  for (const auto& key : keys) {
    if (!obj.contains(key))
      throw ParseError(at + ": missing key '" + key + "'");
  }
}

inline BookRecord record_from_json(const nlohmann::json& j, std::size_t index) {
  const std::string at = "books[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ParseError(at + ": expected an object");
  expect_keys(j,
              {"id", "title", "height_mm", "width_mm", "depth_mm", "author",
               "cover_type", "count", "spine_color"},
              at);
  expect_keys(j.at("spine_color"),
              {"hue_mean", "hue_spread", "sat_mean", "sat_spread", "val_mean",
               "val_spread"},
              at + ".spine_color");
  BookRecord r;
  try {
    r.id = j.at("id").get<int>();
    r.title = j.at("title").get<std::string>();
    r.height_mm = j.at("height_mm").get<double>();
    r.width_mm = j.at("width_mm").get<double>();
    r.depth_mm = j.at("depth_mm").get<double>();
    r.author = j.at("author").get<std::string>();
    r.count = j.at("count").get<int>();
    const std::string cover = j.at("cover_type").get<std::string>();
    if (cover == "hard")
      r.cover_type = CoverType::hard;
    else if (cover == "soft")
      r.cover_type = CoverType::soft;
    else
      throw ParseError(at + ": cover_type must be 'hard' or 'soft'");
    const auto& c = j.at("spine_color");
    r.spine_color = {c.at("hue_mean").get<double>(),
                     c.at("hue_spread").get<double>(),
                     c.at("sat_mean").get<double>(),
                     c.at("sat_spread").get<double>(),
                     c.at("val_mean").get<double>(),
                     c.at("val_spread").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(at + ": " + e.what());
  }
  return r;
}

inline nlohmann::json record_to_json(const BookRecord& r) {
  return {{"id", r.id},
          {"title", r.title},
          {"height_mm", r.height_mm},
          {"width_mm", r.width_mm},
          {"depth_mm", r.depth_mm},
          {"author", r.author},
          {"cover_type", r.cover_type == CoverType::hard ? "hard" : "soft"},
          {"count", r.count},
          {"spine_color",
           {{"hue_mean", r.spine_color.hue_mean},
            {"hue_spread", r.spine_color.hue_spread},
            {"sat_mean", r.spine_color.sat_mean},
            {"sat_spread", r.spine_color.sat_spread},
            {"val_mean", r.spine_color.val_mean},
            {"val_spread", r.spine_color.val_spread}}}};
}

} // namespace detail

/// Validates every record plus id uniqueness across the database.
inline void validate_database(const BookDatabase& db) {
  std::set<int> seen;
  for (std::size_t i = 0; i < db.size(); ++i) {
    detail::validate_record(db[i], i);
    if (!seen.insert(db[i].id).second)
      throw ValidationError("books[" + std::to_string(i) +
                            "]: duplicate id " + std::to_string(db[i].id));
  }
}

/// Loads and validates a book database from a books.json file.
inline BookDatabase load_database(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open database file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path + ": expected a JSON array");
  BookDatabase db;
  db.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    db.push_back(detail::record_from_json(j[i], i));
  validate_database(db);
  return db;
}

/// Writes the database in the same format load_database reads.
inline void save_database(const BookDatabase& db, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : db) j.push_back(detail::record_to_json(r));
  std::ofstream out(path);
  if (!out) throw IoError("cannot write database file: " + path);
  out << j.dump(2) << '\n';
}

/// Record with the given id. Throws when the id is unknown.
inline const BookRecord& lookup(const BookDatabase& db, int id) {
  for (const auto& r : db)
    if (r.id == id) return r;
  throw DomainError("unknown book id " + std::to_string(id));
}

inline const BookRecord* find_book(const BookDatabase& db, int id) {
  for (const auto& r : db)
    if (r.id == id) return &r;
  return nullptr;
}

} // namespace librarian
