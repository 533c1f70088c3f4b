#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "librarian/bookdb.hpp"
#include "librarian/fusion.hpp"
#include "librarian/simulator.hpp"

namespace librarian {

struct BeliefRow {
  int book_id = kUnknownBookId;
  double confidence = 0.0;
  double est_width_mm = 0.0;
  double est_height_mm = 0.0;
  std::string title;
};

struct EpisodeSummary {
  std::size_t actions_total = 0;
  std::size_t actions_ok = 0;
  std::optional<std::size_t> halted_at;
  std::optional<FailureReason> failure;
};

/// Everything a run produces for the operator: the fused belief table, how
/// the episode went, and the final left-to-right order on the target level.
struct RunReport {
  std::vector<BeliefRow> belief_table;
  EpisodeSummary episode_summary;
  std::vector<std::pair<int, double>> final_order; // (book_id, x_mm), by x
};

inline std::vector<BeliefRow> belief_rows(const WorldBelief& belief,
                                          const BookDatabase& db) {
  std::vector<BeliefRow> rows;
  for (const auto& c : belief.clusters) {
    BeliefRow row{c.book_id, c.confidence, c.est_width_mm, c.est_height_mm, ""};
    if (c.book_id != kUnknownBookId)
      if (const BookRecord* book = find_book(db, c.book_id))
        row.title = book->title;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RunReport build_report(const WorldBelief& belief, const BookDatabase& db,
                              const EpisodeLog& log, int target_level) {
  RunReport report;
  report.belief_table = belief_rows(belief, db);
  report.episode_summary.actions_total = log.steps.size();
  std::size_t ok = 0;
  for (const auto& step : log.steps)
    if (step.result.ok) ++ok;
  report.episode_summary.actions_ok = ok;
  report.episode_summary.halted_at = log.halted_at;
  if (log.halted_at) report.episode_summary.failure = log.steps.back().result.failure;

  for (const auto& p : log.final_scene.placements)
    if (p.level == target_level)
      report.final_order.emplace_back(p.book_id, p.x_mm);
  std::sort(report.final_order.begin(), report.final_order.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return report;
}

namespace detail {

inline std::string format_belief_rows(const std::vector<BeliefRow>& rows) {
  std::string out = "  id  confidence  est dims (mm)       title\n";
  char line[160];
  for (const auto& row : rows) {
    const std::string id =
        row.book_id == kUnknownBookId ? "?" : std::to_string(row.book_id);
    std::snprintf(line, sizeof line, "%4s  %10.2f  %7.1f x %7.1f   %s\n",
                  id.c_str(), row.confidence, row.est_width_mm,
                  row.est_height_mm, row.title.c_str());
    out += line;
  }
  return out;
}

} // namespace detail

/// One row per cluster with the panel columns: book ID, confidence,
/// estimated dimension, and title. Unknown clusters render as "?".
inline std::string render_belief_table(const WorldBelief& belief,
                                       const BookDatabase& db) {
  return detail::format_belief_rows(belief_rows(belief, db));
}

inline std::string render_report(const RunReport& report) {
  std::string out = detail::format_belief_rows(report.belief_table);
  char line[160];
  const auto& ep = report.episode_summary;
  std::snprintf(line, sizeof line, "episode: %zu/%zu actions ok", ep.actions_ok,
                ep.actions_total);
  out += line;
  if (ep.halted_at) {
    std::snprintf(line, sizeof line, ", halted at action %zu (%s)",
                  *ep.halted_at, ep.failure ? to_string(*ep.failure) : "?");
    out += line;
  }
  out += "\nfinal order:";
  for (const auto& [id, x] : report.final_order) {
    std::snprintf(line, sizeof line, " %d@%.1fmm", id, x);
    out += line;
  }
  out += "\n";
  return out;
}

inline nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : report.belief_table)
    table.push_back({{"book_id", row.book_id},
                     {"confidence", row.confidence},
                     {"est_dims_mm", {row.est_width_mm, row.est_height_mm}},
                     {"title", row.title}});
  nlohmann::json summary = {
      {"actions_total", report.episode_summary.actions_total},
      {"actions_ok", report.episode_summary.actions_ok}};
  if (report.episode_summary.halted_at)
    summary["halted_at"] = *report.episode_summary.halted_at;
  if (report.episode_summary.failure)
    summary["failure_reason"] = to_string(*report.episode_summary.failure);
  nlohmann::json order = nlohmann::json::array();
  for (const auto& [id, x] : report.final_order)
    order.push_back({{"book_id", id}, {"x_mm", x}});
  return {{"belief_table", table},
          {"episode_summary", summary},
          {"final_order", order}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
  RunReport report;
  try {
    for (const auto& row : j.at("belief_table")) {
      BeliefRow r;
      r.book_id = row.at("book_id").get<int>();
      r.confidence = row.at("confidence").get<double>();
      r.est_width_mm = row.at("est_dims_mm")[0].get<double>();
      r.est_height_mm = row.at("est_dims_mm")[1].get<double>();
      r.title = row.at("title").get<std::string>();
      report.belief_table.push_back(std::move(r));
    }
    const auto& summary = j.at("episode_summary");
    report.episode_summary.actions_total =
        summary.at("actions_total").get<std::size_t>();
    report.episode_summary.actions_ok =
        summary.at("actions_ok").get<std::size_t>();
    if (summary.contains("halted_at"))
      report.episode_summary.halted_at =
          summary.at("halted_at").get<std::size_t>();
    for (const auto& entry : j.at("final_order"))
      report.final_order.emplace_back(entry.at("book_id").get<int>(),
                                      entry.at("x_mm").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return report;
}

} // namespace librarian
