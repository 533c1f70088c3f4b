#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "librarian/bookdb.hpp"
#include "librarian/fusion.hpp"
#include "librarian/planner.hpp"
#include "librarian/report.hpp"
#include "librarian/scenario.hpp"
#include "librarian/simulator.hpp"

namespace librarian {

struct PerceiveResult {
  std::vector<Observation> observations;
  WorldBelief belief;
};

/// Synthesizes a window of observations and fuses them into a belief.
/// `seed` / `window` override the scenario values when set.
inline PerceiveResult perceive(const Scenario& scenario, const BookDatabase& db,
                               std::optional<std::uint64_t> seed = {},
                               std::optional<int> window = {}) {
  validate_scene(scenario.scene, db);
  NoiseModel noise = scenario.noise;
  if (seed) noise.seed = *seed;
  const int n = window.value_or(scenario.config.window);
  if (n < 1) throw DomainError("perceive: window must be >= 1");

  PerceiveResult result;
  const auto refs = reference_histograms(db);
  for (int seq = 0; seq < n; ++seq)
    result.observations.push_back(synth_observation(
        scenario.scene, db, refs, noise, seq, scenario.config.min_score));

  FusionConfig fusion_config;
  fusion_config.window = n;
  fusion_config.prune_min = scenario.config.prune_min;
  result.belief = build_belief(result.observations, db, noise.seed, fusion_config);
  return result;
}

inline Plan plan_for(const WorldBelief& belief, const Scenario& scenario,
                     const BookDatabase& db) {
  SortCommand cmd;
  cmd.property = SortProperty::height;
  cmd.target_shelf_level = scenario.config.target_level;
  PlannerConfig config;
  config.margin_mm = scenario.config.margin_mm;
  config.gap_mm = scenario.config.gap_mm;
  return make_plan(belief, cmd, db, scenario.scene.shelf, config);
}

struct RunResult {
  PerceiveResult perception;
  Plan plan;
  EpisodeLog episode;
  RunReport report;
};

/// End-to-end run: perceive, plan, execute, report.
inline RunResult run_scenario(const Scenario& scenario, const BookDatabase& db,
                              std::optional<std::uint64_t> seed = {},
                              std::optional<int> window = {}) {
  RunResult result;
  result.perception = perceive(scenario, db, seed, window);
  result.plan = plan_for(result.perception.belief, scenario, db);
  result.episode = run_episode(scenario.scene, result.plan, db,
                               scenario.config.lean_tolerance_mm);
  result.report = build_report(result.perception.belief, db, result.episode,
                               scenario.config.target_level);
  return result;
}

} // namespace librarian
