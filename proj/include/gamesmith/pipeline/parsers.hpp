#pragma once

#include "gamesmith/core/artifact.hpp"
#include "gamesmith/core/mechanics.hpp"

#include <string>
#include <vector>

namespace gamesmith::pipeline {

// Serializes a plan into the fenced CURRENT_MECHANIC_SET block that gets
// prepended to every generation-stage prompt (the mechanic contract).
std::string render_mechanic_contract(const core::MechanicPlan& plan);

// Locates a fenced block headed CURRENT_MECHANIC_SET with PRESERVE / ADD /
// REMOVE / RECOMBINE lines (semicolon-separated entries, ADD entries are
// "name | description | layer,layer"). Duplicate names keep the first
// occurrence. Throws Error(missing_mechanic_set) when no block exists.
core::MechanicPlan parse_mechanic_plan(const std::string& planner_text);

// Extracts the first JSON object carrying creativity / playability /
// overall / realized_mechanics / structural_change. Scores are clamped
// with a warning pushed to `warnings`. Throws Error(evaluation_unparseable)
// when no such object exists.
core::EvaluationReport parse_evaluation(const std::string& evaluator_text,
                                        std::vector<std::string>* warnings = nullptr);

// Prefers a fenced block containing a full document, then the span from
// the first doctype to the last closing html tag, then `last_good`.
// Throws Error(format_failed) only when all three are missing.
core::GameArtifact extract_final_html(const std::string& formatter_text,
                                      const core::GameArtifact* last_good,
                                      std::vector<std::string>* warnings = nullptr);

// Same tolerant extraction used mid-pipeline; empty artifact when the
// stage output carries no document.
core::GameArtifact try_extract_html(const std::string& stage_text);

struct ReflectionOutcome {
    bool stop = false;
    bool parsed = false; // false when no verdict was found (defaults to continue)
    std::vector<std::pair<std::string, std::string>> memory_payload; // intent, representation
};

ReflectionOutcome parse_reflection(const std::string& reflector_text);

// Stops at the iteration cap, on a stop verdict, or once the reward
// clears the early-stop bar.
bool loop_should_stop(std::size_t iteration, double reward, bool verdict_stop,
                      std::size_t max_iterations, double stop_reward);

} // namespace gamesmith::pipeline
