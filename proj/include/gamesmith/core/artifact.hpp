#pragma once

#include "gamesmith/core/mechanics.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gamesmith::core {

// One single-file game document.
struct GameArtifact {
    std::string html;
    std::string title;
    std::size_t byte_length = 0;

    static GameArtifact from_html(std::string html);
    bool empty() const { return html.empty(); }
};

// Extracts the <title> text of a document, empty when absent.
std::string extract_title(const std::string& html);

// Evaluator-side view of one iteration. Scores arrive on a 0..10 scale
// and are clamped; the two validity predicates are carried only as
// asserted booleans.
struct EvaluationReport {
    double creativity_10 = 0.0;
    double playability_10 = 0.0;
    double overall_10 = 0.0;
    std::vector<MechanicDescriptor> realized_mechanics;
    std::map<std::string, bool> realization_flags;
    double structural_change_score = 0.0;
    std::optional<bool> meaningful_play_asserted;
    std::optional<bool> learnability_asserted;
    std::string novelty_grounding_notes;
};

enum class Role {
    planning,
    skeleton,
    feature,
    visual,
    refinement,
    repair,
    evaluation,
    reflection,
    formatting,
};

inline constexpr std::size_t kRoleCount = 9;

const char* role_name(Role role);
std::optional<Role> role_from_name(const std::string& name);

struct RoleProfile {
    Role role = Role::planning;
    double temperature = 0.7;
    std::size_t token_budget = 0;
};

// Default per-role sampling profile.
RoleProfile default_role_profile(Role role);

} // namespace gamesmith::core
