#pragma once

#include "gamesmith/analysis/analyzer.hpp"
#include "gamesmith/core/artifact.hpp"
#include "gamesmith/core/mechanics.hpp"
#include "gamesmith/memory/archive.hpp"

#include <array>

#include <json.hpp>

namespace gamesmith::reward {

// The 7 proxy signals, each in [0,1].
struct SignalVector {
    double mechanic_realization = 0.0;
    double structural_mechanic_change = 0.0;
    double relative_mechanic_novelty = 0.0;
    double llm_creativity = 0.0;
    double runtime_playability = 0.0;
    double cosmetic_only_penalty = 0.0;
    double regression_penalty = 0.0;
};

struct GateInputs {
    double playability_sanity = 1.0;
    bool runtime_test_passed = true;
};

struct RewardBreakdown {
    SignalVector signals;
    std::array<double, 7> weighted_terms{};
    double pre_gate_reward = 0.0;
    bool soft_gate_applied = false;
    bool hard_gate_applied = false;
    double final_reward = 0.0;
};

// Signal weights. Positive weights total 0.90, penalties 0.25.
inline constexpr double kWeightMechanicRealization = 0.20;
inline constexpr double kWeightStructuralChange = 0.25;
inline constexpr double kWeightNovelty = 0.20;
inline constexpr double kWeightLlmCreativity = 0.15;
inline constexpr double kWeightRuntimePlayability = 0.10;
inline constexpr double kWeightCosmeticPenalty = 0.15;
inline constexpr double kWeightRegressionPenalty = 0.10;

inline constexpr double kSoftGateFactor = 0.25;
inline constexpr double kSoftGateThreshold = 0.6;
inline constexpr double kHardGateFactor = 0.5;
inline constexpr double kCosmeticChangeThreshold = 0.15;

// clamp((score - 3) / 7, 0, 1): a 0-10 judge score mapped so everything
// at or below 3 is worthless and 10 is maximal.
double llm_creativity_signal(double score_10);

// Derives the 7 signals for one iteration from the plan, the evaluator
// report, the mechanic delta, the validation report, and the archive.
SignalVector compute_signals(const core::MechanicPlan& plan, const core::EvaluationReport& eval,
                             const core::MechanicDelta& delta,
                             const analysis::ValidationReport& validation,
                             const memory::MechanicArchive& archive);

// Weighted sum followed by the multiplicative soft (playability sanity
// < 0.6 => x0.25) and hard (runtime test failed => x0.5) gates.
RewardBreakdown compute_reward(const SignalVector& signals, const GateInputs& gates);

// 0.5 * (evaluator playability / 10) + 0.5 * validation score: blends
// model-side and program-side playability evidence.
double playability_sanity(const core::EvaluationReport& eval,
                          const analysis::ValidationReport& validation);

// Tier-2 playable when a browser check ran; otherwise Tier-1 clean.
bool runtime_test_passed(const analysis::ValidationReport& validation);

void to_json(nlohmann::json& j, const SignalVector& s);
void from_json(const nlohmann::json& j, SignalVector& s);
void to_json(nlohmann::json& j, const RewardBreakdown& b);
void from_json(const nlohmann::json& j, RewardBreakdown& b);

} // namespace gamesmith::reward
