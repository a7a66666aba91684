#include "gamesmith/reward/reward.hpp"

#include "gamesmith/common/text.hpp"

#include <algorithm>

namespace gamesmith::reward {

double llm_creativity_signal(double score_10) {
    return clamp01((score_10 - 3.0) / 7.0);
}

SignalVector compute_signals(const core::MechanicPlan& plan, const core::EvaluationReport& eval,
                             const core::MechanicDelta& delta,
                             const analysis::ValidationReport& validation,
                             const memory::MechanicArchive& archive) {
    SignalVector signals;

    // Realization: planned add/preserve mechanics confirmed by the
    // evaluator's realization flags (case-insensitive name match).
    const std::vector<std::string> planned = plan.planned_names();
    if (!planned.empty()) {
        std::size_t realized = 0;
        for (const auto& name : planned) {
            const std::string key = to_lower(name);
            for (const auto& [flag_name, flagged] : eval.realization_flags) {
                if (to_lower(flag_name) == key && flagged) {
                    ++realized;
                    break;
                }
            }
        }
        signals.mechanic_realization =
            static_cast<double>(realized) / static_cast<double>(planned.size());
    }

    signals.structural_mechanic_change =
        clamp01(0.5 * delta.structural_change + 0.5 * eval.structural_change_score);

    if (!delta.added.empty()) {
        double total = 0.0;
        for (const auto& mechanic : delta.added) {
            total += 1.0 - archive.max_similarity(mechanic);
        }
        signals.relative_mechanic_novelty =
            clamp01(total / static_cast<double>(delta.added.size()));
    }

    signals.llm_creativity = llm_creativity_signal(eval.creativity_10);

    signals.runtime_playability = validation.score;
    if (validation.runtime && !validation.runtime->degraded && validation.runtime->playable) {
        signals.runtime_playability = 1.0;
    }

    signals.cosmetic_only_penalty =
        signals.structural_mechanic_change < kCosmeticChangeThreshold ? 1.0 : 0.0;

    std::size_t missing_core = 0;
    for (analysis::CheckId id : {analysis::CheckId::canvas_context,
                                 analysis::CheckId::loop_invoked,
                                 analysis::CheckId::input_listener}) {
        if (!validation.check_passed(id)) {
            ++missing_core;
        }
    }
    signals.regression_penalty = static_cast<double>(missing_core) / 3.0;

    return signals;
}

RewardBreakdown compute_reward(const SignalVector& signals, const GateInputs& gates) {
    RewardBreakdown breakdown;
    breakdown.signals = signals;
    breakdown.weighted_terms = {
        kWeightMechanicRealization * signals.mechanic_realization,
        kWeightStructuralChange * signals.structural_mechanic_change,
        kWeightNovelty * signals.relative_mechanic_novelty,
        kWeightLlmCreativity * signals.llm_creativity,
        kWeightRuntimePlayability * signals.runtime_playability,
        -kWeightCosmeticPenalty * signals.cosmetic_only_penalty,
        -kWeightRegressionPenalty * signals.regression_penalty,
    };
    breakdown.pre_gate_reward = 0.0;
    for (double term : breakdown.weighted_terms) {
        breakdown.pre_gate_reward += term;
    }
    breakdown.final_reward = breakdown.pre_gate_reward;
    if (gates.playability_sanity < kSoftGateThreshold) {
        breakdown.soft_gate_applied = true;
        breakdown.final_reward *= kSoftGateFactor;
    }
    if (!gates.runtime_test_passed) {
        breakdown.hard_gate_applied = true;
        breakdown.final_reward *= kHardGateFactor;
    }
    return breakdown;
}

double playability_sanity(const core::EvaluationReport& eval,
                          const analysis::ValidationReport& validation) {
    return 0.5 * (eval.playability_10 / 10.0) + 0.5 * validation.score;
}

bool runtime_test_passed(const analysis::ValidationReport& validation) {
    if (validation.runtime && !validation.runtime->degraded) {
        return validation.runtime->playable;
    }
    return validation.error_count == 0;
}

void to_json(nlohmann::json& j, const SignalVector& s) {
    j = nlohmann::json{{"mechanic_realization", s.mechanic_realization},
                       {"structural_mechanic_change", s.structural_mechanic_change},
                       {"relative_mechanic_novelty", s.relative_mechanic_novelty},
                       {"llm_creativity", s.llm_creativity},
                       {"runtime_playability", s.runtime_playability},
                       {"cosmetic_only_penalty", s.cosmetic_only_penalty},
                       {"regression_penalty", s.regression_penalty}};
}

void from_json(const nlohmann::json& j, SignalVector& s) {
    s.mechanic_realization = j.value("mechanic_realization", 0.0);
    s.structural_mechanic_change = j.value("structural_mechanic_change", 0.0);
    s.relative_mechanic_novelty = j.value("relative_mechanic_novelty", 0.0);
    s.llm_creativity = j.value("llm_creativity", 0.0);
    s.runtime_playability = j.value("runtime_playability", 0.0);
    s.cosmetic_only_penalty = j.value("cosmetic_only_penalty", 0.0);
    s.regression_penalty = j.value("regression_penalty", 0.0);
}

void to_json(nlohmann::json& j, const RewardBreakdown& b) {
    j = nlohmann::json{{"signals", b.signals},
                       {"weighted_terms", b.weighted_terms},
                       {"pre_gate_reward", b.pre_gate_reward},
                       {"soft_gate_applied", b.soft_gate_applied},
                       {"hard_gate_applied", b.hard_gate_applied},
                       {"final_reward", b.final_reward}};
}

void from_json(const nlohmann::json& j, RewardBreakdown& b) {
    b.signals = j.value("signals", SignalVector{});
    const auto terms = j.value("weighted_terms", std::vector<double>{});
    for (std::size_t i = 0; i < terms.size() && i < b.weighted_terms.size(); ++i) {
        b.weighted_terms[i] = terms[i];
    }
    b.pre_gate_reward = j.value("pre_gate_reward", 0.0);
    b.soft_gate_applied = j.value("soft_gate_applied", false);
    b.hard_gate_applied = j.value("hard_gate_applied", false);
    b.final_reward = j.value("final_reward", 0.0);
}

} // namespace gamesmith::reward
