#pragma once

#include "gamesmith/llm/gateway.hpp"
#include "gamesmith/memory/memory.hpp"
#include "gamesmith/pipeline/parsers.hpp"
#include "gamesmith/pipeline/prompts.hpp"
#include "gamesmith/reward/reward.hpp"
#include "gamesmith/store/lineage_store.hpp"

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

namespace gamesmith::pipeline {

struct PipelineConfig {
    std::size_t max_iterations = 3;
    double stop_reward = 0.75;
    std::size_t retrieval_k = 5;
    bool browser_enabled = false;
    std::string browser_endpoint;
    std::uint64_t browser_timeout_ms = 8000;
    double match_threshold = core::kDefaultMatchThreshold;
    memory::MemoryConfig memory;
    std::string prompts_dir; // empty: built-in templates
};

struct GenerationRequest {
    std::string prompt;
    std::optional<std::string> lineage_id;    // absent: create a new lineage
    std::optional<std::string> parent_node_id; // requires lineage_id
};

struct GenerationResult {
    std::string lineage_id;
    std::string node_id;
    reward::RewardBreakdown reward;
    std::size_t iterations_used = 1;
};

// One generation call end to end: plan, generate (skeleton/feature/visual,
// then refinement passes), validate and repair, evaluate, reward, reflect,
// loop-control, format, persist. Exactly one lineage node is saved per
// call; stage fallbacks reuse the previous artifact instead of aborting.
class Pipeline {
public:
    Pipeline(std::shared_ptr<llm::Gateway> gateway, std::shared_ptr<store::LineageStore> store,
             PipelineConfig config);

    GenerationResult generate(const GenerationRequest& request);

    const PipelineConfig& config() const { return config_; }

private:
    std::shared_ptr<llm::Gateway> gateway_;
    std::shared_ptr<store::LineageStore> store_;
    PipelineConfig config_;
    PromptLibrary prompts_;
};

} // namespace gamesmith::pipeline
