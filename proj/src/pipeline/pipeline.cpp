#include "gamesmith/pipeline/pipeline.hpp"

#include "gamesmith/browser/webdriver.hpp"
#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"
#include "gamesmith/core/json.hpp"

#include <chrono>
#include <sstream>

namespace gamesmith::pipeline {

namespace {

struct StageRecorder {
    nlohmann::json stages = nlohmann::json::array();

    nlohmann::json& begin(const std::string& stage, core::Role role) {
        nlohmann::json record;
        record["stage"] = stage;
        record["role"] = core::role_name(role);
        record["request_digest"] = "";
        record["response_digest"] = "";
        record["attempts"] = 0;
        record["used_fallback"] = false;
        record["duration_ms"] = 0;
        record["outcome"] = "";
        record["notes"] = nlohmann::json::array();
        stages.push_back(std::move(record));
        return stages.back();
    }
};

struct StageOutput {
    std::string text;
    bool ok = false;
};

std::string describe_errors(const analysis::ValidationReport& report) {
    std::ostringstream out;
    for (const auto& outcome : report.outcomes) {
        if (outcome.severity == analysis::Severity::pass) {
            continue;
        }
        out << "- [" << analysis::severity_name(outcome.severity) << "] "
            << analysis::check_id_name(outcome.check_id) << ": " << outcome.message;
        if (outcome.location) {
            out << " (line " << outcome.location->line << ", col " << outcome.location->column
                << ")";
        }
        out << '\n';
    }
    return out.str();
}

std::string render_memory_context(const std::vector<memory::MemoryItem>& retrieved,
                                  const std::vector<std::string>& rules,
                                  const std::vector<std::string>& pool) {
    std::ostringstream out;
    if (!retrieved.empty()) {
        out << "Lineage lessons (value-weighted):\n";
        for (const auto& item : retrieved) {
            out << "- [value " << item.value << "] " << item.intent;
            if (!item.representation.empty()) {
                out << ": " << item.representation;
            }
            out << '\n';
        }
    }
    if (!rules.empty()) {
        out << "Creativity rules:\n";
        for (const auto& rule : rules) {
            out << "- " << rule << '\n';
        }
    }
    if (!pool.empty()) {
        out << "Game pool references:\n";
        std::size_t shown = 0;
        for (const auto& game : pool) {
            if (++shown > 5) break;
            out << "- " << game << '\n';
        }
    }
    const std::string text = out.str();
    return text.empty() ? "(none yet)" : text;
}

std::string render_archive_context(const memory::ArchiveQueryResult& query) {
    std::ostringstream out;
    auto section = [&](const char* title, const std::vector<memory::MechanicArchiveEntry>& list) {
        out << title << ":";
        if (list.empty()) {
            out << " (none)\n";
            return;
        }
        out << '\n';
        for (const auto& entry : list) {
            out << "- " << entry.mechanic.name << " — " << entry.mechanic.description
                << " (used " << entry.usage_count << "x)\n";
        }
    };
    section("Relevant mechanics", query.relevant);
    section("Underexplored mechanics", query.underexplored);
    section("Overused mechanics", query.overused);
    section("Forbidden mechanics", query.forbidden);
    return out.str();
}

} // namespace

Pipeline::Pipeline(std::shared_ptr<llm::Gateway> gateway,
                   std::shared_ptr<store::LineageStore> store, PipelineConfig config)
    : gateway_(std::move(gateway)), store_(std::move(store)), config_(std::move(config)),
      prompts_(config_.prompts_dir.empty() ? PromptLibrary::built_in()
                                           : PromptLibrary::from_directory(config_.prompts_dir)) {
    if (!gateway_ || !store_) {
        throw Error(ErrorCode::config_invalid, "pipeline needs a gateway and a store");
    }
}

GenerationResult Pipeline::generate(const GenerationRequest& request) {
    if (request.parent_node_id && !request.lineage_id) {
        throw Error(ErrorCode::config_invalid, "parent_node_id requires lineage_id");
    }

    store_->init();
    std::string lineage_id =
        request.lineage_id ? *request.lineage_id : store_->create_lineage(request.prompt);
    if (!store_->lineage_exists(lineage_id)) {
        throw Error(ErrorCode::not_found, "unknown lineage " + lineage_id);
    }
    store::LineageLock lock = store_->lock_lineage(lineage_id);

    std::optional<store::LineageNode> parent;
    if (request.parent_node_id) {
        try {
            parent = store_->load_node(lineage_id, *request.parent_node_id);
        } catch (const Error&) {
            throw Error(ErrorCode::unknown_parent,
                        "parent node " + *request.parent_node_id + " not found");
        }
    }
    const std::vector<core::MechanicDescriptor> parent_mechanics =
        parent ? parent->evaluation.realized_mechanics : std::vector<core::MechanicDescriptor>{};
    const std::string parent_code = parent ? parent->artifact.html : "";

    // Layer-1 retrieval plus Layer-2 global context, assembled once per call.
    std::vector<memory::MemoryItem> memory_items = store_->load_memory(lineage_id);
    const std::set<std::string> prompt_tokens = tokenize(request.prompt);
    const std::vector<memory::MemoryItem> retrieved = memory::retrieve(
        memory_items, prompt_tokens, config_.retrieval_k, config_.memory.beta_similarity);
    memory::MechanicArchive archive = store_->load_archive();
    const memory::ArchiveQueryResult archive_view =
        memory::archive_query(archive, prompt_tokens, config_.memory);
    const std::string memory_context = render_memory_context(
        retrieved, store_->load_creativity_rules(), store_->load_game_pool());
    const std::string archive_context = render_archive_context(archive_view);

    StageRecorder trace;

    auto run_stage = [&](const std::string& stage, core::Role role,
                         const std::map<std::string, std::string>& vars) -> StageOutput {
        nlohmann::json& record = trace.begin(stage, role);
        const std::string user_text = prompts_.render(role, vars);
        const std::string system_text = prompts_.system_text(role);
        record["request_digest"] = digest(system_text + "\n" + user_text);
        const auto started = std::chrono::steady_clock::now();
        StageOutput output;
        try {
            llm::CompletionResult result = gateway_->complete(role, system_text, user_text);
            output.text = std::move(result.text);
            output.ok = true;
            record["attempts"] = result.attempts;
            record["used_fallback"] = result.used_fallback;
            record["response_digest"] = digest(output.text);
            record["outcome"] = "ok";
        } catch (const Error& e) {
            record["attempts"] = (gateway_->policy().max_retries + 1) * 2;
            record["outcome"] = std::string("failed: ") + e.what();
        }
        record["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - started)
                                    .count();
        return output;
    };
    auto note = [&](const std::string& text) {
        if (!trace.stages.empty()) {
            trace.stages.back()["notes"].push_back(text);
        }
    };

    // ---- Plan --------------------------------------------------------
    const std::map<std::string, std::string> plan_vars = {
        {kPlaceholderPrompt, request.prompt},
        {kPlaceholderParentCode, parent_code},
        {kPlaceholderMemoryContext, memory_context},
        {kPlaceholderArchiveContext, archive_context},
    };
    core::MechanicPlan plan;
    bool plan_parsed = false;
    for (int attempt = 0; attempt < 2 && !plan_parsed; ++attempt) {
        StageOutput output = run_stage("plan", core::Role::planning, plan_vars);
        if (!output.ok) {
            break;
        }
        try {
            plan = parse_mechanic_plan(output.text);
            plan_parsed = true;
            note("plan parsed: " + std::to_string(plan.add.size()) + " add, " +
                 std::to_string(plan.preserve.size()) + " preserve");
        } catch (const Error&) {
            note(attempt == 0 ? "mechanic set missing; retrying planner"
                              : "mechanic set still missing; continuing with empty plan");
        }
    }
    const std::string contract = render_mechanic_contract(plan);

    // ---- Iterations ---------------------------------------------------
    core::GameArtifact current;
    core::EvaluationReport evaluation;
    analysis::ValidationReport validation;
    core::MechanicDelta delta;
    reward::RewardBreakdown breakdown;
    std::size_t iterations_used = 0;

    auto generation_stage = [&](const std::string& stage, core::Role role,
                                const std::map<std::string, std::string>& vars,
                                const core::GameArtifact& fallback) -> core::GameArtifact {
        StageOutput output = run_stage(stage, role, vars);
        if (output.ok) {
            core::GameArtifact artifact = try_extract_html(output.text);
            if (!artifact.empty()) {
                return artifact;
            }
            note("no document in " + stage + " output; reusing previous artifact");
        } else {
            note(stage + " exhausted retries; reusing previous artifact");
        }
        return fallback;
    };

    for (std::size_t iteration = 1; iteration <= config_.max_iterations; ++iteration) {
        iterations_used = iteration;

        if (iteration == 1) {
            StageOutput skeleton_out = run_stage("skeleton", core::Role::skeleton,
                                                 {{kPlaceholderPrompt, request.prompt},
                                                  {kPlaceholderMechanicContract, contract}});
            core::GameArtifact skeleton;
            if (skeleton_out.ok) {
                skeleton = try_extract_html(skeleton_out.text);
            }
            if (skeleton.empty() && parent) {
                note("skeleton unavailable; refining parent artifact instead");
                skeleton = parent->artifact;
            }
            if (skeleton.empty()) {
                nlohmann::json partial = {{"prompt", request.prompt},
                                          {"stages", trace.stages},
                                          {"failed", true}};
                store_->save_partial_trace(lineage_id, partial);
                throw Error(ErrorCode::pipeline_failed,
                            "skeleton stage produced no artifact and no fallback exists");
            }
            core::GameArtifact featured =
                generation_stage("feature", core::Role::feature,
                                 {{kPlaceholderPrompt, request.prompt},
                                  {kPlaceholderMechanicContract, contract},
                                  {kPlaceholderParentCode, skeleton.html}},
                                 skeleton);
            current = generation_stage("visual", core::Role::visual,
                                       {{kPlaceholderMechanicContract, contract},
                                        {kPlaceholderParentCode, featured.html}},
                                       featured);
        } else {
            current = generation_stage("refinement", core::Role::refinement,
                                       {{kPlaceholderPrompt, request.prompt},
                                        {kPlaceholderMechanicContract, contract},
                                        {kPlaceholderParentCode, current.html}},
                                       current);
        }

        // ---- Validate (and repair once) -------------------------------
        validation = analysis::analyze(current.html);
        if (validation.error_count > 0) {
            StageOutput repair_out = run_stage("repair", core::Role::repair,
                                               {{kPlaceholderMechanicContract, contract},
                                                {kPlaceholderParentCode, current.html},
                                                {kPlaceholderErrors, describe_errors(validation)}});
            if (repair_out.ok) {
                core::GameArtifact repaired = try_extract_html(repair_out.text);
                if (!repaired.empty()) {
                    const analysis::ValidationReport revalidation =
                        analysis::analyze(repaired.html);
                    if (revalidation.score >= validation.score) {
                        current = repaired;
                        validation = revalidation;
                        note("repair kept: score " + std::to_string(revalidation.score));
                    } else {
                        note("repair regressed score; keeping original artifact");
                    }
                } else {
                    note("repair output had no document; keeping original artifact");
                }
            }
        }
        if (config_.browser_enabled) {
            try {
                validation.runtime = browser::run_browser_check(
                    current, config_.browser_endpoint, config_.browser_timeout_ms);
            } catch (const Error& e) {
                browser::RuntimeResult degraded;
                degraded.degraded = true;
                validation.runtime = degraded;
                note(std::string("browser check degraded to static analysis: ") + e.what());
            }
        }

        // ---- Evaluate --------------------------------------------------
        const std::map<std::string, std::string> eval_vars = {
            {kPlaceholderPrompt, request.prompt},
            {kPlaceholderMechanicContract, contract},
            {kPlaceholderParentCode, current.html},
        };
        bool eval_parsed = false;
        for (int attempt = 0; attempt < 2 && !eval_parsed; ++attempt) {
            StageOutput output = run_stage("evaluation", core::Role::evaluation, eval_vars);
            if (!output.ok) {
                break;
            }
            std::vector<std::string> warnings;
            try {
                evaluation = parse_evaluation(output.text, &warnings);
                eval_parsed = true;
                for (const auto& warning : warnings) {
                    note(warning);
                }
            } catch (const Error&) {
                note(attempt == 0 ? "evaluation unparseable; retrying evaluator"
                                  : "evaluation unparseable twice; using conservative defaults");
            }
        }
        if (!eval_parsed) {
            evaluation = core::EvaluationReport{};
        }

        delta = core::compute_mechanic_delta(parent_mechanics, evaluation.realized_mechanics,
                                             config_.match_threshold);

        // ---- Reward ----------------------------------------------------
        const reward::SignalVector signals =
            reward::compute_signals(plan, evaluation, delta, validation, archive);
        reward::GateInputs gates;
        gates.playability_sanity = reward::playability_sanity(evaluation, validation);
        gates.runtime_test_passed = reward::runtime_test_passed(validation);
        breakdown = reward::compute_reward(signals, gates);

        // ---- Reflect + loop control -----------------------------------
        std::ostringstream iteration_summary;
        iteration_summary << "reward " << breakdown.final_reward << "; validation score "
                          << validation.score << " (" << validation.error_count << " errors, "
                          << validation.warning_count << " warnings); creativity "
                          << evaluation.creativity_10 << "/10";
        StageOutput reflection_out = run_stage("reflection", core::Role::reflection,
                                               {{kPlaceholderPrompt, request.prompt},
                                                {kPlaceholderMechanicContract, contract},
                                                {kPlaceholderErrors, iteration_summary.str()}});
        ReflectionOutcome reflection;
        if (reflection_out.ok) {
            reflection = parse_reflection(reflection_out.text);
            if (!reflection.parsed) {
                note("no verdict found; defaulting to continue");
            }
        } else {
            note("reflection unavailable; defaulting to continue");
        }
        for (const auto& [intent, representation] : reflection.memory_payload) {
            const std::string id = "mem_" + digest(intent + "|" + representation).substr(0, 8);
            bool exists = false;
            for (const auto& item : memory_items) {
                if (item.id == id) {
                    exists = true;
                    break;
                }
            }
            if (!exists) {
                memory::MemoryItem item;
                item.id = id;
                item.intent = intent;
                item.representation = representation;
                item.value = 0.0;
                item.visits = 0;
                memory_items.push_back(std::move(item));
            }
        }

        if (loop_should_stop(iteration, breakdown.final_reward, reflection.stop,
                             config_.max_iterations, config_.stop_reward)) {
            break;
        }
    }

    // ---- Format + persist ----------------------------------------------
    StageOutput format_out = run_stage("formatting", core::Role::formatting,
                                       {{kPlaceholderParentCode, current.html}});
    core::GameArtifact final_artifact = current;
    if (format_out.ok) {
        std::vector<std::string> warnings;
        final_artifact = extract_final_html(format_out.text, &current, &warnings);
        for (const auto& warning : warnings) {
            note(warning);
        }
    } else {
        note("formatter unavailable; persisting last validated artifact");
    }

    store::LineageNode node;
    node.parent_id = request.parent_node_id;
    node.prompt = request.prompt;
    node.artifact = final_artifact;
    node.evaluation = evaluation;
    node.validation = validation;
    node.reward = breakdown;
    node.mechanic_plan = plan;
    node.mechanic_delta = delta;
    node.created_at = now_iso8601();
    node.iterations_used = iterations_used;

    nlohmann::json full_trace = {{"prompt", request.prompt},
                                 {"iterations_used", iterations_used},
                                 {"stages", trace.stages}};
    const std::string node_id = store_->save_node(lock, node, full_trace);

    // Value-update everything retrieved this call, then persist payloads.
    const double r = memory::reward_to_return(breakdown.final_reward);
    std::set<std::string> retrieved_ids;
    for (const auto& item : retrieved) {
        retrieved_ids.insert(item.id);
    }
    for (auto& item : memory_items) {
        if (retrieved_ids.count(item.id) || item.visits == 0) {
            item = memory::update_value(item, r, config_.memory.alpha);
        }
    }
    store_->save_memory(lock, memory_items);

    // Write-back against a fresh snapshot so concurrent lineages keep
    // their insertions.
    memory::MechanicArchive latest = store_->load_archive();
    latest = memory::archive_write_back(latest, evaluation.realized_mechanics,
                                        breakdown.final_reward, config_.memory);
    store_->save_archive(latest);

    GenerationResult result;
    result.lineage_id = lineage_id;
    result.node_id = node_id;
    result.reward = breakdown;
    result.iterations_used = iterations_used;
    return result;
}

} // namespace gamesmith::pipeline
