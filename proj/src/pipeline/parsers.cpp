#include "gamesmith/pipeline/parsers.hpp"

#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace gamesmith::pipeline {

namespace {

constexpr const char* kBlockHeader = "CURRENT_MECHANIC_SET";

struct FencedBlock {
    std::string info;    // text on the fence line
    std::string content; // lines between the fences
};

std::vector<FencedBlock> find_fenced_blocks(const std::string& text) {
    std::vector<FencedBlock> blocks;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = text.find("```", pos);
        if (open == std::string::npos) {
            break;
        }
        const std::size_t info_end = text.find('\n', open + 3);
        if (info_end == std::string::npos) {
            break;
        }
        const std::size_t close = text.find("```", info_end + 1);
        if (close == std::string::npos) {
            break;
        }
        FencedBlock block;
        block.info = trim(text.substr(open + 3, info_end - open - 3));
        block.content = text.substr(info_end + 1, close - info_end - 1);
        blocks.push_back(std::move(block));
        pos = close + 3;
    }
    return blocks;
}

std::vector<std::string> list_entries(const std::string& line_rest) {
    std::vector<std::string> out;
    for (const auto& raw : split(line_rest, ';')) {
        const std::string entry = trim(raw);
        if (entry.empty()) {
            continue;
        }
        const std::string lowered = to_lower(entry);
        if (lowered == "-" || lowered == "none" || lowered == "n/a") {
            continue;
        }
        out.push_back(entry);
    }
    return out;
}

std::set<core::StructureLayer> parse_layers(const std::string& field) {
    std::set<core::StructureLayer> layers;
    for (const auto& raw : split(field, ',')) {
        if (auto layer = core::layer_from_name(raw)) {
            if (core::is_mechanic_delta_layer(*layer)) {
                layers.insert(*layer);
            }
        }
    }
    return layers;
}

core::MechanicPlan parse_plan_block(const std::string& content) {
    core::MechanicPlan plan;
    std::set<std::string> names_seen; // across preserve/remove/add
    auto claim_name = [&](const std::string& name) {
        return names_seen.insert(to_lower(trim(name))).second;
    };

    for (const auto& raw_line : split(content, '\n')) {
        const std::string line = trim(raw_line);
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) {
            continue;
        }
        const std::string keyword = to_lower(trim(line.substr(0, colon)));
        const std::string rest = line.substr(colon + 1);
        if (keyword == "preserve") {
            for (const auto& entry : list_entries(rest)) {
                if (claim_name(entry)) {
                    plan.preserve.push_back(entry);
                }
            }
        } else if (keyword == "remove") {
            for (const auto& entry : list_entries(rest)) {
                if (claim_name(entry)) {
                    plan.remove.push_back(entry);
                }
            }
        } else if (keyword == "add") {
            for (const auto& entry : list_entries(rest)) {
                const auto fields = split(entry, '|');
                core::MechanicDescriptor mechanic;
                mechanic.name = trim(fields[0]);
                if (mechanic.name.empty() || !claim_name(mechanic.name)) {
                    continue;
                }
                mechanic.id = core::mechanic_id_from_name(mechanic.name);
                if (fields.size() > 1) {
                    mechanic.description = trim(fields[1]);
                }
                if (fields.size() > 2) {
                    mechanic.delta_layers = parse_layers(fields[2]);
                }
                mechanic.existence = 0.5;
                mechanic.importance = 0.5;
                mechanic.showcase = 0.5;
                plan.add.push_back(std::move(mechanic));
            }
        } else if (keyword == "recombine") {
            for (const auto& entry : list_entries(rest)) {
                const auto fields = split(entry, '|');
                const auto names = split(fields[0], '+');
                if (names.size() != 2) {
                    continue;
                }
                core::RecombineEntry recombine;
                recombine.first = trim(names[0]);
                recombine.second = trim(names[1]);
                if (recombine.first.empty() || recombine.second.empty()) {
                    continue;
                }
                if (fields.size() > 1) {
                    recombine.description = trim(fields[1]);
                }
                plan.recombine.push_back(std::move(recombine));
            }
        }
    }
    return plan;
}

} // namespace

std::string render_mechanic_contract(const core::MechanicPlan& plan) {
    std::string out = "```\n";
    out += kBlockHeader;
    out += '\n';
    auto join_names = [](const std::vector<std::string>& names) {
        std::string joined;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) joined += "; ";
            joined += names[i];
        }
        return joined;
    };
    out += "PRESERVE: " + join_names(plan.preserve) + "\n";
    std::string adds;
    for (std::size_t i = 0; i < plan.add.size(); ++i) {
        if (i > 0) adds += "; ";
        const auto& m = plan.add[i];
        adds += m.name + " | " + m.description + " | ";
        bool first = true;
        for (core::StructureLayer layer : core::kAllLayers) {
            if (m.delta_layers.count(layer)) {
                if (!first) adds += ",";
                adds += core::layer_name(layer);
                first = false;
            }
        }
    }
    out += "ADD: " + adds + "\n";
    out += "REMOVE: " + join_names(plan.remove) + "\n";
    std::string recombines;
    for (std::size_t i = 0; i < plan.recombine.size(); ++i) {
        if (i > 0) recombines += "; ";
        recombines += plan.recombine[i].first + " + " + plan.recombine[i].second + " | " +
                      plan.recombine[i].description;
    }
    out += "RECOMBINE: " + recombines + "\n";
    out += "```";
    return out;
}

core::MechanicPlan parse_mechanic_plan(const std::string& planner_text) {
    for (const auto& block : find_fenced_blocks(planner_text)) {
        if (block.info == kBlockHeader) {
            return parse_plan_block(block.content);
        }
        const std::string content = block.content;
        for (const auto& raw_line : split(content, '\n')) {
            const std::string line = trim(raw_line);
            if (line.empty()) {
                continue;
            }
            if (line == kBlockHeader) {
                return parse_plan_block(content);
            }
            break; // only the first non-empty line may carry the header
        }
    }
    throw Error(ErrorCode::missing_mechanic_set,
                "planner output has no CURRENT_MECHANIC_SET block");
}

namespace {

// Balanced-brace candidate extraction that respects JSON string quoting.
std::vector<std::string> json_object_candidates(const std::string& text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') {
            continue;
        }
        int depth = 0;
        bool in_string = false;
        bool escape = false;
        for (std::size_t j = i; j < text.size(); ++j) {
            const char c = text[j];
            if (in_string) {
                if (escape) {
                    escape = false;
                } else if (c == '\\') {
                    escape = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    out.push_back(text.substr(i, j - i + 1));
                    break;
                }
            }
        }
    }
    return out;
}

double clamp_score(double value, double lo, double hi, const char* field,
                   std::vector<std::string>* warnings) {
    if (value < lo || value > hi) {
        if (warnings) {
            warnings->push_back(std::string(field) + " out of range, clamped: " +
                                std::to_string(value));
        }
        return std::clamp(value, lo, hi);
    }
    return value;
}

} // namespace

core::EvaluationReport parse_evaluation(const std::string& evaluator_text,
                                        std::vector<std::string>* warnings) {
    static const char* required[] = {"creativity", "playability", "overall",
                                     "realized_mechanics", "structural_change"};
    for (const auto& candidate : json_object_candidates(evaluator_text)) {
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(candidate);
        } catch (const nlohmann::json::exception&) {
            continue;
        }
        if (!parsed.is_object()) {
            continue;
        }
        bool has_all = true;
        for (const char* key : required) {
            if (!parsed.contains(key)) {
                has_all = false;
                break;
            }
        }
        if (!has_all) {
            continue;
        }

        core::EvaluationReport report;
        report.creativity_10 =
            clamp_score(parsed.value("creativity", 0.0), 0, 10, "creativity", warnings);
        report.playability_10 =
            clamp_score(parsed.value("playability", 0.0), 0, 10, "playability", warnings);
        report.overall_10 = clamp_score(parsed.value("overall", 0.0), 0, 10, "overall", warnings);
        report.structural_change_score =
            clamp_score(parsed.value("structural_change", 0.0), 0, 1, "structural_change",
                        warnings);

        for (const auto& item : parsed.value("realized_mechanics", nlohmann::json::array())) {
            core::MechanicDescriptor mechanic;
            if (item.is_string()) {
                mechanic.name = item.get<std::string>();
            } else if (item.is_object()) {
                mechanic.name = item.value("name", "");
                mechanic.description = item.value("description", "");
                for (const auto& layer : item.value("layers", nlohmann::json::array())) {
                    if (layer.is_string()) {
                        if (auto parsed_layer = core::layer_from_name(layer.get<std::string>())) {
                            if (core::is_mechanic_delta_layer(*parsed_layer)) {
                                mechanic.delta_layers.insert(*parsed_layer);
                            }
                        }
                    }
                }
                mechanic.existence = clamp01(item.value("existence", 0.5));
                mechanic.importance = clamp01(item.value("importance", 0.5));
                mechanic.showcase = clamp01(item.value("showcase", 0.5));
            }
            if (mechanic.name.empty()) {
                continue;
            }
            if (mechanic.delta_layers.empty()) {
                // Admitted mechanics must tag at least one layer; a bare
                // rule change is a transition change.
                mechanic.delta_layers.insert(core::StructureLayer::transition);
                if (warnings) {
                    warnings->push_back("mechanic '" + mechanic.name +
                                        "' had no valid layers; defaulted to transition");
                }
            }
            mechanic.id = core::mechanic_id_from_name(mechanic.name);
            report.realized_mechanics.push_back(std::move(mechanic));
        }

        if (parsed.contains("realization") && parsed["realization"].is_object()) {
            for (const auto& [name, flag] : parsed["realization"].items()) {
                if (flag.is_boolean()) {
                    report.realization_flags[name] = flag.get<bool>();
                }
            }
        } else {
            for (const auto& mechanic : report.realized_mechanics) {
                report.realization_flags[mechanic.name] = true;
            }
            if (warnings && !report.realized_mechanics.empty()) {
                warnings->push_back("no realization map; derived flags from realized mechanics");
            }
        }
        if (parsed.contains("meaningful_play") && parsed["meaningful_play"].is_boolean()) {
            report.meaningful_play_asserted = parsed["meaningful_play"].get<bool>();
        }
        if (parsed.contains("learnability") && parsed["learnability"].is_boolean()) {
            report.learnability_asserted = parsed["learnability"].get<bool>();
        }
        report.novelty_grounding_notes = parsed.value("novelty_notes", "");
        return report;
    }
    throw Error(ErrorCode::evaluation_unparseable,
                "no JSON object with the expected evaluation keys");
}

core::GameArtifact try_extract_html(const std::string& stage_text) {
    for (const auto& block : find_fenced_blocks(stage_text)) {
        const std::string lowered = to_lower(block.content);
        if (lowered.find("<!doctype") != std::string::npos ||
            lowered.find("<html") != std::string::npos) {
            return core::GameArtifact::from_html(trim(block.content));
        }
    }
    const std::string lowered = to_lower(stage_text);
    std::size_t begin = lowered.find("<!doctype");
    if (begin == std::string::npos) {
        begin = lowered.find("<html");
    }
    const std::size_t close = lowered.rfind("</html>");
    if (begin != std::string::npos && close != std::string::npos && close > begin) {
        return core::GameArtifact::from_html(stage_text.substr(begin, close + 7 - begin));
    }
    return {};
}

core::GameArtifact extract_final_html(const std::string& formatter_text,
                                      const core::GameArtifact* last_good,
                                      std::vector<std::string>* warnings) {
    core::GameArtifact extracted = try_extract_html(formatter_text);
    if (!extracted.empty()) {
        return extracted;
    }
    if (last_good != nullptr && !last_good->empty()) {
        if (warnings) {
            warnings->push_back("formatter output had no document; kept last good artifact");
        }
        return *last_good;
    }
    throw Error(ErrorCode::format_failed, "no document in formatter output and no fallback");
}

ReflectionOutcome parse_reflection(const std::string& reflector_text) {
    ReflectionOutcome outcome;
    for (const auto& raw_line : split(reflector_text, '\n')) {
        const std::string line = trim(raw_line);
        const std::string lowered = to_lower(line);
        if (lowered.rfind("verdict", 0) == 0) {
            if (lowered.find("stop") != std::string::npos) {
                outcome.stop = true;
                outcome.parsed = true;
            } else if (lowered.find("continue") != std::string::npos) {
                outcome.stop = false;
                outcome.parsed = true;
            }
        } else if (lowered.rfind("memory", 0) == 0) {
            const std::size_t colon = line.find(':');
            if (colon == std::string::npos) {
                continue;
            }
            const std::string rest = line.substr(colon + 1);
            const auto fields = split(rest, '|');
            const std::string intent = trim(fields[0]);
            if (intent.empty()) {
                continue;
            }
            const std::string representation = fields.size() > 1 ? trim(fields[1]) : "";
            outcome.memory_payload.emplace_back(intent, representation);
        }
    }
    if (!outcome.parsed) {
        // Bare keyword fallback for free-form reflector output.
        const std::string lowered = to_lower(reflector_text);
        if (lowered.find("stop") != std::string::npos &&
            lowered.find("continue") == std::string::npos) {
            outcome.stop = true;
            outcome.parsed = true;
        } else if (lowered.find("continue") != std::string::npos) {
            outcome.stop = false;
            outcome.parsed = true;
        }
    }
    return outcome;
}

bool loop_should_stop(std::size_t iteration, double reward, bool verdict_stop,
                      std::size_t max_iterations, double stop_reward) {
    if (iteration >= max_iterations) {
        return true;
    }
    if (verdict_stop) {
        return true;
    }
    return reward >= stop_reward;
}

} // namespace gamesmith::pipeline
