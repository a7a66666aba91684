#include "gamesmith/core/json.hpp"

namespace gamesmith::core {

namespace {

nlohmann::json layers_to_json(const std::set<StructureLayer>& layers) {
    nlohmann::json arr = nlohmann::json::array();
    for (StructureLayer layer : kAllLayers) {
        if (layers.count(layer)) {
            arr.push_back(layer_name(layer));
        }
    }
    return arr;
}

std::set<StructureLayer> layers_from_json(const nlohmann::json& arr) {
    std::set<StructureLayer> layers;
    if (!arr.is_array()) {
        return layers;
    }
    for (const auto& item : arr) {
        if (item.is_string()) {
            if (auto layer = layer_from_name(item.get<std::string>())) {
                layers.insert(*layer);
            }
        }
    }
    return layers;
}

nlohmann::json pairs_to_json(const std::vector<MechanicPair>& pairs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [parent, child] : pairs) {
        arr.push_back({{"parent", parent}, {"child", child}});
    }
    return arr;
}

std::vector<MechanicPair> pairs_from_json(const nlohmann::json& arr) {
    std::vector<MechanicPair> pairs;
    if (!arr.is_array()) {
        return pairs;
    }
    for (const auto& item : arr) {
        pairs.emplace_back(item.at("parent").get<MechanicDescriptor>(),
                           item.at("child").get<MechanicDescriptor>());
    }
    return pairs;
}

} // namespace

void to_json(nlohmann::json& j, const MechanicDescriptor& m) {
    j = nlohmann::json{{"id", m.id},
                       {"name", m.name},
                       {"description", m.description},
                       {"delta_layers", layers_to_json(m.delta_layers)},
                       {"existence", m.existence},
                       {"importance", m.importance},
                       {"showcase", m.showcase}};
}

void from_json(const nlohmann::json& j, MechanicDescriptor& m) {
    m.id = j.value("id", "");
    m.name = j.value("name", "");
    m.description = j.value("description", "");
    if (m.id.empty()) {
        m.id = mechanic_id_from_name(m.name);
    }
    m.delta_layers = layers_from_json(j.value("delta_layers", nlohmann::json::array()));
    m.existence = j.value("existence", 0.0);
    m.importance = j.value("importance", 0.0);
    m.showcase = j.value("showcase", 0.0);
}

void to_json(nlohmann::json& j, const MechanicDelta& d) {
    j = nlohmann::json{{"added", d.added},
                       {"removed", d.removed},
                       {"modified", pairs_to_json(d.modified)},
                       {"preserved", pairs_to_json(d.preserved)},
                       {"structural_change", d.structural_change}};
}

void from_json(const nlohmann::json& j, MechanicDelta& d) {
    d.added = j.value("added", std::vector<MechanicDescriptor>{});
    d.removed = j.value("removed", std::vector<MechanicDescriptor>{});
    d.modified = pairs_from_json(j.value("modified", nlohmann::json::array()));
    d.preserved = pairs_from_json(j.value("preserved", nlohmann::json::array()));
    d.structural_change = j.value("structural_change", 0.0);
}

void to_json(nlohmann::json& j, const RecombineEntry& r) {
    j = nlohmann::json{{"first", r.first}, {"second", r.second}, {"description", r.description}};
}

void from_json(const nlohmann::json& j, RecombineEntry& r) {
    r.first = j.value("first", "");
    r.second = j.value("second", "");
    r.description = j.value("description", "");
}

void to_json(nlohmann::json& j, const MechanicPlan& p) {
    j = nlohmann::json{{"preserve", p.preserve},
                       {"add", p.add},
                       {"remove", p.remove},
                       {"recombine", p.recombine}};
}

void from_json(const nlohmann::json& j, MechanicPlan& p) {
    p.preserve = j.value("preserve", std::vector<std::string>{});
    p.add = j.value("add", std::vector<MechanicDescriptor>{});
    p.remove = j.value("remove", std::vector<std::string>{});
    p.recombine = j.value("recombine", std::vector<RecombineEntry>{});
}

void to_json(nlohmann::json& j, const GameArtifact& a) {
    j = nlohmann::json{{"html", a.html}, {"title", a.title}, {"byte_length", a.byte_length}};
}

void from_json(const nlohmann::json& j, GameArtifact& a) {
    a.html = j.value("html", "");
    a.title = j.value("title", "");
    a.byte_length = j.value("byte_length", a.html.size());
}

void to_json(nlohmann::json& j, const EvaluationReport& e) {
    j = nlohmann::json{{"creativity_10", e.creativity_10},
                       {"playability_10", e.playability_10},
                       {"overall_10", e.overall_10},
                       {"realized_mechanics", e.realized_mechanics},
                       {"realization_flags", e.realization_flags},
                       {"structural_change_score", e.structural_change_score},
                       {"novelty_grounding_notes", e.novelty_grounding_notes}};
    j["meaningful_play_asserted"] =
        e.meaningful_play_asserted ? nlohmann::json(*e.meaningful_play_asserted)
                                   : nlohmann::json(nullptr);
    j["learnability_asserted"] = e.learnability_asserted
                                     ? nlohmann::json(*e.learnability_asserted)
                                     : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EvaluationReport& e) {
    e.creativity_10 = j.value("creativity_10", 0.0);
    e.playability_10 = j.value("playability_10", 0.0);
    e.overall_10 = j.value("overall_10", 0.0);
    e.realized_mechanics = j.value("realized_mechanics", std::vector<MechanicDescriptor>{});
    e.realization_flags = j.value("realization_flags", std::map<std::string, bool>{});
    e.structural_change_score = j.value("structural_change_score", 0.0);
    e.novelty_grounding_notes = j.value("novelty_grounding_notes", "");
    if (j.contains("meaningful_play_asserted") && j["meaningful_play_asserted"].is_boolean()) {
        e.meaningful_play_asserted = j["meaningful_play_asserted"].get<bool>();
    }
    if (j.contains("learnability_asserted") && j["learnability_asserted"].is_boolean()) {
        e.learnability_asserted = j["learnability_asserted"].get<bool>();
    }
}

} // namespace gamesmith::core
