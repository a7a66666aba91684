#include "gamesmith/core/mechanics.hpp"

#include "gamesmith/common/text.hpp"

#include <algorithm>
#include <cctype>

namespace gamesmith::core {

const char* layer_name(StructureLayer layer) {
    switch (layer) {
    case StructureLayer::players: return "players";
    case StructureLayer::state: return "state";
    case StructureLayer::actions: return "actions";
    case StructureLayer::transition: return "transition";
    case StructureLayer::observation: return "observation";
    case StructureLayer::feedback: return "feedback";
    case StructureLayer::resources: return "resources";
    case StructureLayer::outcomes: return "outcomes";
    case StructureLayer::preferences: return "preferences";
    case StructureLayer::challenge: return "challenge";
    case StructureLayer::content: return "content";
    case StructureLayer::representation: return "representation";
    case StructureLayer::meta: return "meta";
    }
    return "unknown";
}

std::optional<StructureLayer> layer_from_name(const std::string& name) {
    const std::string lowered = to_lower(trim(name));
    for (StructureLayer layer : kAllLayers) {
        if (lowered == layer_name(layer)) {
            return layer;
        }
    }
    return std::nullopt;
}

bool is_core_layer(StructureLayer layer) {
    return static_cast<std::size_t>(layer) < kCoreLayerCount;
}

bool is_mechanic_delta_layer(StructureLayer layer) {
    switch (layer) {
    case StructureLayer::actions:
    case StructureLayer::transition:
    case StructureLayer::observation:
    case StructureLayer::feedback:
    case StructureLayer::resources:
    case StructureLayer::outcomes:
        return true;
    default:
        return false;
    }
}

ChangeKind classify_change(const std::set<StructureLayer>& delta_layers) {
    for (StructureLayer layer : delta_layers) {
        if (is_core_layer(layer)) {
            return ChangeKind::structural;
        }
    }
    return ChangeKind::cosmetic;
}

std::set<std::string> MechanicDescriptor::tokens() const {
    return tokenize(name + " " + description);
}

std::string mechanic_id_from_name(const std::string& name) {
    std::string slug;
    for (unsigned char c : name) {
        if (std::isalnum(c)) {
            slug.push_back(static_cast<char>(std::tolower(c)));
        } else if (!slug.empty() && slug.back() != '-') {
            slug.push_back('-');
        }
    }
    while (!slug.empty() && slug.back() == '-') {
        slug.pop_back();
    }
    return slug.empty() ? "mechanic" : slug;
}

double mechanic_similarity(const MechanicDescriptor& a, const MechanicDescriptor& b) {
    return jaccard(a.tokens(), b.tokens());
}

namespace {

struct Candidate {
    double similarity;
    std::size_t parent_index;
    std::size_t child_index;
};

} // namespace

MechanicDelta compute_mechanic_delta(const std::vector<MechanicDescriptor>& parent,
                                     const std::vector<MechanicDescriptor>& child,
                                     double match_threshold) {
    // Tokenize each descriptor once; similarity is pairwise Jaccard.
    std::vector<std::set<std::string>> parent_tokens;
    parent_tokens.reserve(parent.size());
    for (const auto& m : parent) {
        parent_tokens.push_back(m.tokens());
    }
    std::vector<std::set<std::string>> child_tokens;
    child_tokens.reserve(child.size());
    for (const auto& m : child) {
        child_tokens.push_back(m.tokens());
    }

    std::vector<Candidate> candidates;
    candidates.reserve(parent.size() * child.size());
    for (std::size_t p = 0; p < parent.size(); ++p) {
        for (std::size_t c = 0; c < child.size(); ++c) {
            const double sim = jaccard(parent_tokens[p], child_tokens[c]);
            if (sim >= match_threshold) {
                candidates.push_back({sim, p, c});
            }
        }
    }
    // Highest similarity first; index order breaks ties deterministically.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        if (a.parent_index != b.parent_index) return a.parent_index < b.parent_index;
        return a.child_index < b.child_index;
    });

    std::vector<bool> parent_used(parent.size(), false);
    std::vector<bool> child_used(child.size(), false);
    MechanicDelta delta;
    for (const Candidate& cand : candidates) {
        if (parent_used[cand.parent_index] || child_used[cand.child_index]) {
            continue;
        }
        parent_used[cand.parent_index] = true;
        child_used[cand.child_index] = true;
        MechanicPair pair{parent[cand.parent_index], child[cand.child_index]};
        if (cand.similarity >= kPreserveSimilarity) {
            delta.preserved.push_back(std::move(pair));
        } else {
            delta.modified.push_back(std::move(pair));
        }
    }
    for (std::size_t p = 0; p < parent.size(); ++p) {
        if (!parent_used[p]) {
            delta.removed.push_back(parent[p]);
        }
    }
    for (std::size_t c = 0; c < child.size(); ++c) {
        if (!child_used[c]) {
            delta.added.push_back(child[c]);
        }
    }

    const double numerator = static_cast<double>(delta.added.size()) +
                             static_cast<double>(delta.removed.size()) +
                             0.5 * static_cast<double>(delta.modified.size());
    const double denominator =
        std::max<std::size_t>(1, parent.size() + delta.added.size());
    delta.structural_change = clamp01(numerator / denominator);
    return delta;
}

std::vector<std::string> MechanicPlan::planned_names() const {
    std::vector<std::string> names;
    std::set<std::string> seen;
    auto push = [&](const std::string& name) {
        const std::string key = to_lower(trim(name));
        if (!key.empty() && seen.insert(key).second) {
            names.push_back(trim(name));
        }
    };
    for (const auto& name : preserve) push(name);
    for (const auto& descriptor : add) push(descriptor.name);
    return names;
}

} // namespace gamesmith::core
