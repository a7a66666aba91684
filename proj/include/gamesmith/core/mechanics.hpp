#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gamesmith::core {

// The 13 structural layers of a game: the first 10 are the rule-bearing
// core set, the last 3 the presentation-level support set.
enum class StructureLayer {
    players,
    state,
    actions,
    transition,
    observation,
    feedback,
    resources,
    outcomes,
    preferences,
    challenge,
    content,
    representation,
    meta,
};

inline constexpr std::array<StructureLayer, 13> kAllLayers = {
    StructureLayer::players,     StructureLayer::state,
    StructureLayer::actions,     StructureLayer::transition,
    StructureLayer::observation, StructureLayer::feedback,
    StructureLayer::resources,   StructureLayer::outcomes,
    StructureLayer::preferences, StructureLayer::challenge,
    StructureLayer::content,     StructureLayer::representation,
    StructureLayer::meta,
};

inline constexpr std::size_t kCoreLayerCount = 10;

const char* layer_name(StructureLayer layer);
std::optional<StructureLayer> layer_from_name(const std::string& name);
bool is_core_layer(StructureLayer layer);

// Layers a mechanic is allowed to tag as the ones it changes.
bool is_mechanic_delta_layer(StructureLayer layer);

enum class ChangeKind { structural, cosmetic };

// Structural iff the set touches any of the 10 core layers; a change
// confined to {content, representation, meta} (or empty) is cosmetic.
ChangeKind classify_change(const std::set<StructureLayer>& delta_layers);

// A named local rule structure with the layers it changes and the
// existence / importance / showcase scores, each in [0,1].
struct MechanicDescriptor {
    std::string id;
    std::string name;
    std::string description;
    std::set<StructureLayer> delta_layers;
    double existence = 0.0;
    double importance = 0.0;
    double showcase = 0.0;

    // Lowercase token set over name + description.
    std::set<std::string> tokens() const;
};

// Stable slug derived from a mechanic name, used as the descriptor id.
std::string mechanic_id_from_name(const std::string& name);

// Token-set Jaccard over name + description. Symmetric, in [0,1],
// 1.0 for identical token sets.
double mechanic_similarity(const MechanicDescriptor& a, const MechanicDescriptor& b);

using MechanicPair = std::pair<MechanicDescriptor, MechanicDescriptor>;

// Partition of a (parent, child) mechanic-set pair: every parent lands in
// exactly one of removed/modified/preserved, every child in exactly one of
// added/modified/preserved.
struct MechanicDelta {
    std::vector<MechanicDescriptor> added;
    std::vector<MechanicDescriptor> removed;
    std::vector<MechanicPair> modified;
    std::vector<MechanicPair> preserved;
    double structural_change = 0.0;
};

inline constexpr double kDefaultMatchThreshold = 0.6;
inline constexpr double kPreserveSimilarity = 0.9;

// Greedy maximum-similarity matching between parent and child mechanics.
// Pairs at or above match_threshold are kept: preserved when similarity
// >= 0.9, modified otherwise. Unmatched parents are removed, unmatched
// children added. structural_change =
// clamp((|added| + |removed| + 0.5*|modified|) / max(1, |parent| + |added|), 0, 1).
MechanicDelta compute_mechanic_delta(const std::vector<MechanicDescriptor>& parent,
                                     const std::vector<MechanicDescriptor>& child,
                                     double match_threshold = kDefaultMatchThreshold);

struct RecombineEntry {
    std::string first;
    std::string second;
    std::string description;
};

// Planner output: which mechanics to keep, add, drop, or fuse.
struct MechanicPlan {
    std::vector<std::string> preserve;
    std::vector<MechanicDescriptor> add;
    std::vector<std::string> remove;
    std::vector<RecombineEntry> recombine;

    bool empty() const {
        return preserve.empty() && add.empty() && remove.empty() && recombine.empty();
    }
    // Names counted as planned mechanics: preserve + add, first occurrence wins.
    std::vector<std::string> planned_names() const;
};

} // namespace gamesmith::core
