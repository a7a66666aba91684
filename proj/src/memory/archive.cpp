#include "gamesmith/memory/archive.hpp"

#include "gamesmith/common/text.hpp"
#include "gamesmith/core/json.hpp"

#include <algorithm>
#include <cmath>

namespace gamesmith::memory {

double MechanicArchive::max_similarity(const core::MechanicDescriptor& mechanic) const {
    double best = 0.0;
    for (const auto& entry : entries) {
        best = std::max(best, core::mechanic_similarity(mechanic, entry.mechanic));
    }
    return best;
}

std::size_t usage_percentile(const std::vector<std::size_t>& sorted_counts, double percentile) {
    if (sorted_counts.empty()) {
        return 0;
    }
    const double rank = std::ceil(percentile / 100.0 * static_cast<double>(sorted_counts.size()));
    const std::size_t index =
        rank <= 1.0 ? 0 : std::min(sorted_counts.size() - 1, static_cast<std::size_t>(rank) - 1);
    return sorted_counts[index];
}

ArchiveQueryResult archive_query(const MechanicArchive& archive,
                                 const std::set<std::string>& prompt_tokens,
                                 const MemoryConfig& cfg) {
    ArchiveQueryResult result;
    if (archive.entries.empty()) {
        return result;
    }

    struct Scored {
        double similarity;
        const MechanicArchiveEntry* entry;
    };
    std::vector<Scored> scored;
    scored.reserve(archive.entries.size());
    for (const auto& entry : archive.entries) {
        scored.push_back({jaccard(prompt_tokens, entry.mechanic.tokens()), &entry});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.entry->mechanic.id < b.entry->mechanic.id;
    });

    std::vector<std::size_t> counts;
    counts.reserve(archive.entries.size());
    for (const auto& entry : archive.entries) {
        counts.push_back(entry.usage_count);
    }
    std::sort(counts.begin(), counts.end());
    const std::size_t p25 = usage_percentile(counts, 25.0);
    const std::size_t p90 = usage_percentile(counts, 90.0);

    for (std::size_t i = 0; i < scored.size() && i < cfg.top_k; ++i) {
        result.relevant.push_back(*scored[i].entry);
        if (scored[i].entry->usage_count <= p25) {
            result.underexplored.push_back(*scored[i].entry);
        }
    }
    for (const auto& entry : archive.entries) {
        if (entry.usage_count >= p90) {
            result.overused.push_back(entry);
        }
        if (entry.forbidden) {
            result.forbidden.push_back(entry);
        }
    }
    return result;
}

MechanicArchive archive_write_back(MechanicArchive archive,
                                   const std::vector<core::MechanicDescriptor>& realized,
                                   double final_reward, const MemoryConfig& cfg) {
    if (final_reward < cfg.write_back_threshold) {
        return archive;
    }
    for (const auto& mechanic : realized) {
        double best = -1.0;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < archive.entries.size(); ++i) {
            const double sim = core::mechanic_similarity(mechanic, archive.entries[i].mechanic);
            if (sim > best) {
                best = sim;
                best_index = i;
            }
        }
        if (best >= core::kPreserveSimilarity) {
            MechanicArchiveEntry& entry = archive.entries[best_index];
            entry.usage_count += 1;
            entry.mean_reward +=
                (final_reward - entry.mean_reward) / static_cast<double>(entry.usage_count);
        } else {
            MechanicArchiveEntry entry;
            entry.mechanic = mechanic;
            if (entry.mechanic.id.empty()) {
                entry.mechanic.id = core::mechanic_id_from_name(entry.mechanic.name);
            }
            entry.usage_count = 1;
            entry.mean_reward = final_reward;
            archive.entries.push_back(std::move(entry));
        }
    }
    return archive;
}

namespace {

MechanicArchiveEntry seed_entry(const char* name, const char* description,
                                std::initializer_list<core::StructureLayer> layers,
                                double existence, double importance, double showcase,
                                std::size_t usage, double mean_reward, bool forbidden = false) {
    MechanicArchiveEntry entry;
    entry.mechanic.id = core::mechanic_id_from_name(name);
    entry.mechanic.name = name;
    entry.mechanic.description = description;
    entry.mechanic.delta_layers = layers;
    entry.mechanic.existence = existence;
    entry.mechanic.importance = importance;
    entry.mechanic.showcase = showcase;
    entry.usage_count = usage;
    entry.mean_reward = mean_reward;
    entry.forbidden = forbidden;
    return entry;
}

} // namespace

MechanicArchive seed_archive() {
    using L = core::StructureLayer;
    MechanicArchive archive;
    archive.entries = {
        seed_entry("double jump", "a second mid-air jump refreshed on landing",
                   {L::actions, L::transition}, 0.9, 0.7, 0.8, 24, 0.52),
        seed_entry("dash", "short burst of speed with a cooldown", {L::actions, L::resources},
                   0.9, 0.7, 0.8, 31, 0.49),
        seed_entry("wall jump", "rebound off vertical surfaces to gain height",
                   {L::actions, L::transition}, 0.9, 0.7, 0.7, 18, 0.55),
        seed_entry("gravity flip", "invert the pull of gravity on demand",
                   {L::transition, L::actions}, 0.9, 0.8, 0.9, 12, 0.61),
        seed_entry("shield", "temporary invulnerability consuming a meter",
                   {L::resources, L::feedback}, 0.8, 0.6, 0.6, 15, 0.47),
        seed_entry("combo multiplier", "chained hits scale the score reward",
                   {L::feedback, L::outcomes}, 0.8, 0.5, 0.7, 22, 0.45),
        seed_entry("teleport", "instant relocation to a marked anchor",
                   {L::actions, L::transition}, 0.8, 0.6, 0.8, 9, 0.58),
        seed_entry("time slow", "bullet-time window that dilates the simulation",
                   {L::transition, L::challenge}, 0.8, 0.7, 0.9, 7, 0.63),
        seed_entry("magnet pickup", "nearby collectibles drift toward the player",
                   {L::transition, L::resources}, 0.8, 0.4, 0.5, 19, 0.42),
        seed_entry("checkpoint", "progress markers that respawn the player",
                   {L::outcomes, L::transition}, 0.9, 0.5, 0.4, 28, 0.40),
        seed_entry("shrink grow", "player size changes what paths are passable",
                   {L::transition, L::observation}, 0.8, 0.7, 0.8, 6, 0.60),
        seed_entry("projectile charge", "hold to charge a stronger shot",
                   {L::actions, L::resources}, 0.8, 0.6, 0.7, 16, 0.48),
        seed_entry("orbiting guard", "satellites circle the player and block hits",
                   {L::transition, L::feedback}, 0.7, 0.5, 0.7, 5, 0.57),
        seed_entry("fog of war", "only a radius around the player is visible",
                   {L::observation, L::challenge}, 0.8, 0.7, 0.8, 8, 0.54),
        seed_entry("resource forge", "convert one collectible currency into another",
                   {L::resources, L::outcomes}, 0.8, 0.6, 0.5, 4, 0.51),
        seed_entry("lane switch", "movement snaps between discrete lanes",
                   {L::actions, L::observation}, 0.9, 0.6, 0.6, 21, 0.44),
        seed_entry("bounce pad", "surfaces that launch the player upward",
                   {L::transition, L::feedback}, 0.9, 0.4, 0.6, 26, 0.41),
        seed_entry("ghost replay", "a recording of the previous run re-plays alongside",
                   {L::observation, L::challenge, L::transition}, 0.7, 0.7, 0.9, 3, 0.66),
        seed_entry("rhythm gate", "obstacles open and close on a musical beat",
                   {L::transition, L::observation}, 0.7, 0.6, 0.8, 5, 0.59),
        seed_entry("portal pair", "linked doorways teleport anything that enters",
                   {L::transition, L::actions}, 0.8, 0.7, 0.8, 10, 0.56),
        seed_entry("wind zones", "regions that push entities along a vector field",
                   {L::transition, L::challenge}, 0.8, 0.5, 0.6, 11, 0.50),
        seed_entry("day night cycle", "rules alternate between two world phases",
                   {L::transition, L::observation, L::challenge}, 0.7, 0.6, 0.7, 6, 0.53),
        seed_entry("screen wrap", "exiting one edge re-enters from the opposite edge",
                   {L::transition}, 0.9, 0.4, 0.5, 23, 0.39),
        seed_entry("instant death spikes", "touching any hazard ends the run immediately",
                   {L::outcomes}, 0.9, 0.3, 0.3, 34, 0.21, true),
        seed_entry("blinding flash", "fills the screen with white on every hit",
                   {L::feedback}, 0.8, 0.2, 0.2, 13, 0.12, true),
    };
    return archive;
}

void to_json(nlohmann::json& j, const MechanicArchiveEntry& e) {
    nlohmann::json flags = nlohmann::json::array();
    if (e.forbidden) {
        flags.push_back("forbidden");
    }
    j = nlohmann::json{{"mechanic", e.mechanic},
                       {"usage_count", e.usage_count},
                       {"mean_reward", e.mean_reward},
                       {"flags", flags}};
}

void from_json(const nlohmann::json& j, MechanicArchiveEntry& e) {
    e.mechanic = j.at("mechanic").get<core::MechanicDescriptor>();
    e.usage_count = j.value("usage_count", std::size_t{1});
    e.mean_reward = j.value("mean_reward", 0.0);
    e.forbidden = false;
    for (const auto& flag : j.value("flags", nlohmann::json::array())) {
        if (flag.is_string() && flag.get<std::string>() == "forbidden") {
            e.forbidden = true;
        }
    }
}

void to_json(nlohmann::json& j, const MechanicArchive& a) {
    j = nlohmann::json{{"entries", a.entries}};
}

void from_json(const nlohmann::json& j, MechanicArchive& a) {
    a.entries = j.value("entries", std::vector<MechanicArchiveEntry>{});
}

} // namespace gamesmith::memory
