#pragma once

#include "gamesmith/core/mechanics.hpp"
#include "gamesmith/memory/memory.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesmith::memory {

struct MechanicArchiveEntry {
    core::MechanicDescriptor mechanic;
    std::size_t usage_count = 1;
    double mean_reward = 0.0;
    bool forbidden = false;
};

struct MechanicArchive {
    std::vector<MechanicArchiveEntry> entries;

    // Highest token-Jaccard similarity between `mechanic` and any stored
    // entry; 0 for an empty archive.
    double max_similarity(const core::MechanicDescriptor& mechanic) const;
};

// Planner-facing view of the archive for one prompt.
struct ArchiveQueryResult {
    std::vector<MechanicArchiveEntry> relevant;      // top-k by similarity
    std::vector<MechanicArchiveEntry> underexplored; // relevant with usage <= P25
    std::vector<MechanicArchiveEntry> overused;      // usage >= P90 of all counts
    std::vector<MechanicArchiveEntry> forbidden;     // flagged entries
};

// Percentile thresholds use the nearest-rank method over the sorted
// usage counts: value at index ceil(p/100 * n) - 1.
std::size_t usage_percentile(const std::vector<std::size_t>& sorted_counts, double percentile);

ArchiveQueryResult archive_query(const MechanicArchive& archive,
                                 const std::set<std::string>& prompt_tokens,
                                 const MemoryConfig& cfg);

// No-op below the write-back threshold. Realized mechanics matching an
// existing entry at similarity >= 0.9 bump its usage count and fold the
// reward into the running mean; novel mechanics insert fresh entries.
MechanicArchive archive_write_back(MechanicArchive archive,
                                   const std::vector<core::MechanicDescriptor>& realized,
                                   double final_reward, const MemoryConfig& cfg);

// Hand-written starter entries covering common canvas-game mechanics.
MechanicArchive seed_archive();

void to_json(nlohmann::json& j, const MechanicArchiveEntry& e);
void from_json(const nlohmann::json& j, MechanicArchiveEntry& e);
void to_json(nlohmann::json& j, const MechanicArchive& a);
void from_json(const nlohmann::json& j, MechanicArchive& a);

} // namespace gamesmith::memory
