#pragma once

#include "gamesmith/analysis/analyzer.hpp"
#include "gamesmith/core/artifact.hpp"
#include "gamesmith/core/mechanics.hpp"
#include "gamesmith/memory/archive.hpp"
#include "gamesmith/memory/memory.hpp"
#include "gamesmith/reward/reward.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesmith::store {

// One saved generation: the final state of a generate() call.
struct LineageNode {
    std::string node_id;
    std::optional<std::string> parent_id;
    std::string prompt;
    core::GameArtifact artifact;
    core::EvaluationReport evaluation;
    analysis::ValidationReport validation;
    reward::RewardBreakdown reward;
    core::MechanicPlan mechanic_plan;
    core::MechanicDelta mechanic_delta;
    std::string created_at;
    std::size_t iterations_used = 1;
};

struct LineageTree {
    struct NodeEdges {
        std::optional<std::string> parent_id;
        std::vector<std::string> child_ids;
    };
    std::string lineage_id;
    std::string prompt;
    std::optional<std::string> root_id;
    std::map<std::string, NodeEdges> nodes;

    std::size_t depth() const; // nodes on the longest root-to-leaf path
};

struct StoreStats {
    std::size_t lineage_count = 0;
    std::size_t node_count = 0;
    std::size_t multi_node_lineages = 0;
    std::size_t max_depth = 0;
    std::size_t archive_entries = 0;
};

// Advisory per-lineage writer lock (flock on lineage.lock). Held for the
// duration of a generation; released on destruction.
class LineageLock {
public:
    LineageLock(const std::filesystem::path& lineage_dir, std::string lineage_id);
    ~LineageLock();
    LineageLock(LineageLock&& other) noexcept;
    LineageLock& operator=(LineageLock&& other) noexcept;
    LineageLock(const LineageLock&) = delete;
    LineageLock& operator=(const LineageLock&) = delete;

    const std::string& lineage_id() const { return lineage_id_; }
    bool held() const { return fd_ >= 0; }

private:
    int fd_ = -1;
    std::string lineage_id_;
};

// Durable lineage trees on disk:
//   lineages/<id>/{tree.json, nodes/node_<id>.json, trace/node_<id>.json,
//   memory.json}, plus the global mechanic_archive.json,
//   creativity_rules.json and game_pool.json at the store root.
// Files are pretty-printed UTF-8 JSON; tree updates go through a
// write-temp-then-rename step so an interrupted save never corrupts the
// previous tree.
class LineageStore {
public:
    explicit LineageStore(std::filesystem::path root, std::uint64_t seed = 0);

    const std::filesystem::path& root() const { return root_; }

    // Creates the store layout and the global files; the archive is
    // seeded with the built-in entries when absent.
    void init();

    std::string create_lineage(const std::string& prompt);
    bool lineage_exists(const std::string& lineage_id) const;
    std::vector<std::string> list_lineages() const;

    LineageLock lock_lineage(const std::string& lineage_id) const;

    // Assigns node.node_id/created_at is caller's, writes node + trace,
    // then appends the tree edge atomically. Requires the lineage lock.
    std::string save_node(const LineageLock& lock, LineageNode node,
                          const nlohmann::json& trace);

    LineageTree load_tree(const std::string& lineage_id) const;
    LineageNode load_node(const std::string& lineage_id, const std::string& node_id) const;
    nlohmann::json load_trace(const std::string& lineage_id, const std::string& node_id) const;

    // Best-effort dump of a failed run's partial trace for post-mortem.
    void save_partial_trace(const std::string& lineage_id, const nlohmann::json& trace) const;

    std::vector<memory::MemoryItem> load_memory(const std::string& lineage_id) const;
    void save_memory(const LineageLock& lock, const std::vector<memory::MemoryItem>& items);

    memory::MechanicArchive load_archive() const;
    void save_archive(const memory::MechanicArchive& archive);

    std::vector<std::string> load_creativity_rules() const;
    std::vector<std::string> load_game_pool() const;

    StoreStats stats() const;

    std::filesystem::path lineage_dir(const std::string& lineage_id) const;

private:
    std::filesystem::path root_;
    std::uint64_t seed_ = 0;
};

void to_json(nlohmann::json& j, const LineageNode& n);
void from_json(const nlohmann::json& j, LineageNode& n);
void to_json(nlohmann::json& j, const LineageTree& t);
void from_json(const nlohmann::json& j, LineageTree& t);
void to_json(nlohmann::json& j, const StoreStats& s);

// Shared helper: pretty-printed JSON written via temp file + rename.
void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& value);

} // namespace gamesmith::store
