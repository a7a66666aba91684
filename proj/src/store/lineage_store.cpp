#include "gamesmith/store/lineage_store.hpp"

#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"
#include "gamesmith/core/json.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace gamesmith::store {

namespace {

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::not_found, path.string() + " is not valid JSON: " + e.what());
    }
}

} // namespace

void atomic_write_json(const fs::path& path, const nlohmann::json& value) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw Error(ErrorCode::store_unwritable, "cannot write " + tmp.string());
        }
        out << value.dump(2) << '\n';
        if (!out) {
            throw Error(ErrorCode::store_unwritable, "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::store_unwritable,
                    "cannot rename " + tmp.string() + ": " + ec.message());
    }
}

std::size_t LineageTree::depth() const {
    if (!root_id) {
        return 0;
    }
    std::size_t best = 0;
    // Iterative DFS; trees are invariant-checked acyclic but guard anyway.
    std::vector<std::pair<std::string, std::size_t>> stack{{*root_id, 1}};
    std::size_t visited = 0;
    while (!stack.empty() && visited <= nodes.size() + 1) {
        auto [id, d] = stack.back();
        stack.pop_back();
        ++visited;
        best = std::max(best, d);
        auto it = nodes.find(id);
        if (it == nodes.end()) {
            continue;
        }
        for (const auto& child : it->second.child_ids) {
            stack.emplace_back(child, d + 1);
        }
    }
    return best;
}

LineageLock::LineageLock(const fs::path& lineage_dir, std::string lineage_id)
    : lineage_id_(std::move(lineage_id)) {
    const fs::path lock_path = lineage_dir / "lineage.lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) {
        throw Error(ErrorCode::store_unwritable, "cannot open " + lock_path.string());
    }
    if (::flock(fd_, LOCK_EX) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Error(ErrorCode::store_unwritable, "cannot lock " + lock_path.string());
    }
}

LineageLock::~LineageLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

LineageLock::LineageLock(LineageLock&& other) noexcept
    : fd_(other.fd_), lineage_id_(std::move(other.lineage_id_)) {
    other.fd_ = -1;
}

LineageLock& LineageLock::operator=(LineageLock&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
        fd_ = other.fd_;
        lineage_id_ = std::move(other.lineage_id_);
        other.fd_ = -1;
    }
    return *this;
}

LineageStore::LineageStore(fs::path root, std::uint64_t seed)
    : root_(std::move(root)), seed_(seed) {}

void LineageStore::init() {
    std::error_code ec;
    fs::create_directories(root_ / "lineages", ec);
    if (ec || !fs::exists(root_ / "lineages")) {
        throw Error(ErrorCode::store_unwritable, "cannot create store at " + root_.string());
    }
    if (!fs::exists(root_ / "mechanic_archive.json")) {
        atomic_write_json(root_ / "mechanic_archive.json", memory::seed_archive());
    }
    if (!fs::exists(root_ / "creativity_rules.json")) {
        atomic_write_json(root_ / "creativity_rules.json",
                          nlohmann::json{{"rules",
                                          {"prefer one deep mechanic over three shallow ones",
                                           "make the new rule legible within ten seconds of play",
                                           "reuse an existing input instead of adding a new key",
                                           "tie visual feedback to the rule that caused it"}}});
    }
    if (!fs::exists(root_ / "game_pool.json")) {
        atomic_write_json(root_ / "game_pool.json", nlohmann::json{{"games", nlohmann::json::array()}});
    }
}

fs::path LineageStore::lineage_dir(const std::string& lineage_id) const {
    return root_ / "lineages" / lineage_id;
}

std::string LineageStore::create_lineage(const std::string& prompt) {
    init();
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(root_ / "lineages")) {
        if (entry.is_directory()) {
            ++count;
        }
    }
    const std::size_t index = count + 1;
    char label[16];
    std::snprintf(label, sizeof(label), "lin%04zu", index);
    const std::string suffix =
        digest(std::to_string(seed_) + ":lineage:" + std::to_string(index)).substr(0, 4);
    const std::string lineage_id = std::string(label) + "_" + suffix;

    const fs::path dir = lineage_dir(lineage_id);
    std::error_code ec;
    fs::create_directories(dir / "nodes", ec);
    fs::create_directories(dir / "trace", ec);
    if (ec || !fs::exists(dir / "nodes") || !fs::exists(dir / "trace")) {
        throw Error(ErrorCode::store_unwritable, "cannot create lineage at " + dir.string());
    }
    LineageTree tree;
    tree.lineage_id = lineage_id;
    tree.prompt = prompt;
    atomic_write_json(dir / "tree.json", tree);
    atomic_write_json(dir / "memory.json", nlohmann::json{{"items", nlohmann::json::array()}});
    return lineage_id;
}

bool LineageStore::lineage_exists(const std::string& lineage_id) const {
    return fs::exists(lineage_dir(lineage_id) / "tree.json");
}

std::vector<std::string> LineageStore::list_lineages() const {
    std::vector<std::string> out;
    const fs::path dir = root_ / "lineages";
    if (!fs::exists(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "tree.json")) {
            out.push_back(entry.path().filename().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

LineageLock LineageStore::lock_lineage(const std::string& lineage_id) const {
    if (!lineage_exists(lineage_id)) {
        throw Error(ErrorCode::not_found, "unknown lineage " + lineage_id);
    }
    return LineageLock(lineage_dir(lineage_id), lineage_id);
}

std::string LineageStore::save_node(const LineageLock& lock, LineageNode node,
                                    const nlohmann::json& trace) {
    if (!lock.held()) {
        throw Error(ErrorCode::lock_not_held, "lineage lock is not held");
    }
    const std::string& lineage_id = lock.lineage_id();
    const fs::path dir = lineage_dir(lineage_id);
    LineageTree tree = load_tree(lineage_id);

    if (node.parent_id) {
        if (!tree.nodes.count(*node.parent_id)) {
            throw Error(ErrorCode::unknown_parent,
                        "parent node " + *node.parent_id + " not in lineage " + lineage_id);
        }
    } else if (tree.root_id) {
        // A second parentless node would fork the root; attach refused.
        throw Error(ErrorCode::unknown_parent,
                    "lineage " + lineage_id + " already has a root node");
    }

    const std::size_t index = tree.nodes.size() + 1;
    const std::string suffix =
        digest(std::to_string(seed_) + ":" + lineage_id + ":node:" + std::to_string(index))
            .substr(0, 4);
    node.node_id = "v" + std::to_string(index) + "_" + suffix;

    atomic_write_json(dir / "nodes" / ("node_" + node.node_id + ".json"), node);
    atomic_write_json(dir / "trace" / ("node_" + node.node_id + ".json"), trace);

    LineageTree::NodeEdges edges;
    edges.parent_id = node.parent_id;
    tree.nodes[node.node_id] = edges;
    if (node.parent_id) {
        tree.nodes[*node.parent_id].child_ids.push_back(node.node_id);
    } else {
        tree.root_id = node.node_id;
    }
    atomic_write_json(dir / "tree.json", tree);
    return node.node_id;
}

LineageTree LineageStore::load_tree(const std::string& lineage_id) const {
    return read_json_file(lineage_dir(lineage_id) / "tree.json").get<LineageTree>();
}

LineageNode LineageStore::load_node(const std::string& lineage_id,
                                    const std::string& node_id) const {
    return read_json_file(lineage_dir(lineage_id) / "nodes" / ("node_" + node_id + ".json"))
        .get<LineageNode>();
}

nlohmann::json LineageStore::load_trace(const std::string& lineage_id,
                                        const std::string& node_id) const {
    return read_json_file(lineage_dir(lineage_id) / "trace" / ("node_" + node_id + ".json"));
}

void LineageStore::save_partial_trace(const std::string& lineage_id,
                                      const nlohmann::json& trace) const {
    if (!lineage_exists(lineage_id)) {
        return;
    }
    const fs::path dir = lineage_dir(lineage_id) / "trace";
    std::size_t index = 0;
    fs::path path;
    do {
        path = dir / ("partial_" + std::to_string(++index) + ".json");
    } while (fs::exists(path));
    try {
        atomic_write_json(path, trace);
    } catch (const Error&) {
        // post-mortem data only; never mask the original failure
    }
}

std::vector<memory::MemoryItem> LineageStore::load_memory(const std::string& lineage_id) const {
    const nlohmann::json doc = read_json_file(lineage_dir(lineage_id) / "memory.json");
    return doc.value("items", std::vector<memory::MemoryItem>{});
}

void LineageStore::save_memory(const LineageLock& lock,
                               const std::vector<memory::MemoryItem>& items) {
    if (!lock.held()) {
        throw Error(ErrorCode::lock_not_held, "lineage lock is not held");
    }
    atomic_write_json(lineage_dir(lock.lineage_id()) / "memory.json",
                      nlohmann::json{{"items", items}});
}

memory::MechanicArchive LineageStore::load_archive() const {
    const fs::path path = root_ / "mechanic_archive.json";
    if (!fs::exists(path)) {
        return {};
    }
    return read_json_file(path).get<memory::MechanicArchive>();
}

void LineageStore::save_archive(const memory::MechanicArchive& archive) {
    atomic_write_json(root_ / "mechanic_archive.json", archive);
}

namespace {

std::vector<std::string> load_string_list(const fs::path& path, const char* key) {
    if (!fs::exists(path)) {
        return {};
    }
    const nlohmann::json doc = read_json_file(path);
    std::vector<std::string> out;
    for (const auto& item : doc.value(key, nlohmann::json::array())) {
        if (item.is_string()) {
            out.push_back(item.get<std::string>());
        }
    }
    return out;
}

} // namespace

std::vector<std::string> LineageStore::load_creativity_rules() const {
    return load_string_list(root_ / "creativity_rules.json", "rules");
}

std::vector<std::string> LineageStore::load_game_pool() const {
    return load_string_list(root_ / "game_pool.json", "games");
}

StoreStats LineageStore::stats() const {
    StoreStats stats;
    for (const auto& lineage_id : list_lineages()) {
        const LineageTree tree = load_tree(lineage_id);
        ++stats.lineage_count;
        stats.node_count += tree.nodes.size();
        if (tree.nodes.size() > 1) {
            ++stats.multi_node_lineages;
        }
        stats.max_depth = std::max(stats.max_depth, tree.depth());
    }
    const fs::path archive_path = root_ / "mechanic_archive.json";
    if (fs::exists(archive_path)) {
        stats.archive_entries = load_archive().entries.size();
    }
    return stats;
}

void to_json(nlohmann::json& j, const LineageNode& n) {
    j = nlohmann::json{{"node_id", n.node_id},
                       {"prompt", n.prompt},
                       {"artifact", n.artifact},
                       {"evaluation", n.evaluation},
                       {"validation", n.validation},
                       {"reward", n.reward},
                       {"mechanic_plan", n.mechanic_plan},
                       {"mechanic_delta", n.mechanic_delta},
                       {"created_at", n.created_at},
                       {"iterations_used", n.iterations_used}};
    j["parent_id"] = n.parent_id ? nlohmann::json(*n.parent_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, LineageNode& n) {
    n.node_id = j.value("node_id", "");
    if (j.contains("parent_id") && j["parent_id"].is_string()) {
        n.parent_id = j["parent_id"].get<std::string>();
    } else {
        n.parent_id.reset();
    }
    n.prompt = j.value("prompt", "");
    n.artifact = j.value("artifact", core::GameArtifact{});
    n.evaluation = j.value("evaluation", core::EvaluationReport{});
    n.validation = j.value("validation", analysis::ValidationReport{});
    n.reward = j.value("reward", reward::RewardBreakdown{});
    n.mechanic_plan = j.value("mechanic_plan", core::MechanicPlan{});
    n.mechanic_delta = j.value("mechanic_delta", core::MechanicDelta{});
    n.created_at = j.value("created_at", "");
    n.iterations_used = j.value("iterations_used", std::size_t{1});
}

void to_json(nlohmann::json& j, const LineageTree& t) {
    nlohmann::json nodes = nlohmann::json::object();
    for (const auto& [id, edges] : t.nodes) {
        nlohmann::json e;
        e["parent_id"] = edges.parent_id ? nlohmann::json(*edges.parent_id) : nlohmann::json(nullptr);
        e["child_ids"] = edges.child_ids;
        nodes[id] = e;
    }
    j = nlohmann::json{{"lineage_id", t.lineage_id}, {"prompt", t.prompt}, {"nodes", nodes}};
    j["root_id"] = t.root_id ? nlohmann::json(*t.root_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, LineageTree& t) {
    t.lineage_id = j.value("lineage_id", "");
    t.prompt = j.value("prompt", "");
    t.root_id.reset();
    if (j.contains("root_id") && j["root_id"].is_string()) {
        t.root_id = j["root_id"].get<std::string>();
    }
    t.nodes.clear();
    if (j.contains("nodes") && j["nodes"].is_object()) {
        for (const auto& [id, edges] : j["nodes"].items()) {
            LineageTree::NodeEdges e;
            if (edges.contains("parent_id") && edges["parent_id"].is_string()) {
                e.parent_id = edges["parent_id"].get<std::string>();
            }
            e.child_ids = edges.value("child_ids", std::vector<std::string>{});
            t.nodes[id] = std::move(e);
        }
    }
}

void to_json(nlohmann::json& j, const StoreStats& s) {
    j = nlohmann::json{{"lineage_count", s.lineage_count},
                       {"node_count", s.node_count},
                       {"multi_node_lineages", s.multi_node_lineages},
                       {"max_depth", s.max_depth},
                       {"archive_entries", s.archive_entries}};
}

} // namespace gamesmith::store
