#include "gamesmith/memory/memory.hpp"

#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"

#include <algorithm>
#include <cmath>

namespace gamesmith::memory {

std::set<std::string> MemoryItem::tokens() const {
    return tokenize(intent + " " + representation);
}

MemoryItem update_value(const MemoryItem& item, double r, double alpha) {
    if (!(std::fabs(r) <= 1.0)) {
        throw Error(ErrorCode::reward_out_of_range,
                    "return must lie in [-1,1], got " + std::to_string(r));
    }
    MemoryItem updated = item;
    updated.value = (1.0 - alpha) * item.value + alpha * r;
    updated.visits = item.visits + 1;
    return updated;
}

double reward_to_return(double final_reward) {
    const double r = 2.0 * final_reward - 1.0;
    if (r < -1.0) return -1.0;
    if (r > 1.0) return 1.0;
    return r;
}

std::vector<MemoryItem> retrieve(const std::vector<MemoryItem>& store,
                                 const std::set<std::string>& query, std::size_t k,
                                 double beta) {
    struct Scored {
        double score;
        const MemoryItem* item;
    };
    std::vector<Scored> scored;
    scored.reserve(store.size());
    for (const auto& item : store) {
        const double similarity = jaccard(query, item.tokens());
        const double score = beta * similarity + (1.0 - beta) * (item.value + 1.0) / 2.0;
        scored.push_back({score, &item});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item->id < b.item->id;
    });
    std::vector<MemoryItem> out;
    out.reserve(std::min(k, scored.size()));
    for (const auto& entry : scored) {
        if (out.size() >= k) {
            break;
        }
        out.push_back(*entry.item);
    }
    return out;
}

void to_json(nlohmann::json& j, const MemoryItem& m) {
    j = nlohmann::json{{"id", m.id},
                       {"intent", m.intent},
                       {"representation", m.representation},
                       {"value", m.value},
                       {"visits", m.visits}};
}

void from_json(const nlohmann::json& j, MemoryItem& m) {
    m.id = j.value("id", "");
    m.intent = j.value("intent", "");
    m.representation = j.value("representation", "");
    m.value = j.value("value", 0.0);
    m.visits = j.value("visits", std::size_t{0});
}

} // namespace gamesmith::memory
