#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesmith::memory {

// One learned experience unit: what was intended, how it was expressed,
// and an exponentially averaged value estimate in [-1,1].
struct MemoryItem {
    std::string id;
    std::string intent;
    std::string representation;
    double value = 0.0;
    std::size_t visits = 0;

    std::set<std::string> tokens() const;
};

struct MemoryConfig {
    double alpha = 0.3;
    double beta_similarity = 0.5;
    std::size_t top_k = 5;
    double write_back_threshold = 0.5;
};

// q' = (1-alpha)*q + alpha*r, visits incremented. Throws
// Error(reward_out_of_range) when |r| > 1.
MemoryItem update_value(const MemoryItem& item, double r, double alpha);

// Maps a final reward (range [-0.25, 0.90]) onto the return scale:
// r = clamp(2*reward - 1, -1, 1). Reward 0.5 is neutral.
double reward_to_return(double final_reward);

// score = beta*jaccard(query, tokens) + (1-beta)*(value+1)/2, descending;
// ties break by ascending id; at most k items.
std::vector<MemoryItem> retrieve(const std::vector<MemoryItem>& store,
                                 const std::set<std::string>& query, std::size_t k,
                                 double beta);

void to_json(nlohmann::json& j, const MemoryItem& m);
void from_json(const nlohmann::json& j, MemoryItem& m);

} // namespace gamesmith::memory
