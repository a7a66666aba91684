#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesmith::browser {

// Outcome of the optional Tier-2 execution check. `degraded` means no
// driver was reachable and the caller fell back to Tier-1 only; all other
// fields keep their defaults in that case.
struct RuntimeResult {
    bool playable = false;
    bool canvas_painted = false;
    std::vector<std::string> console_errors;
    std::uint64_t duration_ms = 0;
    bool degraded = false;
};

void to_json(nlohmann::json& j, const RuntimeResult& r);
void from_json(const nlohmann::json& j, RuntimeResult& r);

} // namespace gamesmith::browser
