#include "gamesmith/browser/runtime_result.hpp"

namespace gamesmith::browser {

void to_json(nlohmann::json& j, const RuntimeResult& r) {
    j = nlohmann::json{{"playable", r.playable},
                       {"canvas_painted", r.canvas_painted},
                       {"console_errors", r.console_errors},
                       {"duration_ms", r.duration_ms},
                       {"degraded", r.degraded}};
}

void from_json(const nlohmann::json& j, RuntimeResult& r) {
    r.playable = j.value("playable", false);
    r.canvas_painted = j.value("canvas_painted", false);
    r.console_errors = j.value("console_errors", std::vector<std::string>{});
    r.duration_ms = j.value("duration_ms", std::uint64_t{0});
    r.degraded = j.value("degraded", false);
}

} // namespace gamesmith::browser
