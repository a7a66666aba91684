#pragma once

#include "gamesmith/browser/runtime_result.hpp"
#include "gamesmith/core/artifact.hpp"

#include <cstdint>
#include <string>

namespace gamesmith::browser {

struct BrowserConfig {
    std::string endpoint; // webdriver base URL, e.g. http://127.0.0.1:9515
    std::uint64_t timeout_ms = 8000;
    bool enabled = false;
};

// Loads the game in a browser session driven over the WebDriver wire
// protocol: serves the document from a temp file, hooks page errors via
// an injected probe, waits for the canvas to paint (two pixel samples
// 250 ms apart), dispatches a fixed input script (space, arrows, one
// click at canvas center), and reads back the probe state.
//
// Throws Error(driver_unavailable) when the endpoint is unreachable or
// session creation fails; callers degrade to Tier-1. A page that never
// paints within the timeout yields playable=false rather than an error.
RuntimeResult run_browser_check(const core::GameArtifact& artifact,
                                const std::string& driver_endpoint,
                                std::uint64_t timeout_ms);

} // namespace gamesmith::browser
