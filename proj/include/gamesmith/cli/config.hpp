#pragma once

#include "gamesmith/browser/webdriver.hpp"
#include "gamesmith/llm/gateway.hpp"
#include "gamesmith/pipeline/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace gamesmith::cli {

// Everything the CLI needs to assemble a pipeline. Sources, in order of
// precedence: command-line flags, environment variables, the JSON config
// file, documented defaults. Unknown config keys are errors.
struct CliConfig {
    std::filesystem::path store_root = "./store";
    std::uint64_t seed = 0;

    std::string provider_url;
    std::string provider_model;
    std::string fallback_url;
    std::string fallback_model;
    std::string api_key_env = "GAMESMITH_API_KEY";
    std::string mock_script;

    llm::RetryPolicy retry;
    browser::BrowserConfig browser;
    pipeline::PipelineConfig pipeline;
    llm::RoleOverrides roles;
};

// Loads the file named by `config_path` (or $GAMESMITH_CONFIG when unset),
// then applies environment overrides: GAMESMITH_STORE_ROOT,
// GAMESMITH_MOCK_SCRIPT, GAMESMITH_PROVIDER_URL, GAMESMITH_PROVIDER_MODEL,
// GAMESMITH_BROWSER_ENDPOINT. Throws Error(config_invalid) on unknown
// keys or an unreadable explicit path.
CliConfig load_config(const std::optional<std::string>& config_path);

// Parses the JSON text alone (no environment); exposed for tests.
CliConfig parse_config_json(const std::string& json_text);

} // namespace gamesmith::cli
