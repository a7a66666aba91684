#include "gamesmith/cli/config.hpp"

#include "gamesmith/common/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gamesmith::cli {

namespace {

void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* candidate : allowed) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw Error(ErrorCode::config_invalid,
                        "unknown config key \"" + key + "\" in " + where);
        }
    }
}

const char* env(const char* name) {
    return std::getenv(name);
}

} // namespace

CliConfig parse_config_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_invalid, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::config_invalid, "config root must be an object");
    }
    require_keys(doc, {"store", "provider", "retry", "browser", "pipeline", "memory", "roles"},
                 "config root");

    CliConfig cfg;
    if (doc.contains("store")) {
        const auto& store = doc["store"];
        require_keys(store, {"root", "seed"}, "store");
        cfg.store_root = store.value("root", cfg.store_root.string());
        cfg.seed = store.value("seed", cfg.seed);
    }
    if (doc.contains("provider")) {
        const auto& provider = doc["provider"];
        require_keys(provider,
                     {"url", "model", "fallback_url", "fallback_model", "api_key_env",
                      "mock_script"},
                     "provider");
        cfg.provider_url = provider.value("url", "");
        cfg.provider_model = provider.value("model", "");
        cfg.fallback_url = provider.value("fallback_url", "");
        cfg.fallback_model = provider.value("fallback_model", "");
        cfg.api_key_env = provider.value("api_key_env", cfg.api_key_env);
        cfg.mock_script = provider.value("mock_script", "");
    }
    if (doc.contains("retry")) {
        const auto& retry = doc["retry"];
        require_keys(retry, {"max_retries", "backoff_base_ms", "treat_empty_as_failure"}, "retry");
        cfg.retry.max_retries = retry.value("max_retries", cfg.retry.max_retries);
        cfg.retry.backoff_base_ms = retry.value("backoff_base_ms", cfg.retry.backoff_base_ms);
        cfg.retry.treat_empty_as_failure =
            retry.value("treat_empty_as_failure", cfg.retry.treat_empty_as_failure);
    }
    if (doc.contains("browser")) {
        const auto& browser = doc["browser"];
        require_keys(browser, {"endpoint", "timeout_ms", "enabled"}, "browser");
        cfg.browser.endpoint = browser.value("endpoint", cfg.browser.endpoint);
        cfg.browser.timeout_ms = browser.value("timeout_ms", cfg.browser.timeout_ms);
        cfg.browser.enabled = browser.value("enabled", cfg.browser.enabled);
    }
    if (doc.contains("pipeline")) {
        const auto& pipeline = doc["pipeline"];
        require_keys(pipeline,
                     {"max_iterations", "stop_reward", "retrieval_k", "prompts_dir",
                      "match_threshold"},
                     "pipeline");
        cfg.pipeline.max_iterations = pipeline.value("max_iterations", cfg.pipeline.max_iterations);
        cfg.pipeline.stop_reward = pipeline.value("stop_reward", cfg.pipeline.stop_reward);
        cfg.pipeline.retrieval_k = pipeline.value("retrieval_k", cfg.pipeline.retrieval_k);
        cfg.pipeline.prompts_dir = pipeline.value("prompts_dir", cfg.pipeline.prompts_dir);
        cfg.pipeline.match_threshold =
            pipeline.value("match_threshold", cfg.pipeline.match_threshold);
    }
    if (doc.contains("memory")) {
        const auto& memory = doc["memory"];
        require_keys(memory, {"alpha", "beta_similarity", "top_k", "write_back_threshold"},
                     "memory");
        cfg.pipeline.memory.alpha = memory.value("alpha", cfg.pipeline.memory.alpha);
        cfg.pipeline.memory.beta_similarity =
            memory.value("beta_similarity", cfg.pipeline.memory.beta_similarity);
        cfg.pipeline.memory.top_k = memory.value("top_k", cfg.pipeline.memory.top_k);
        cfg.pipeline.memory.write_back_threshold =
            memory.value("write_back_threshold", cfg.pipeline.memory.write_back_threshold);
    }
    if (doc.contains("roles")) {
        for (const auto& [name, profile] : doc["roles"].items()) {
            const auto role = core::role_from_name(name);
            if (!role) {
                throw Error(ErrorCode::config_invalid, "unknown role \"" + name + "\" in roles");
            }
            require_keys(profile, {"temperature", "token_budget"}, "roles." + name);
            core::RoleProfile defaults = core::default_role_profile(*role);
            defaults.temperature = profile.value("temperature", defaults.temperature);
            defaults.token_budget = profile.value("token_budget", defaults.token_budget);
            cfg.roles[*role] = defaults;
        }
    }
    return cfg;
}

CliConfig load_config(const std::optional<std::string>& config_path) {
    CliConfig cfg;
    std::optional<std::string> path = config_path;
    if (!path) {
        if (const char* from_env = env("GAMESMITH_CONFIG")) {
            path = std::string(from_env);
        }
    }
    if (path && !path->empty()) {
        std::ifstream in(*path);
        if (!in) {
            throw Error(ErrorCode::config_invalid, "config file not readable: " + *path);
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        cfg = parse_config_json(buffer.str());
    }

    if (const char* v = env("GAMESMITH_STORE_ROOT")) {
        cfg.store_root = v;
    }
    if (const char* v = env("GAMESMITH_MOCK_SCRIPT")) {
        cfg.mock_script = v;
    }
    if (const char* v = env("GAMESMITH_PROVIDER_URL")) {
        cfg.provider_url = v;
    }
    if (const char* v = env("GAMESMITH_PROVIDER_MODEL")) {
        cfg.provider_model = v;
    }
    if (const char* v = env("GAMESMITH_BROWSER_ENDPOINT")) {
        cfg.browser.endpoint = v;
    }
    return cfg;
}

} // namespace gamesmith::cli
