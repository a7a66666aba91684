#include "gamesmith/llm/provider.hpp"

#include "gamesmith/common/errors.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace gamesmith::llm {

std::shared_ptr<MockProvider> MockProvider::from_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::config_invalid, "mock script not readable: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_script_json(buffer.str());
}

std::shared_ptr<MockProvider> MockProvider::from_script_json(const std::string& json_text) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_invalid, std::string("mock script is not valid JSON: ") + e.what());
    }
    auto provider = std::make_shared<MockProvider>();
    const nlohmann::json* entries = &parsed;
    if (parsed.is_object()) {
        if (parsed.contains("fault_rate")) {
            provider->set_fault_rate(parsed.value("fault_rate", 0.0),
                                     parsed.value("seed", std::uint64_t{0}));
        }
        if (!parsed.contains("script")) {
            throw Error(ErrorCode::config_invalid, "mock script object needs a \"script\" array");
        }
        entries = &parsed["script"];
    }
    if (!entries->is_array()) {
        throw Error(ErrorCode::config_invalid, "mock script must be an array of entries");
    }
    for (const auto& entry : *entries) {
        const std::string role_text = entry.value("role", "");
        const auto role = core::role_from_name(role_text);
        if (!role) {
            throw Error(ErrorCode::config_invalid, "mock script entry with unknown role: " + role_text);
        }
        if (entry.value("failure", false)) {
            provider->enqueue_failure(*role);
        } else {
            provider->enqueue(*role, entry.value("response", ""));
        }
    }
    return provider;
}

void MockProvider::enqueue(core::Role role, std::string response) {
    queues_[role].push_back({false, std::move(response)});
}

void MockProvider::enqueue_failure(core::Role role) {
    queues_[role].push_back({true, ""});
}

void MockProvider::set_fault_rate(double rate, std::uint64_t seed) {
    fault_rate_ = rate;
    fault_rng_.seed(seed);
}

std::string MockProvider::complete(const CompletionRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    requests_.push_back(request);
    if (fault_rate_ > 0.0) {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        if (dist(fault_rng_) < fault_rate_) {
            return ""; // injected empty output
        }
    }
    auto it = queues_.find(request.role);
    Entry entry;
    if (it != queues_.end() && !it->second.empty()) {
        entry = it->second.front();
        it->second.pop_front();
        last_entry_[request.role] = entry;
    } else {
        auto last = last_entry_.find(request.role);
        if (last == last_entry_.end()) {
            throw std::runtime_error("mock script has no entry for role " +
                                     std::string(core::role_name(request.role)));
        }
        entry = last->second;
    }
    if (entry.failure) {
        throw std::runtime_error("scripted transport failure for role " +
                                 std::string(core::role_name(request.role)));
    }
    return entry.response;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) {
        throw Error(ErrorCode::config_invalid, "http provider needs a url");
    }
}

std::string HttpProvider::id() const {
    return "http:" + config_.url;
}

namespace {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::config_invalid, "provider url must include a scheme: " + url);
    }
    const std::size_t path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

} // namespace

std::string HttpProvider::complete(const CompletionRequest& request) {
    const ParsedUrl url = split_url(config_.url);
    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));

    nlohmann::json body = {
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", request.system_text}},
          {{"role", "user"}, {"content", request.user_text}}}},
        {"temperature", request.temperature},
        {"max_tokens", request.token_budget},
    };
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto response = client.Post(url.path, headers, body.dump(), "application/json");
    if (!response) {
        throw std::runtime_error("transport error contacting " + config_.url + ": " +
                                 httplib::to_string(response.error()));
    }
    if (response->status < 200 || response->status >= 300) {
        throw std::runtime_error("provider returned HTTP " + std::to_string(response->status));
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(response->body);
    } catch (const nlohmann::json::exception&) {
        throw std::runtime_error("provider returned non-JSON body");
    }
    if (!parsed.contains("choices") || parsed["choices"].empty()) {
        return "";
    }
    const auto& message = parsed["choices"][0];
    if (message.contains("message")) {
        return message["message"].value("content", "");
    }
    return message.value("text", "");
}

} // namespace gamesmith::llm
