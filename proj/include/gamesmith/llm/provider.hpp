#pragma once

#include "gamesmith/core/artifact.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gamesmith::llm {

struct CompletionRequest {
    core::Role role = core::Role::planning;
    std::string system_text;
    std::string user_text;
    double temperature = 0.7;
    std::size_t token_budget = 0;
};

struct CompletionResult {
    std::string text;
    std::size_t attempts = 1;
    bool used_fallback = false;
    std::string provider_id;
};

struct RetryPolicy {
    std::size_t max_retries = 3;
    std::uint64_t backoff_base_ms = 500;
    bool treat_empty_as_failure = true;
    bool jitter = true; // disabled automatically for scripted providers
};

// One completion backend. Transport failures are reported by throwing
// std::runtime_error; an empty text is a soft failure handled by the
// gateway's retry policy.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
    virtual bool deterministic() const { return false; }
};

// Scripted provider replaying a JSON script: an ordered list of
// {role, response | failure} entries. Entries are consumed per role in
// order; when a role's entries run out the last one repeats, which keeps
// multi-iteration runs easy to script. An optional fault rate injects
// empty outputs (seeded, deterministic).
class MockProvider final : public Provider {
public:
    struct Entry {
        bool failure = false;
        std::string response;
    };

    MockProvider() = default;

    static std::shared_ptr<MockProvider> from_script_file(const std::string& path);
    static std::shared_ptr<MockProvider> from_script_json(const std::string& json_text);

    void enqueue(core::Role role, std::string response);
    void enqueue_failure(core::Role role);
    void set_fault_rate(double rate, std::uint64_t seed);

    std::string complete(const CompletionRequest& request) override;
    std::string id() const override { return "mock"; }
    bool deterministic() const override { return true; }

    // Every request seen, in order; used by tests to inspect the wire.
    const std::vector<CompletionRequest>& requests() const { return requests_; }
    std::size_t call_count() const { return requests_.size(); }

private:
    std::map<core::Role, std::deque<Entry>> queues_;
    std::map<core::Role, Entry> last_entry_;
    std::vector<CompletionRequest> requests_;
    double fault_rate_ = 0.0;
    std::mt19937_64 fault_rng_{0};
    std::mutex mutex_;
};

struct HttpProviderConfig {
    std::string url;   // full chat-completions endpoint
    std::string model;
    std::string api_key; // sent as a bearer token when non-empty
    std::uint64_t timeout_ms = 60000;
};

// Chat-completion-style HTTP backend: posts model/messages/temperature/
// max_tokens and returns the first choice's message content.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);

    std::string complete(const CompletionRequest& request) override;
    std::string id() const override;

private:
    HttpProviderConfig config_;
};

} // namespace gamesmith::llm
