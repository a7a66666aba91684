#pragma once

#include "gamesmith/llm/provider.hpp"

#include <atomic>
#include <map>
#include <memory>

namespace gamesmith::llm {

// Per-role temperature/token-budget overrides applied on top of the
// default role table.
using RoleOverrides = std::map<core::Role, core::RoleProfile>;

// Uniform completion front door for all nine roles: applies the role
// profile, retries with exponential backoff, and falls back to a second
// provider once the primary's retry budget is spent. Shareable across
// concurrent runs; the only cross-call state is atomic counters.
class Gateway {
public:
    Gateway(std::shared_ptr<Provider> primary, std::shared_ptr<Provider> fallback,
            RetryPolicy policy, RoleOverrides overrides = {});

    // Active profile for a role (defaults unless overridden).
    core::RoleProfile role_profile(core::Role role) const;

    // Builds the request for `role` and runs the retry/fallback loop.
    // Throws Error(provider_exhausted) when every attempt on every
    // provider failed.
    CompletionResult complete(core::Role role, const std::string& system_text,
                              const std::string& user_text);

    CompletionResult complete(const CompletionRequest& request);

    const RetryPolicy& policy() const { return policy_; }

    std::uint64_t total_calls() const { return total_calls_.load(); }
    std::uint64_t total_retries() const { return total_retries_.load(); }
    std::uint64_t fallback_uses() const { return fallback_uses_.load(); }

private:
    std::shared_ptr<Provider> primary_;
    std::shared_ptr<Provider> fallback_;
    RetryPolicy policy_;
    RoleOverrides overrides_;
    std::atomic<std::uint64_t> total_calls_{0};
    std::atomic<std::uint64_t> total_retries_{0};
    std::atomic<std::uint64_t> fallback_uses_{0};
};

} // namespace gamesmith::llm
