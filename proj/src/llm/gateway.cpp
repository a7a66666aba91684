#include "gamesmith/llm/gateway.hpp"

#include "gamesmith/common/errors.hpp"

#include <chrono>
#include <random>
#include <thread>

namespace gamesmith::llm {

Gateway::Gateway(std::shared_ptr<Provider> primary, std::shared_ptr<Provider> fallback,
                 RetryPolicy policy, RoleOverrides overrides)
    : primary_(std::move(primary)), fallback_(std::move(fallback)), policy_(policy),
      overrides_(std::move(overrides)) {
    if (!primary_) {
        throw Error(ErrorCode::config_invalid, "gateway needs a primary provider");
    }
    if (primary_->deterministic()) {
        policy_.jitter = false;
    }
}

core::RoleProfile Gateway::role_profile(core::Role role) const {
    auto it = overrides_.find(role);
    if (it != overrides_.end()) {
        return it->second;
    }
    return core::default_role_profile(role);
}

CompletionResult Gateway::complete(core::Role role, const std::string& system_text,
                                   const std::string& user_text) {
    const core::RoleProfile profile = role_profile(role);
    CompletionRequest request;
    request.role = role;
    request.system_text = system_text;
    request.user_text = user_text;
    request.temperature = profile.temperature;
    request.token_budget = profile.token_budget;
    return complete(request);
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
    CompletionResult result;
    result.attempts = 0;
    std::string last_error = "no attempt made";

    auto backoff = [&](std::size_t attempt_index) {
        if (policy_.backoff_base_ms == 0) {
            return;
        }
        std::uint64_t delay = policy_.backoff_base_ms << attempt_index;
        if (policy_.jitter) {
            static thread_local std::mt19937_64 rng{std::random_device{}()};
            std::uniform_int_distribution<std::uint64_t> dist(0, delay / 4);
            delay += dist(rng);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    };

    auto run_provider = [&](const std::shared_ptr<Provider>& provider, bool is_fallback) -> bool {
        for (std::size_t attempt = 0; attempt <= policy_.max_retries; ++attempt) {
            if (attempt > 0) {
                total_retries_.fetch_add(1);
                backoff(attempt - 1);
            }
            ++result.attempts;
            total_calls_.fetch_add(1);
            try {
                std::string text = provider->complete(request);
                if (text.empty() && policy_.treat_empty_as_failure) {
                    last_error = "empty output from " + provider->id();
                    continue;
                }
                result.text = std::move(text);
                result.used_fallback = is_fallback;
                result.provider_id = provider->id();
                return true;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        return false;
    };

    if (run_provider(primary_, false)) {
        return result;
    }
    if (fallback_) {
        fallback_uses_.fetch_add(1);
        if (run_provider(fallback_, true)) {
            return result;
        }
    }
    throw Error(ErrorCode::provider_exhausted,
                "all providers exhausted after " + std::to_string(result.attempts) +
                    " attempts; last error: " + last_error);
}

} // namespace gamesmith::llm
