#pragma once

#include <stdexcept>
#include <string>

namespace gamesmith {

enum class ErrorCode {
    provider_exhausted,
    driver_unavailable,
    store_unwritable,
    unknown_parent,
    lock_not_held,
    missing_mechanic_set,
    evaluation_unparseable,
    format_failed,
    reward_out_of_range,
    empty_lineage,
    pipeline_failed,
    config_invalid,
    not_found,
};

// Domain error carrying a stable code so callers can branch without
// string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::provider_exhausted: return "provider_exhausted";
    case ErrorCode::driver_unavailable: return "driver_unavailable";
    case ErrorCode::store_unwritable: return "store_unwritable";
    case ErrorCode::unknown_parent: return "unknown_parent";
    case ErrorCode::lock_not_held: return "lock_not_held";
    case ErrorCode::missing_mechanic_set: return "missing_mechanic_set";
    case ErrorCode::evaluation_unparseable: return "evaluation_unparseable";
    case ErrorCode::format_failed: return "format_failed";
    case ErrorCode::reward_out_of_range: return "reward_out_of_range";
    case ErrorCode::empty_lineage: return "empty_lineage";
    case ErrorCode::pipeline_failed: return "pipeline_failed";
    case ErrorCode::config_invalid: return "config_invalid";
    case ErrorCode::not_found: return "not_found";
    }
    return "unknown";
}

} // namespace gamesmith
