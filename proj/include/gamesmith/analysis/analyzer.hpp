#pragma once

#include "gamesmith/browser/runtime_result.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamesmith::analysis {

// The 9 Tier-1 checks, in report order.
enum class CheckId {
    brace_balance,
    paren_bracket_balance,
    loop_invoked,
    loop_recursive,
    canvas_context,
    input_listener,
    init_on_load,
    render_call,
    state_update,
};

inline constexpr std::size_t kCheckCount = 9;

const char* check_id_name(CheckId id);

enum class Severity { error, warning, pass };

const char* severity_name(Severity severity);

// Severity a check carries when it fails. Delimiter balance, loop
// invocation, canvas acquisition, and input listening are errors; the
// remaining checks degrade quality rather than break the game and are
// warnings.
Severity failure_severity(CheckId id);

struct SourceLocation {
    std::size_t line = 1;   // 1-based
    std::size_t column = 1; // 1-based
};

struct CheckOutcome {
    CheckId check_id = CheckId::brace_balance;
    Severity severity = Severity::pass;
    std::string message;
    std::optional<SourceLocation> location;
};

inline constexpr double kErrorDeduction = 0.20;
inline constexpr double kWarningDeduction = 0.05;

struct ValidationReport {
    std::vector<CheckOutcome> outcomes; // exactly 9, in CheckId order
    std::size_t error_count = 0;
    std::size_t warning_count = 0;
    double score = 1.0; // clamp(1 - 0.20*errors - 0.05*warnings, 0, 1)
    std::optional<browser::RuntimeResult> runtime;

    const CheckOutcome& outcome(CheckId id) const;
    bool check_passed(CheckId id) const;
};

// Runs all 9 checks over the inline scripts plus the document and scores
// the result. Pure text analysis; always returns a report.
ValidationReport analyze(const std::string& html);

void to_json(nlohmann::json& j, const CheckOutcome& o);
void from_json(const nlohmann::json& j, CheckOutcome& o);
void to_json(nlohmann::json& j, const ValidationReport& r);
void from_json(const nlohmann::json& j, ValidationReport& r);

} // namespace gamesmith::analysis
