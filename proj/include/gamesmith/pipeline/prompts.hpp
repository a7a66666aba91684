#pragma once

#include "gamesmith/core/artifact.hpp"

#include <map>
#include <string>

namespace gamesmith::pipeline {

// Named placeholders every template may use.
inline constexpr const char* kPlaceholderPrompt = "PROMPT";
inline constexpr const char* kPlaceholderParentCode = "PARENT_CODE";
inline constexpr const char* kPlaceholderMechanicContract = "MECHANIC_CONTRACT";
inline constexpr const char* kPlaceholderMemoryContext = "MEMORY_CONTEXT";
inline constexpr const char* kPlaceholderArchiveContext = "ARCHIVE_CONTEXT";
inline constexpr const char* kPlaceholderErrors = "ERRORS";

// Per-role prompt templates. Templates are data: a prompts/ directory
// holds one <role>.txt per role, and any missing file falls back to the
// built-in default so the engine runs without the directory.
class PromptLibrary {
public:
    static PromptLibrary built_in();
    static PromptLibrary from_directory(const std::string& dir);

    // Substitutes {PLACEHOLDER} occurrences; unknown keys are left alone.
    std::string render(core::Role role, const std::map<std::string, std::string>& vars) const;
    const std::string& user_template(core::Role role) const;
    std::string system_text(core::Role role) const;

private:
    std::map<core::Role, std::string> templates_;
};

} // namespace gamesmith::pipeline
