#include "gamesmith/pipeline/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gamesmith::pipeline {

namespace {

const char* kPlanningTemplate = R"(Design brief:
{PROMPT}

Parent game code (empty for a fresh lineage):
{PARENT_CODE}

Lineage memory and global guidance:
{MEMORY_CONTEXT}

Mechanic archive context:
{ARCHIVE_CONTEXT}

Plan the mechanic set for the next version of this single-file HTML5 canvas
game. Think about which mechanics to keep, which to add (prefer underexplored
archive entries over overused ones, never forbidden ones), which to drop, and
which to recombine. Then emit exactly one fenced block of this shape:

```
CURRENT_MECHANIC_SET
PRESERVE: name; name
ADD: name | one-line description | layers (comma separated from: actions,
transition, observation, feedback, resources, outcomes)
REMOVE: name
RECOMBINE: name + name | one-line description
```
)";

const char* kSkeletonTemplate = R"({MECHANIC_CONTRACT}

Design brief:
{PROMPT}

Write the playable skeleton of a single-file HTML5 canvas game as one
complete document: canvas setup, a requestAnimationFrame game loop that
re-schedules itself, keyboard input listeners, initialization on load, and a
minimal render of the core play loop. Keep every mechanic hook from the
contract visible as a named function even if its body is simple. Output the
full document in a single fenced code block.)";

const char* kFeatureTemplate = R"({MECHANIC_CONTRACT}

Current game document:
{PARENT_CODE}

Implement every ADD and RECOMBINE mechanic from the contract inside this
game. Wire each mechanic into update and render paths so it is observable in
play, and keep PRESERVE mechanics working. Output the full updated document
in a single fenced code block.)";

const char* kVisualTemplate = R"({MECHANIC_CONTRACT}

Current game document:
{PARENT_CODE}

Improve the presentation: color, motion feedback, particles, HUD readability.
Do not change the rule structure or remove mechanics. Output the full updated
document in a single fenced code block.)";

const char* kRefinementTemplate = R"({MECHANIC_CONTRACT}

Design brief:
{PROMPT}

Current game document:
{PARENT_CODE}

Refine this game toward the mechanic contract: deepen mechanics that feel
shallow, repair anything the previous pass broke, and sharpen feedback when a
mechanic fires. Output the full updated document in a single fenced code
block.)";

const char* kRepairTemplate = R"({MECHANIC_CONTRACT}

Broken game document:
{PARENT_CODE}

Static analysis found these problems:
{ERRORS}

Fix the listed problems with the smallest change that keeps the game's
mechanics intact. Output the full corrected document in a single fenced code
block.)";

const char* kEvaluationTemplate = R"({MECHANIC_CONTRACT}

Game document:
{PARENT_CODE}

Evaluate this game against the mechanic contract. Answer with one JSON
object only, shaped exactly like:
{
  "creativity": 0-10,
  "playability": 0-10,
  "overall": 0-10,
  "realized_mechanics": [
    {"name": "...", "description": "...", "layers": ["actions"],
     "existence": 0-1, "importance": 0-1, "showcase": 0-1}
  ],
  "realization": {"mechanic name": true},
  "structural_change": 0-1,
  "meaningful_play": true,
  "learnability": true,
  "novelty_notes": "one line on what is genuinely new"
}
)";

const char* kReflectionTemplate = R"(Design brief:
{PROMPT}

{MECHANIC_CONTRACT}

Iteration outcome:
{ERRORS}

Decide whether another refinement pass would meaningfully improve this game.
Reply with:
VERDICT: CONTINUE or STOP
MEMORY: intent | what worked or failed (one line per lesson, optional)
)";

const char* kFormattingTemplate = R"(Final game document:
{PARENT_CODE}

Return the finished single-file document exactly, as one fenced code block
containing the complete HTML, with no commentary.)";

const char* built_in_template(core::Role role) {
    switch (role) {
    case core::Role::planning: return kPlanningTemplate;
    case core::Role::skeleton: return kSkeletonTemplate;
    case core::Role::feature: return kFeatureTemplate;
    case core::Role::visual: return kVisualTemplate;
    case core::Role::refinement: return kRefinementTemplate;
    case core::Role::repair: return kRepairTemplate;
    case core::Role::evaluation: return kEvaluationTemplate;
    case core::Role::reflection: return kReflectionTemplate;
    case core::Role::formatting: return kFormattingTemplate;
    }
    return "";
}

} // namespace

PromptLibrary PromptLibrary::built_in() {
    PromptLibrary lib;
    for (std::size_t i = 0; i < core::kRoleCount; ++i) {
        const auto role = static_cast<core::Role>(i);
        lib.templates_[role] = built_in_template(role);
    }
    return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::string& dir) {
    PromptLibrary lib = built_in();
    for (std::size_t i = 0; i < core::kRoleCount; ++i) {
        const auto role = static_cast<core::Role>(i);
        const std::filesystem::path path =
            std::filesystem::path(dir) / (std::string(core::role_name(role)) + ".txt");
        std::ifstream in(path);
        if (in) {
            std::stringstream buffer;
            buffer << in.rdbuf();
            lib.templates_[role] = buffer.str();
        }
    }
    return lib;
}

std::string PromptLibrary::render(core::Role role,
                                  const std::map<std::string, std::string>& vars) const {
    std::string text = user_template(role);
    static const char* keys[] = {kPlaceholderPrompt,        kPlaceholderParentCode,
                                 kPlaceholderMechanicContract, kPlaceholderMemoryContext,
                                 kPlaceholderArchiveContext, kPlaceholderErrors};
    for (const char* key : keys) {
        const std::string needle = std::string("{") + key + "}";
        std::string value;
        if (auto it = vars.find(key); it != vars.end()) {
            value = it->second;
        }
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            text.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return text;
}

const std::string& PromptLibrary::user_template(core::Role role) const {
    return templates_.at(role);
}

std::string PromptLibrary::system_text(core::Role role) const {
    switch (role) {
    case core::Role::planning:
        return "You plan explicit mechanic sets for single-file HTML5 canvas games.";
    case core::Role::skeleton:
    case core::Role::feature:
    case core::Role::visual:
    case core::Role::refinement:
    case core::Role::repair:
        return "You write complete single-file HTML5 canvas games. Always return the "
               "whole document in one fenced code block.";
    case core::Role::evaluation:
        return "You judge canvas games strictly and answer with a single JSON object.";
    case core::Role::reflection:
        return "You decide whether iterating further is worth it and distill lessons.";
    case core::Role::formatting:
        return "You emit final documents verbatim in one fenced code block.";
    }
    return "";
}

} // namespace gamesmith::pipeline
