#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gamesmith::analysis {

// Inline script elements of a document, in document order. Elements with
// a src attribute contribute an empty body and a recorded external
// reference (generated games are single-file by contract, so references
// are noted, never fetched).
struct ScriptExtraction {
    struct Script {
        std::string body;
        std::size_t body_begin = 0; // document offset of the body text
        std::size_t body_end = 0;
    };
    std::vector<Script> scripts;
    std::vector<std::string> external_refs;

    std::vector<std::string> bodies() const;
};

// Best-effort, case-insensitive tag scan; malformed markup degrades to
// scanning for the next closing tag rather than failing.
ScriptExtraction extract_scripts(const std::string& html);

} // namespace gamesmith::analysis
