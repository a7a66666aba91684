#include "gamesmith/analysis/scripts.hpp"

#include <cctype>

namespace gamesmith::analysis {

namespace {

bool ci_match(const std::string& text, std::size_t pos, const char* token) {
    for (std::size_t i = 0; token[i] != '\0'; ++i) {
        if (pos + i >= text.size()) {
            return false;
        }
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != token[i]) {
            return false;
        }
    }
    return true;
}

// Finds "<script" followed by a delimiter, starting at `from`.
std::size_t find_open_tag(const std::string& html, std::size_t from) {
    for (std::size_t pos = from; pos + 7 <= html.size(); ++pos) {
        if (html[pos] != '<') {
            continue;
        }
        if (!ci_match(html, pos + 1, "script")) {
            continue;
        }
        const std::size_t after = pos + 7;
        if (after >= html.size()) {
            return std::string::npos;
        }
        const char c = html[after];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/') {
            return pos;
        }
    }
    return std::string::npos;
}

struct TagScan {
    std::size_t end = std::string::npos; // offset just past '>'
    bool self_closing = false;
    std::string src;
};

TagScan scan_tag(const std::string& html, std::size_t tag_begin) {
    TagScan out;
    std::size_t pos = tag_begin + 7;
    char quote = '\0';
    std::size_t attr_name_begin = std::string::npos;
    std::string pending_attr;
    bool last_was_slash = false;

    auto finish_attr_name = [&](std::size_t end_pos) {
        if (attr_name_begin != std::string::npos) {
            pending_attr.clear();
            for (std::size_t i = attr_name_begin; i < end_pos; ++i) {
                pending_attr.push_back(
                    static_cast<char>(std::tolower(static_cast<unsigned char>(html[i]))));
            }
            attr_name_begin = std::string::npos;
        }
    };

    while (pos < html.size()) {
        const char c = html[pos];
        if (quote != '\0') {
            if (c == quote) {
                quote = '\0';
            }
            ++pos;
            continue;
        }
        if (c == '"' || c == '\'') {
            // Value start: attribute name was collected at '='.
            quote = c;
            const std::size_t value_begin = pos + 1;
            std::size_t value_end = value_begin;
            while (value_end < html.size() && html[value_end] != c) {
                ++value_end;
            }
            if (pending_attr == "src") {
                out.src = html.substr(value_begin, value_end - value_begin);
            }
            pos = value_end < html.size() ? value_end + 1 : value_end;
            quote = '\0';
            last_was_slash = false;
            continue;
        }
        if (c == '>') {
            finish_attr_name(pos);
            out.end = pos + 1;
            out.self_closing = last_was_slash;
            return out;
        }
        if (c == '=') {
            finish_attr_name(pos);
            last_was_slash = false;
            ++pos;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            finish_attr_name(pos);
            last_was_slash = false;
            ++pos;
            continue;
        }
        if (c == '/') {
            finish_attr_name(pos);
            last_was_slash = true;
            ++pos;
            continue;
        }
        if (attr_name_begin == std::string::npos) {
            attr_name_begin = pos;
        }
        last_was_slash = false;
        ++pos;
    }
    return out;
}

std::size_t find_close_tag(const std::string& html, std::size_t from) {
    for (std::size_t pos = from; pos + 9 <= html.size(); ++pos) {
        if (html[pos] == '<' && html[pos + 1] == '/' && ci_match(html, pos + 2, "script")) {
            return pos;
        }
    }
    return std::string::npos;
}

} // namespace

std::vector<std::string> ScriptExtraction::bodies() const {
    std::vector<std::string> out;
    out.reserve(scripts.size());
    for (const auto& script : scripts) {
        out.push_back(script.body);
    }
    return out;
}

ScriptExtraction extract_scripts(const std::string& html) {
    ScriptExtraction result;
    std::size_t cursor = 0;
    while (cursor < html.size()) {
        const std::size_t tag_begin = find_open_tag(html, cursor);
        if (tag_begin == std::string::npos) {
            break;
        }
        const TagScan tag = scan_tag(html, tag_begin);
        if (tag.end == std::string::npos) {
            break; // unterminated tag; nothing more to extract
        }
        ScriptExtraction::Script script;
        script.body_begin = tag.end;
        script.body_end = tag.end;
        if (tag.self_closing) {
            cursor = tag.end;
        } else {
            const std::size_t close = find_close_tag(html, tag.end);
            const std::size_t body_end = close == std::string::npos ? html.size() : close;
            if (tag.src.empty()) {
                script.body = html.substr(tag.end, body_end - tag.end);
            }
            script.body_end = body_end;
            cursor = close == std::string::npos ? html.size() : close + 9;
        }
        if (!tag.src.empty()) {
            result.external_refs.push_back(tag.src);
            script.body.clear();
        }
        result.scripts.push_back(std::move(script));
    }
    return result;
}

} // namespace gamesmith::analysis
