#include "gamesmith/analysis/analyzer.hpp"

#include "gamesmith/analysis/balance.hpp"
#include "gamesmith/analysis/scripts.hpp"
#include "gamesmith/common/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gamesmith::analysis {

const char* check_id_name(CheckId id) {
    switch (id) {
    case CheckId::brace_balance: return "brace_balance";
    case CheckId::paren_bracket_balance: return "paren_bracket_balance";
    case CheckId::loop_invoked: return "loop_invoked";
    case CheckId::loop_recursive: return "loop_recursive";
    case CheckId::canvas_context: return "canvas_context";
    case CheckId::input_listener: return "input_listener";
    case CheckId::init_on_load: return "init_on_load";
    case CheckId::render_call: return "render_call";
    case CheckId::state_update: return "state_update";
    }
    return "unknown";
}

const char* severity_name(Severity severity) {
    switch (severity) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::pass: return "pass";
    }
    return "unknown";
}

Severity failure_severity(CheckId id) {
    switch (id) {
    case CheckId::brace_balance:
    case CheckId::paren_bracket_balance:
    case CheckId::loop_invoked:
    case CheckId::canvas_context:
    case CheckId::input_listener:
        return Severity::error;
    default:
        return Severity::warning;
    }
}

const CheckOutcome& ValidationReport::outcome(CheckId id) const {
    return outcomes.at(static_cast<std::size_t>(id));
}

bool ValidationReport::check_passed(CheckId id) const {
    return outcome(id).severity == Severity::pass;
}

namespace {

// ---------------------------------------------------------------------
// Lexical code view: the script text with string and comment contents
// blanked to spaces (newlines kept), plus the original string literals.

struct StringSpan {
    std::size_t begin = 0; // offset of the opening quote
    std::size_t end = 0;   // offset one past the closing quote
    std::string content;   // text between the quotes
};

struct CodeView {
    std::string code;
    std::vector<StringSpan> strings;

    const StringSpan* string_starting_at(std::size_t pos) const {
        auto it = std::lower_bound(strings.begin(), strings.end(), pos,
                                   [](const StringSpan& s, std::size_t p) { return s.begin < p; });
        if (it != strings.end() && it->begin == pos) {
            return &*it;
        }
        return nullptr;
    }
};

CodeView strip_code(const std::string& script) {
    CodeView view;
    view.code.assign(script.size(), ' ');
    enum class Mode { code, single_quote, double_quote, template_quote, line_comment, block_comment };
    Mode mode = Mode::code;
    bool escape = false;
    std::size_t string_begin = 0;
    std::string content;

    auto close_string = [&](std::size_t end_exclusive) {
        view.strings.push_back({string_begin, end_exclusive, content});
        content.clear();
    };

    for (std::size_t i = 0; i < script.size(); ++i) {
        const char c = script[i];
        if (c == '\n') {
            view.code[i] = '\n';
        }
        switch (mode) {
        case Mode::code:
            if (c == '/' && i + 1 < script.size() && script[i + 1] == '/') {
                mode = Mode::line_comment;
                ++i;
                if (i < script.size() && script[i] == '\n') view.code[i] = '\n';
            } else if (c == '/' && i + 1 < script.size() && script[i + 1] == '*') {
                mode = Mode::block_comment;
                ++i;
            } else if (c == '"' || c == '\'' || c == '`') {
                mode = c == '"' ? Mode::double_quote
                                : (c == '\'' ? Mode::single_quote : Mode::template_quote);
                string_begin = i;
                escape = false;
            } else {
                view.code[i] = c;
            }
            break;
        case Mode::single_quote:
        case Mode::double_quote:
            if (escape) {
                escape = false;
                content.push_back(c);
            } else if (c == '\\') {
                escape = true;
            } else if (c == '\n') {
                close_string(i);
                mode = Mode::code;
            } else if ((mode == Mode::single_quote && c == '\'') ||
                       (mode == Mode::double_quote && c == '"')) {
                close_string(i + 1);
                mode = Mode::code;
            } else {
                content.push_back(c);
            }
            break;
        case Mode::template_quote:
            if (escape) {
                escape = false;
                content.push_back(c);
            } else if (c == '\\') {
                escape = true;
            } else if (c == '`') {
                close_string(i + 1);
                mode = Mode::code;
            } else {
                content.push_back(c);
            }
            break;
        case Mode::line_comment:
            if (c == '\n') {
                mode = Mode::code;
            }
            break;
        case Mode::block_comment:
            if (c == '*' && i + 1 < script.size() && script[i + 1] == '/') {
                mode = Mode::block_comment; // consume the '/'
                ++i;
                mode = Mode::code;
            }
            break;
        }
    }
    if (mode == Mode::single_quote || mode == Mode::double_quote || mode == Mode::template_quote) {
        close_string(script.size());
    }
    return view;
}

// ---------------------------------------------------------------------
// Identifier and extent scanning over the code view.

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::size_t skip_ws(const std::string& code, std::size_t pos) {
    while (pos < code.size() && std::isspace(static_cast<unsigned char>(code[pos]))) {
        ++pos;
    }
    return pos;
}

// Returns npos when nothing but whitespace precedes pos.
std::size_t prev_non_ws(const std::string& code, std::size_t pos) {
    while (pos > 0) {
        --pos;
        if (!std::isspace(static_cast<unsigned char>(code[pos]))) {
            return pos;
        }
    }
    return std::string::npos;
}

std::string read_ident_back(const std::string& code, std::size_t last, std::size_t* begin_out) {
    if (last == std::string::npos || !ident_char(code[last])) {
        return "";
    }
    std::size_t begin = last;
    while (begin > 0 && ident_char(code[begin - 1])) {
        --begin;
    }
    if (!ident_start(code[begin])) {
        return "";
    }
    if (begin_out) {
        *begin_out = begin;
    }
    return code.substr(begin, last - begin + 1);
}

// Matches a brace/paren span forward; returns npos when unbalanced.
std::size_t match_forward(const std::string& code, std::size_t open, char open_c, char close_c) {
    int depth = 0;
    for (std::size_t i = open; i < code.size(); ++i) {
        if (code[i] == open_c) {
            ++depth;
        } else if (code[i] == close_c) {
            --depth;
            if (depth == 0) {
                return i;
            }
        }
    }
    return std::string::npos;
}

std::size_t match_backward(const std::string& code, std::size_t close, char open_c, char close_c) {
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
        if (code[i] == close_c) {
            ++depth;
        } else if (code[i] == open_c) {
            --depth;
            if (depth == 0) {
                return i;
            }
        }
    }
    return std::string::npos;
}

struct FunctionExtent {
    std::string name;
    std::size_t body_begin = 0; // offset of '{'
    std::size_t body_end = 0;   // offset of matching '}'
};

struct CallSite {
    std::string callee;
    std::size_t pos = 0;        // identifier start
    bool dotted = false;
    std::size_t args_begin = 0; // one past '('
    std::size_t args_end = 0;   // offset of ')'
};

// A function name the host environment will invoke once the registration
// site executes (scheduler callbacks, event handlers, load hooks).
struct CallbackRef {
    std::string callee;
    std::size_t pos = 0;
};

struct OnAssignment {
    std::string event; // suffix after "on"
    std::size_t pos = 0;
    std::string handler; // identifier on the right-hand side, may be empty
};

// Backward scan from an anonymous `function` keyword or an arrow's
// parameter list for a `name =` or `name:` binding.
std::string infer_bound_name(const std::string& code, std::size_t before) {
    std::size_t p = prev_non_ws(code, before);
    if (p == std::string::npos) {
        return "";
    }
    // Optional `async` between binding and arrow parameters.
    if (ident_char(code[p])) {
        std::size_t begin = 0;
        const std::string word = read_ident_back(code, p, &begin);
        if (word == "async") {
            p = prev_non_ws(code, begin);
            if (p == std::string::npos) {
                return "";
            }
        } else {
            return "";
        }
    }
    if (code[p] == ':') {
        return read_ident_back(code, prev_non_ws(code, p), nullptr);
    }
    if (code[p] != '=') {
        return "";
    }
    const std::size_t before_eq = prev_non_ws(code, p);
    if (before_eq != std::string::npos &&
        (code[before_eq] == '=' || code[before_eq] == '!' || code[before_eq] == '<' ||
         code[before_eq] == '>')) {
        return "";
    }
    return read_ident_back(code, before_eq, nullptr);
}

std::vector<FunctionExtent> find_extents(const CodeView& view) {
    const std::string& code = view.code;
    std::vector<FunctionExtent> extents;

    // `function NAME(...) { ... }` declarations and bound function expressions.
    for (std::size_t i = 0; i + 8 <= code.size(); ++i) {
        if (code.compare(i, 8, "function") != 0) {
            continue;
        }
        if (i > 0 && ident_char(code[i - 1])) {
            continue;
        }
        if (i + 8 < code.size() && ident_char(code[i + 8])) {
            continue;
        }
        std::size_t p = skip_ws(code, i + 8);
        if (p < code.size() && code[p] == '*') {
            p = skip_ws(code, p + 1);
        }
        std::string name;
        if (p < code.size() && ident_start(code[p])) {
            std::size_t end = p;
            while (end < code.size() && ident_char(code[end])) {
                ++end;
            }
            name = code.substr(p, end - p);
            p = skip_ws(code, end);
        } else {
            name = infer_bound_name(code, i);
        }
        if (p >= code.size() || code[p] != '(') {
            continue;
        }
        const std::size_t params_end = match_forward(code, p, '(', ')');
        if (params_end == std::string::npos) {
            continue;
        }
        const std::size_t brace = skip_ws(code, params_end + 1);
        if (brace >= code.size() || code[brace] != '{') {
            continue;
        }
        const std::size_t body_end = match_forward(code, brace, '{', '}');
        if (body_end == std::string::npos || name.empty()) {
            continue;
        }
        extents.push_back({name, brace, body_end});
    }

    // Bound arrow functions with braced bodies: `NAME = (...) => { ... }`.
    for (std::size_t i = 0; i + 2 <= code.size(); ++i) {
        if (code[i] != '=' || code[i + 1] != '>') {
            continue;
        }
        const std::size_t brace = skip_ws(code, i + 2);
        if (brace >= code.size() || code[brace] != '{') {
            continue;
        }
        const std::size_t body_end = match_forward(code, brace, '{', '}');
        if (body_end == std::string::npos) {
            continue;
        }
        std::size_t before_params = prev_non_ws(code, i);
        if (before_params == std::string::npos) {
            continue;
        }
        std::size_t params_begin;
        if (code[before_params] == ')') {
            params_begin = match_backward(code, before_params, '(', ')');
            if (params_begin == std::string::npos) {
                continue;
            }
        } else if (ident_char(code[before_params])) {
            std::size_t ident_begin = 0;
            if (read_ident_back(code, before_params, &ident_begin).empty()) {
                continue;
            }
            params_begin = ident_begin;
        } else {
            continue;
        }
        const std::string name = infer_bound_name(code, params_begin);
        if (!name.empty()) {
            extents.push_back({name, brace, body_end});
        }
    }
    return extents;
}

const std::set<std::string>& call_keywords() {
    static const std::set<std::string> keywords = {
        "if",     "for",   "while", "switch", "catch",  "with",       "return",
        "function", "else", "do",   "typeof", "delete", "void",       "in",
        "of",     "new",   "case",  "throw",  "await",  "instanceof",
    };
    return keywords;
}

std::vector<CallSite> find_call_sites(const CodeView& view) {
    const std::string& code = view.code;
    std::vector<CallSite> sites;
    std::size_t i = 0;
    while (i < code.size()) {
        if (!ident_start(code[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < code.size() && ident_char(code[end])) {
            ++end;
        }
        const std::string ident = code.substr(i, end - i);
        const std::size_t open = skip_ws(code, end);
        if (open < code.size() && code[open] == '(' && !call_keywords().count(ident)) {
            const std::size_t before = prev_non_ws(code, i);
            const std::size_t close = match_forward(code, open, '(', ')');
            // `function NAME(` is a declaration, and `NAME(args) {` is a
            // method-shorthand definition; neither invokes NAME. (A call
            // statement followed by a bare block would be misread, but
            // that shape does not occur in generated games.)
            bool is_definition = false;
            if (before != std::string::npos && ident_char(code[before])) {
                is_definition = read_ident_back(code, before, nullptr) == "function";
            }
            if (!is_definition && close != std::string::npos) {
                const std::size_t after = skip_ws(code, close + 1);
                is_definition = after < code.size() && code[after] == '{';
            }
            if (!is_definition) {
                CallSite site;
                site.callee = ident;
                site.pos = i;
                site.dotted = before != std::string::npos && code[before] == '.';
                site.args_begin = open + 1;
                site.args_end = close == std::string::npos ? code.size() : close;
                sites.push_back(std::move(site));
            }
        }
        i = end;
    }
    return sites;
}

std::vector<OnAssignment> find_on_assignments(const CodeView& view) {
    const std::string& code = view.code;
    std::vector<OnAssignment> out;
    std::size_t i = 0;
    while (i < code.size()) {
        if (!ident_start(code[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < code.size() && ident_char(code[end])) {
            ++end;
        }
        const std::string ident = code.substr(i, end - i);
        if (ident.size() > 2 && ident.rfind("on", 0) == 0) {
            const std::size_t eq = skip_ws(code, end);
            if (eq < code.size() && code[eq] == '=' &&
                (eq + 1 >= code.size() || (code[eq + 1] != '=' && code[eq + 1] != '>'))) {
                OnAssignment a;
                a.event = to_lower(ident.substr(2));
                a.pos = i;
                const std::size_t rhs = skip_ws(code, eq + 1);
                if (rhs < code.size() && ident_start(code[rhs])) {
                    std::size_t rhs_end = rhs;
                    while (rhs_end < code.size() && ident_char(code[rhs_end])) {
                        ++rhs_end;
                    }
                    a.handler = code.substr(rhs, rhs_end - rhs);
                }
                out.push_back(std::move(a));
            }
        }
        i = end;
    }
    return out;
}

bool is_scheduling_name(const std::string& name) {
    return name == "requestAnimationFrame" || name == "setInterval";
}

bool is_callback_taker(const std::string& name) {
    return name == "requestAnimationFrame" || name == "setInterval" || name == "setTimeout";
}

const std::set<std::string>& input_event_names() {
    static const std::set<std::string> events = {
        "keydown",    "keyup",      "keypress",  "mousedown",   "mouseup",
        "mousemove",  "click",      "dblclick",  "touchstart",  "touchend",
        "touchmove",  "touchcancel", "pointerdown", "pointerup", "pointermove",
        "wheel",      "contextmenu",
    };
    return events;
}

const std::set<std::string>& render_call_names() {
    static const std::set<std::string> names = {
        "fillRect",  "strokeRect",  "clearRect", "fillText", "strokeText",
        "drawImage", "beginPath",   "arc",       "fill",     "stroke",
        "rect",      "lineTo",      "moveTo",    "putImageData",
        "drawArrays", "drawElements", "clear",
    };
    return names;
}

// First string-literal argument of a call, or nullptr. Blanked string
// interiors look like whitespace in the code view, so the walk checks for
// a span start before skipping each blank.
const StringSpan* first_string_arg(const CodeView& view, const CallSite& site) {
    for (std::size_t p = site.args_begin; p < view.code.size(); ++p) {
        if (const StringSpan* span = view.string_starting_at(p)) {
            return span;
        }
        if (!std::isspace(static_cast<unsigned char>(view.code[p]))) {
            return nullptr;
        }
    }
    return nullptr;
}

// Identifier argument directly following `from` (skipping whitespace).
std::string ident_at(const CodeView& view, std::size_t from) {
    const std::string& code = view.code;
    const std::size_t p = skip_ws(code, from);
    if (p >= code.size() || !ident_start(code[p])) {
        return "";
    }
    std::size_t end = p;
    while (end < code.size() && ident_char(code[end])) {
        ++end;
    }
    return code.substr(p, end - p);
}

// Innermost extent containing pos, or npos index.
std::size_t innermost_extent(const std::vector<FunctionExtent>& extents, std::size_t pos) {
    std::size_t best = std::string::npos;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (pos > extents[i].body_begin && pos < extents[i].body_end) {
            const std::size_t size = extents[i].body_end - extents[i].body_begin;
            if (best == std::string::npos || size < best_size) {
                best = i;
                best_size = size;
            }
        }
    }
    return best;
}

bool span_has_mutation(const std::string& code, std::size_t begin, std::size_t end) {
    static const std::string compound = "+-*/%&|^";
    for (std::size_t i = begin; i < end && i < code.size(); ++i) {
        const char c = code[i];
        if ((c == '+' && i + 1 < end && code[i + 1] == '+') ||
            (c == '-' && i + 1 < end && code[i + 1] == '-')) {
            return true;
        }
        if (compound.find(c) != std::string::npos && i + 1 < end && code[i + 1] == '=' &&
            (i + 2 >= end || code[i + 2] != '=')) {
            return true;
        }
        if ((c == '<' || c == '>') && i + 2 < end && code[i + 1] == c && code[i + 2] == '=') {
            return true;
        }
        if (c == '=' && (i + 1 >= end || (code[i + 1] != '=' && code[i + 1] != '>')) &&
            (i == begin || (code[i - 1] != '=' && code[i - 1] != '!' && code[i - 1] != '<' &&
                            code[i - 1] != '>' && compound.find(code[i - 1]) == std::string::npos))) {
            return true;
        }
    }
    return false;
}

SourceLocation location_at(const std::string& text, std::size_t offset) {
    SourceLocation loc;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

// HTML event attribute (onkeydown="...", onload="...") found outside
// script bodies, with the identifiers its value calls.
struct EventAttribute {
    std::string event;
    std::vector<std::string> called;
};

std::vector<EventAttribute> find_event_attributes(const std::string& doc_blanked) {
    std::vector<EventAttribute> out;
    const std::string lowered = to_lower(doc_blanked);
    std::size_t pos = 0;
    while ((pos = lowered.find("on", pos)) != std::string::npos) {
        if (pos > 0 && ident_char(lowered[pos - 1])) {
            pos += 2;
            continue;
        }
        std::size_t name_end = pos + 2;
        while (name_end < lowered.size() && std::isalpha(static_cast<unsigned char>(lowered[name_end]))) {
            ++name_end;
        }
        if (name_end == pos + 2) {
            pos += 2;
            continue;
        }
        std::size_t eq = skip_ws(lowered, name_end);
        if (eq >= lowered.size() || lowered[eq] != '=') {
            pos = name_end;
            continue;
        }
        std::size_t value_begin = skip_ws(lowered, eq + 1);
        if (value_begin >= doc_blanked.size() ||
            (doc_blanked[value_begin] != '"' && doc_blanked[value_begin] != '\'')) {
            pos = name_end;
            continue;
        }
        const char quote = doc_blanked[value_begin];
        const std::size_t value_end = doc_blanked.find(quote, value_begin + 1);
        if (value_end == std::string::npos) {
            pos = name_end;
            continue;
        }
        EventAttribute attr;
        attr.event = lowered.substr(pos + 2, name_end - pos - 2);
        const std::string value = doc_blanked.substr(value_begin + 1, value_end - value_begin - 1);
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!ident_start(value[i]) || (i > 0 && ident_char(value[i - 1]))) {
                continue;
            }
            std::size_t end = i;
            while (end < value.size() && ident_char(value[end])) {
                ++end;
            }
            std::size_t open = end;
            while (open < value.size() && std::isspace(static_cast<unsigned char>(value[open]))) {
                ++open;
            }
            if (open < value.size() && value[open] == '(') {
                attr.called.push_back(value.substr(i, end - i));
            }
            i = end;
        }
        out.push_back(std::move(attr));
        pos = value_end + 1;
    }
    return out;
}

} // namespace

ValidationReport analyze(const std::string& html) {
    const ScriptExtraction extraction = extract_scripts(html);

    // Concatenate inline bodies, remembering segment offsets so imbalance
    // positions can be mapped back to the document.
    std::string concat;
    struct Segment {
        std::size_t concat_begin;
        std::size_t concat_end;
        std::size_t doc_begin;
    };
    std::vector<Segment> segments;
    for (const auto& script : extraction.scripts) {
        segments.push_back({concat.size(), concat.size() + script.body.size(), script.body_begin});
        concat += script.body;
        concat.push_back('\n');
    }
    auto to_doc_location = [&](long concat_offset) -> std::optional<SourceLocation> {
        if (concat_offset < 0) {
            return std::nullopt;
        }
        const auto off = static_cast<std::size_t>(concat_offset);
        for (const auto& seg : segments) {
            if (off >= seg.concat_begin && off < seg.concat_end) {
                return location_at(html, seg.doc_begin + (off - seg.concat_begin));
            }
        }
        return std::nullopt;
    };

    const BalanceResult balance = scan_balance(concat);
    const CodeView view = strip_code(concat);
    const std::vector<FunctionExtent> extents = find_extents(view);
    const std::vector<CallSite> calls = find_call_sites(view);
    const std::vector<OnAssignment> on_assignments = find_on_assignments(view);

    // Markup with script bodies blanked, for event-attribute scanning.
    std::string doc_blanked = html;
    for (const auto& script : extraction.scripts) {
        for (std::size_t i = script.body_begin; i < script.body_end && i < doc_blanked.size();
             ++i) {
            if (doc_blanked[i] != '\n') {
                doc_blanked[i] = ' ';
            }
        }
    }
    const std::vector<EventAttribute> event_attrs = find_event_attributes(doc_blanked);

    std::set<std::string> extent_names;
    for (const auto& extent : extents) {
        extent_names.insert(extent.name);
    }

    // Callback references: names the environment invokes once the
    // registering statement runs.
    std::vector<CallbackRef> refs;
    std::vector<const CallSite*> scheduling_calls; // rAF / setInterval call sites
    std::vector<const CallSite*> timer_calls;      // including setTimeout
    for (const auto& call : calls) {
        if (is_callback_taker(call.callee)) {
            timer_calls.push_back(&call);
            if (is_scheduling_name(call.callee)) {
                scheduling_calls.push_back(&call);
            }
            const std::string arg = ident_at(view, call.args_begin);
            if (!arg.empty() && arg != "function" && arg != "async") {
                refs.push_back({arg, call.pos});
            }
        } else if (call.callee == "addEventListener") {
            const StringSpan* event = first_string_arg(view, call);
            if (event != nullptr) {
                const std::size_t comma = view.code.find(',', event->end);
                if (comma != std::string::npos && comma < call.args_end) {
                    const std::string handler = ident_at(view, comma + 1);
                    if (!handler.empty() && handler != "function" && handler != "async") {
                        refs.push_back({handler, call.pos});
                    }
                }
            }
        }
    }
    for (const auto& assignment : on_assignments) {
        if (!assignment.handler.empty() && assignment.handler != "function" &&
            assignment.handler != "async" && assignment.handler != "null") {
            refs.push_back({assignment.handler, assignment.pos});
        } else {
            // Inline `onX = function/arrow`: the bound function expression
            // takes the property's name as its extent name.
            refs.push_back({"on" + assignment.event, assignment.pos});
        }
    }
    // Markup handlers run from document context: anything they call is a
    // live root.
    const std::size_t top_level_pos = view.code.size() + 1;
    for (const auto& attr : event_attrs) {
        for (const auto& callee : attr.called) {
            refs.push_back({callee, top_level_pos});
        }
    }

    // Liveness: top level always executes; a function becomes live when a
    // call or callback registration that names it sits in live code.
    std::set<std::string> live;
    bool changed = true;
    auto site_live = [&](std::size_t pos) {
        const std::size_t idx = innermost_extent(extents, pos);
        return idx == std::string::npos || live.count(extents[idx].name) > 0;
    };
    while (changed) {
        changed = false;
        for (const auto& call : calls) {
            if (extent_names.count(call.callee) && !live.count(call.callee) &&
                site_live(call.pos)) {
                live.insert(call.callee);
                changed = true;
            }
        }
        for (const auto& ref : refs) {
            if (extent_names.count(ref.callee) && !live.count(ref.callee) &&
                site_live(ref.pos)) {
                live.insert(ref.callee);
                changed = true;
            }
        }
    }

    ValidationReport report;
    report.outcomes.resize(kCheckCount);
    auto set_outcome = [&](CheckId id, bool passed, const std::string& fail_message,
                           std::optional<SourceLocation> location = std::nullopt) {
        CheckOutcome outcome;
        outcome.check_id = id;
        outcome.severity = passed ? Severity::pass : failure_severity(id);
        outcome.message = passed ? "" : fail_message;
        outcome.location = passed ? std::nullopt : location;
        report.outcomes[static_cast<std::size_t>(id)] = std::move(outcome);
    };

    const bool has_scripts = !extraction.scripts.empty() && !concat.empty();

    // 1-2. Delimiter balance.
    set_outcome(CheckId::brace_balance, balance.brace.balanced, "unbalanced braces",
                to_doc_location(balance.brace.first_imbalance));
    {
        const bool ok = balance.paren.balanced && balance.bracket.balanced;
        long pos = -1;
        std::string what;
        if (!balance.paren.balanced) {
            pos = balance.paren.first_imbalance;
            what = "unbalanced parentheses";
        }
        if (!balance.bracket.balanced &&
            (pos < 0 || (balance.bracket.first_imbalance >= 0 &&
                         balance.bracket.first_imbalance < pos))) {
            pos = balance.bracket.first_imbalance;
            what = what.empty() ? "unbalanced brackets" : "unbalanced parentheses and brackets";
        } else if (!balance.bracket.balanced) {
            what = "unbalanced parentheses and brackets";
        }
        set_outcome(CheckId::paren_bracket_balance, ok, what, to_doc_location(pos));
    }

    // 3. Game loop actually scheduled from live code.
    {
        bool any_live = false;
        bool any_present = false;
        for (const CallSite* call : scheduling_calls) {
            any_present = true;
            if (site_live(call->pos)) {
                any_live = true;
                break;
            }
        }
        const std::string message =
            any_present ? "scheduling call only occurs inside functions that are never invoked"
                        : "no animation-frame or interval scheduling call found";
        set_outcome(CheckId::loop_invoked, has_scripts && any_live, message);
    }

    // 4. The scheduled loop sustains itself (setInterval repeats by
    // nature; an animation-frame loop must re-schedule from within).
    {
        bool ok = false;
        for (const CallSite* call : scheduling_calls) {
            if (call->callee == "setInterval") {
                ok = true;
                break;
            }
        }
        if (!ok) {
            for (const auto& extent : extents) {
                bool scheduled = false;
                for (const auto& ref : refs) {
                    if (ref.callee == extent.name) {
                        scheduled = true;
                        break;
                    }
                }
                if (!scheduled) {
                    continue;
                }
                for (const CallSite* call : scheduling_calls) {
                    if (call->callee == "requestAnimationFrame" &&
                        call->pos > extent.body_begin && call->pos < extent.body_end) {
                        ok = true;
                        break;
                    }
                }
                if (ok) {
                    break;
                }
            }
        }
        set_outcome(CheckId::loop_recursive, has_scripts && ok,
                    "frame callback never re-schedules itself");
    }

    // 5. Canvas context acquisition.
    {
        bool ok = false;
        for (const auto& call : calls) {
            if (call.callee != "getContext") {
                continue;
            }
            const StringSpan* arg = first_string_arg(view, call);
            if (arg == nullptr) {
                continue;
            }
            const std::string kind = to_lower(arg->content);
            if (kind == "2d" || kind == "webgl" || kind == "webgl2" ||
                kind == "experimental-webgl") {
                ok = true;
                break;
            }
        }
        set_outcome(CheckId::canvas_context, ok, "no 2d/webgl context acquisition found");
    }

    // 6. Input listener registration (script or markup).
    {
        bool ok = false;
        for (const auto& call : calls) {
            if (call.callee != "addEventListener") {
                continue;
            }
            const StringSpan* event = first_string_arg(view, call);
            if (event != nullptr && input_event_names().count(to_lower(event->content))) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            for (const auto& assignment : on_assignments) {
                if (input_event_names().count(assignment.event)) {
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) {
            for (const auto& attr : event_attrs) {
                if (input_event_names().count(attr.event)) {
                    ok = true;
                    break;
                }
            }
        }
        set_outcome(CheckId::input_listener, ok, "no key/mouse/touch listener registration found");
    }

    // 7. Initialization on load (or a top-level call after definitions).
    {
        bool ok = false;
        for (const auto& call : calls) {
            if (call.callee == "addEventListener") {
                const StringSpan* event = first_string_arg(view, call);
                if (event != nullptr) {
                    const std::string name = to_lower(event->content);
                    if (name == "load" || name == "domcontentloaded") {
                        ok = true;
                        break;
                    }
                }
            }
        }
        if (!ok) {
            for (const auto& assignment : on_assignments) {
                if (assignment.event == "load") {
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) {
            for (const auto& attr : event_attrs) {
                if (attr.event == "load") {
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) {
            for (const auto& call : calls) {
                const std::size_t idx = innermost_extent(extents, call.pos);
                if (idx != std::string::npos) {
                    continue;
                }
                if (extent_names.count(call.callee) || is_callback_taker(call.callee)) {
                    ok = true;
                    break;
                }
            }
        }
        set_outcome(CheckId::init_on_load, ok, "no load hook or top-level initialization call");
    }

    // 8. Render call presence.
    {
        bool ok = false;
        for (const auto& call : calls) {
            if (call.dotted && render_call_names().count(call.callee)) {
                ok = true;
                break;
            }
        }
        set_outcome(CheckId::render_call, ok, "no drawing call (fill/stroke/draw/clear family)");
    }

    // 9. State mutation inside the scheduled loop body (or functions it
    // reaches).
    {
        std::set<std::string> roots;
        for (const auto& call : calls) {
            if (is_callback_taker(call.callee)) {
                const std::string arg = ident_at(view, call.args_begin);
                if (!arg.empty() && extent_names.count(arg)) {
                    roots.insert(arg);
                }
            }
        }
        bool ok = false;
        if (!roots.empty()) {
            std::set<std::string> reachable = roots;
            bool grew = true;
            while (grew) {
                grew = false;
                for (const auto& call : calls) {
                    if (!extent_names.count(call.callee) || reachable.count(call.callee)) {
                        continue;
                    }
                    const std::size_t idx = innermost_extent(extents, call.pos);
                    if (idx != std::string::npos && reachable.count(extents[idx].name)) {
                        reachable.insert(call.callee);
                        grew = true;
                    }
                }
            }
            for (const auto& extent : extents) {
                if (reachable.count(extent.name) &&
                    span_has_mutation(view.code, extent.body_begin + 1, extent.body_end)) {
                    ok = true;
                    break;
                }
            }
        } else {
            for (const CallSite* call : timer_calls) {
                if (span_has_mutation(view.code, call->args_begin, call->args_end)) {
                    ok = true;
                    break;
                }
            }
        }
        set_outcome(CheckId::state_update, ok, "no state mutation inside the scheduled loop body");
    }

    for (const auto& outcome : report.outcomes) {
        if (outcome.severity == Severity::error) {
            ++report.error_count;
        } else if (outcome.severity == Severity::warning) {
            ++report.warning_count;
        }
    }
    report.score = clamp01(1.0 - kErrorDeduction * static_cast<double>(report.error_count) -
                           kWarningDeduction * static_cast<double>(report.warning_count));
    return report;
}

void to_json(nlohmann::json& j, const CheckOutcome& o) {
    j = nlohmann::json{{"check_id", check_id_name(o.check_id)},
                       {"severity", severity_name(o.severity)},
                       {"message", o.message}};
    if (o.location) {
        j["location"] = {{"line", o.location->line}, {"column", o.location->column}};
    } else {
        j["location"] = nullptr;
    }
}

void from_json(const nlohmann::json& j, CheckOutcome& o) {
    const std::string id = j.value("check_id", "brace_balance");
    for (std::size_t i = 0; i < kCheckCount; ++i) {
        if (id == check_id_name(static_cast<CheckId>(i))) {
            o.check_id = static_cast<CheckId>(i);
            break;
        }
    }
    const std::string severity = j.value("severity", "pass");
    o.severity = severity == "error" ? Severity::error
                                     : (severity == "warning" ? Severity::warning : Severity::pass);
    o.message = j.value("message", "");
    if (j.contains("location") && j["location"].is_object()) {
        o.location = SourceLocation{j["location"].value("line", std::size_t{1}),
                                    j["location"].value("column", std::size_t{1})};
    }
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
    j = nlohmann::json{{"outcomes", r.outcomes},
                       {"error_count", r.error_count},
                       {"warning_count", r.warning_count},
                       {"score", r.score}};
    j["runtime"] = r.runtime ? nlohmann::json(*r.runtime) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ValidationReport& r) {
    r.outcomes = j.value("outcomes", std::vector<CheckOutcome>{});
    r.error_count = j.value("error_count", std::size_t{0});
    r.warning_count = j.value("warning_count", std::size_t{0});
    r.score = j.value("score", 1.0);
    if (j.contains("runtime") && j["runtime"].is_object()) {
        r.runtime = j["runtime"].get<browser::RuntimeResult>();
    }
}

} // namespace gamesmith::analysis
