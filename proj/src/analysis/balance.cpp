#include "gamesmith/analysis/balance.hpp"

namespace gamesmith::analysis {

const char* delimiter_class_name(DelimiterClass cls) {
    switch (cls) {
    case DelimiterClass::brace: return "brace";
    case DelimiterClass::paren: return "paren";
    case DelimiterClass::bracket: return "bracket";
    }
    return "unknown";
}

const ClassBalance& BalanceResult::for_class(DelimiterClass cls) const {
    switch (cls) {
    case DelimiterClass::paren: return paren;
    case DelimiterClass::bracket: return bracket;
    case DelimiterClass::brace:
    default: return brace;
    }
}

BalanceScanner::ClassState& BalanceScanner::state_for(char c) {
    switch (c) {
    case '{':
    case '}': return brace_;
    case '(':
    case ')': return paren_;
    default: return bracket_;
    }
}

void BalanceScanner::feed_code(char c) {
    switch (c) {
    case '{':
    case '(':
    case '[': {
        ClassState& s = state_for(c);
        if (s.depth == 0) {
            s.bottom_open = static_cast<long>(pos_);
        }
        ++s.depth;
        break;
    }
    case '}':
    case ')':
    case ']': {
        ClassState& s = state_for(c);
        if (s.depth == 0) {
            if (s.first_bad_close < 0) {
                s.first_bad_close = static_cast<long>(pos_);
            }
        } else {
            --s.depth;
            if (s.depth == 0) {
                s.bottom_open = -1;
            }
        }
        break;
    }
    default:
        break;
    }
}

void BalanceScanner::feed(char c) {
    switch (mode_) {
    case Mode::code:
        if (prev_slash_) {
            prev_slash_ = false;
            if (c == '/') {
                mode_ = Mode::line_comment;
                break;
            }
            if (c == '*') {
                mode_ = Mode::block_comment;
                break;
            }
            // fall through: the pending slash was plain code
        }
        if (c == '/') {
            prev_slash_ = true;
        } else if (c == '"') {
            mode_ = Mode::double_quote;
        } else if (c == '\'') {
            mode_ = Mode::single_quote;
        } else if (c == '`') {
            mode_ = Mode::template_quote;
        } else {
            feed_code(c);
        }
        break;
    case Mode::single_quote:
    case Mode::double_quote:
        if (escape_) {
            escape_ = false;
        } else if (c == '\\') {
            escape_ = true;
        } else if (c == '\n') {
            mode_ = Mode::code;
        } else if ((mode_ == Mode::single_quote && c == '\'') ||
                   (mode_ == Mode::double_quote && c == '"')) {
            mode_ = Mode::code;
        }
        break;
    case Mode::template_quote:
        if (escape_) {
            escape_ = false;
        } else if (c == '\\') {
            escape_ = true;
        } else if (c == '`') {
            mode_ = Mode::code;
        }
        break;
    case Mode::line_comment:
        if (c == '\n') {
            mode_ = Mode::code;
        }
        break;
    case Mode::block_comment:
        if (prev_star_ && c == '/') {
            prev_star_ = false;
            mode_ = Mode::code;
        } else {
            prev_star_ = (c == '*');
        }
        break;
    }
    ++pos_;
}

void BalanceScanner::feed(std::string_view text) {
    for (char c : text) {
        feed(c);
    }
}

namespace {

ClassBalance to_balance(int depth, long first_bad_close, long bottom_open) {
    ClassBalance out;
    if (first_bad_close < 0 && depth == 0) {
        return out;
    }
    out.balanced = false;
    long pos = -1;
    if (first_bad_close >= 0) {
        pos = first_bad_close;
    }
    if (depth > 0 && bottom_open >= 0 && (pos < 0 || bottom_open < pos)) {
        pos = bottom_open;
    }
    out.first_imbalance = pos;
    return out;
}

} // namespace

BalanceResult BalanceScanner::finish() const {
    BalanceResult result;
    result.brace = to_balance(brace_.depth, brace_.first_bad_close, brace_.bottom_open);
    result.paren = to_balance(paren_.depth, paren_.first_bad_close, paren_.bottom_open);
    result.bracket = to_balance(bracket_.depth, bracket_.first_bad_close, bracket_.bottom_open);
    return result;
}

BalanceResult scan_balance(std::string_view script) {
    BalanceScanner scanner;
    scanner.feed(script);
    return scanner.finish();
}

} // namespace gamesmith::analysis
