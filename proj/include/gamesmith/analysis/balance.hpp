#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace gamesmith::analysis {

enum class DelimiterClass { brace, paren, bracket };

inline constexpr std::array<DelimiterClass, 3> kDelimiterClasses = {
    DelimiterClass::brace, DelimiterClass::paren, DelimiterClass::bracket};

const char* delimiter_class_name(DelimiterClass cls);

struct ClassBalance {
    bool balanced = true;
    // Offset of the first irrecoverable imbalance: a closer at depth zero,
    // or the earliest opener left unmatched at end of input. -1 when balanced.
    long first_imbalance = -1;
};

struct BalanceResult {
    ClassBalance brace;
    ClassBalance paren;
    ClassBalance bracket;

    const ClassBalance& for_class(DelimiterClass cls) const;
    bool all_balanced() const {
        return brace.balanced && paren.balanced && bracket.balanced;
    }
};

// Streaming delimiter-balance scanner. Counts {}, (), [] nesting while
// skipping single-, double-, and template-quoted string contents, line
// comments, and block comments. Quote characters inside strings may be
// escaped with a backslash; single- and double-quoted strings also end at
// a raw newline. Template-literal ${} expressions are treated as opaque
// string content, and regex literals are not recognized (lexing cannot
// separate them from division without a parse).
class BalanceScanner {
public:
    void feed(char c);
    void feed(std::string_view text);
    BalanceResult finish() const;

private:
    enum class Mode { code, single_quote, double_quote, template_quote, line_comment, block_comment };

    struct ClassState {
        int depth = 0;
        long first_bad_close = -1;
        long bottom_open = -1; // offset where depth last rose from zero
    };

    void feed_code(char c);
    ClassState& state_for(char c);

    Mode mode_ = Mode::code;
    bool escape_ = false;
    bool prev_slash_ = false;
    bool prev_star_ = false;
    std::size_t pos_ = 0;
    ClassState brace_;
    ClassState paren_;
    ClassState bracket_;
};

BalanceResult scan_balance(std::string_view script);

} // namespace gamesmith::analysis
