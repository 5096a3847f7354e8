#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace propmatch::detail {

// Byte-level ASCII classification. Multi-byte UTF-8 sequences are opaque:
// their bytes classify as neither letter nor digit.
inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_letter(char c) { return is_upper(c) || is_lower(c); }
inline bool is_alnum(char c) { return is_letter(c) || is_digit(c); }

inline char to_lower(char c) {
    return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = to_lower(c);
    return out;
}

inline std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline bool is_blank(std::string_view s) { return trim(s).empty(); }

// Maximal non-whitespace runs, in order.
inline std::vector<std::string_view> whitespace_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t b = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

// Optional sign, digits, at most one decimal point, at least one digit.
inline bool is_numeric_token(std::string_view t) {
    std::size_t i = 0;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
    bool digit_seen = false;
    bool dot_seen = false;
    for (; i < t.size(); ++i) {
        if (is_digit(t[i])) {
            digit_seen = true;
        } else if (t[i] == '.' && !dot_seen) {
            dot_seen = true;
        } else {
            return false;
        }
    }
    return digit_seen;
}

}  // namespace propmatch::detail
