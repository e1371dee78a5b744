#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vikey::text {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

// Position of the first occurrence of `needle` in `hay` that is not glued to
// surrounding word characters. Both arguments are compared as given.
inline std::optional<std::size_t> find_whole_word(std::string_view hay, std::string_view needle,
                                                  std::size_t from = 0) {
    if (needle.empty()) return std::nullopt;
    for (auto pos = hay.find(needle, from); pos != std::string_view::npos;
         pos = hay.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]) || !is_word_char(needle.front());
        const auto end = pos + needle.size();
        const bool right_ok =
            end == hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
        if (left_ok && right_ok) return pos;
    }
    return std::nullopt;
}

inline int decimal_digits(long long v) {
    int d = 1;
    while (v >= 10) {
        v /= 10;
        ++d;
    }
    return d;
}

inline std::string zero_pad(long long v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

// Fixed-point percentage with half-up rounding to two decimals, computed from
// integer counts so no floating accumulation is involved.
inline std::string percent_2dp(long long numerator, long long denominator) {
    if (denominator <= 0) return "0.00";
    const long long hundredths = (20000 * numerator + denominator) / (2 * denominator);
    std::string frac = zero_pad(hundredths % 100, 2);
    return std::to_string(hundredths / 100) + "." + frac;
}

}  // namespace vikey::text
