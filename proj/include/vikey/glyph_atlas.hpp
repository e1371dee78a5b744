#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vikey::vp {

// Bundled 5x7 bitmap font. Each row holds five bits, MSB = leftmost column.
// Every glyph that can start a label has a pixel in column 0, and every digit
// touches rows 0 and 6, so the ink bounding box of any rendered label starts
// exactly on the first cell and spans the full glyph height.
struct Glyph {
    char ch;
    std::array<std::uint8_t, 7> rows;

    bool ink(int col, int row) const { return (rows[static_cast<std::size_t>(row)] >> (4 - col)) & 1u; }
};

inline constexpr int kGlyphCols = 5;
inline constexpr int kGlyphRows = 7;
inline constexpr int kGlyphAdvance = 6;  // columns per cell including spacing

inline constexpr std::array<Glyph, 20> kGlyphs{{
    {' ', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b00000}},
    {'#', {0b01010, 0b01010, 0b11111, 0b01010, 0b11111, 0b01010, 0b01010}},
    {':', {0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000}},
    {'=', {0b00000, 0b00000, 0b11111, 0b00000, 0b11111, 0b00000, 0b00000}},
    {'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
    {'1', {0b00100, 0b01100, 0b10100, 0b00100, 0b00100, 0b00100, 0b11111}},
    {'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
    {'3', {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}},
    {'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
    {'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
    {'6', {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
    {'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
    {'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
    {'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}},
    {'a', {0b00000, 0b00000, 0b01110, 0b00001, 0b01111, 0b10001, 0b01111}},
    {'e', {0b00000, 0b00000, 0b01110, 0b10001, 0b11111, 0b10000, 0b01110}},
    {'f', {0b00110, 0b01001, 0b01000, 0b11100, 0b01000, 0b01000, 0b01000}},
    {'m', {0b00000, 0b00000, 0b11010, 0b10101, 0b10101, 0b10001, 0b10001}},
    {'r', {0b00000, 0b00000, 0b10110, 0b11001, 0b10000, 0b10000, 0b10000}},
    {'t', {0b01000, 0b01000, 0b11100, 0b01000, 0b01000, 0b01001, 0b00110}},
}};

inline const Glyph* find_glyph(char ch) {
    for (const auto& g : kGlyphs)
        if (g.ch == ch) return &g;
    return nullptr;
}

// Exact reverse lookup from a sampled 5x7 bitmap.
inline std::optional<char> match_glyph(const std::array<std::uint8_t, 7>& rows) {
    for (const auto& g : kGlyphs)
        if (g.rows == rows) return g.ch;
    return std::nullopt;
}

inline bool renderable(std::string_view text) {
    for (char c : text)
        if (!find_glyph(c)) return false;
    return !text.empty();
}

// Ink extent of `text` at integer scale `unit`.
inline int text_width(std::size_t chars, int unit) {
    return chars == 0 ? 0 : static_cast<int>(chars) * kGlyphAdvance * unit - unit;
}
inline int text_height(int unit) { return kGlyphRows * unit; }

}  // namespace vikey::vp
