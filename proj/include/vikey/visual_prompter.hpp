#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vikey/core/error.hpp"
#include "vikey/core/parallel.hpp"
#include "vikey/core/text.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/glyph_atlas.hpp"
#include "vikey/image.hpp"

namespace vikey::vp {

enum class Corner { TL, TR, BL, BR };
enum class LabelStyle { style1, style2, style3, style4 };
enum class Padding { overlay, letterbox };

inline constexpr Corner kAllCorners[] = {Corner::TL, Corner::TR, Corner::BL, Corner::BR};

inline std::string_view to_string(Corner c) {
    switch (c) {
        case Corner::TL: return "TL";
        case Corner::TR: return "TR";
        case Corner::BL: return "BL";
        case Corner::BR: return "BR";
    }
    return "?";
}

inline Corner parse_corner(std::string_view s) {
    const auto l = text::to_lower(s);
    if (l == "tl" || l == "top-left") return Corner::TL;
    if (l == "tr" || l == "top-right") return Corner::TR;
    if (l == "bl" || l == "bottom-left") return Corner::BL;
    if (l == "br" || l == "bottom-right") return Corner::BR;
    throw ConfigError("unknown VP position '" + std::string(s) + "' (expected TL, TR, BL or BR)");
}

inline LabelStyle parse_style(std::string_view s) {
    const auto l = text::to_lower(s);
    if (l == "1" || l == "style1") return LabelStyle::style1;
    if (l == "2" || l == "style2") return LabelStyle::style2;
    if (l == "3" || l == "style3") return LabelStyle::style3;
    if (l == "4" || l == "style4") return LabelStyle::style4;
    throw ConfigError("unknown VP style '" + std::string(s) + "' (expected 1-4)");
}

inline Padding parse_padding(std::string_view s) {
    const auto l = text::to_lower(s);
    if (l == "overlay") return Padding::overlay;
    if (l == "letterbox") return Padding::letterbox;
    throw ConfigError("unknown VP padding '" + std::string(s) + "' (expected overlay or letterbox)");
}

struct VpConfig {
    Corner position = Corner::BL;
    LabelStyle style = LabelStyle::style1;
    int size_divisor = 12;  // s
    bool outline = false;   // o
    Padding padding = Padding::overlay;
    Rgb text_color{255, 0, 0};
    Rgb outline_color{0, 0, 0};
    std::optional<int> margin_px;  // nullopt: max(2, fontsize / 8)
};

struct Box {
    int x = 0, y = 0, w = 0, h = 0;
    bool contains(int px, int py) const { return px >= x && py >= y && px < x + w && py < y + h; }
    friend bool operator==(const Box&, const Box&) = default;
};

struct LabeledFrame {
    int display_index = 0;
    Image pixels;
    Box label_box;
    Box content_box;  // where the source frame's pixels sit in `pixels`
    std::string label_text;
    int fontsize = 0;                // after any shrink-to-fit
    int margin = 0;
    std::optional<std::string> warning;  // set when the label had to shrink
};

inline int compute_fontsize(int width, int height, int s) {
    if (s <= 0) throw std::invalid_argument("size divisor s must be at least 1");
    if (width < 1 || height < 1) throw std::invalid_argument("frame must be non-empty");
    return std::max(1, std::min(width, height) / s);
}

inline std::string format_timestamp(double seconds) {
    const auto total = static_cast<long long>(std::floor(std::max(0.0, seconds)));
    return text::zero_pad(total / 60, 2) + ":" + text::zero_pad(total % 60, 2);
}

inline std::string render_label(int display_index, LabelStyle style, int pad_width,
                                std::optional<double> timestamp_s = std::nullopt) {
    if (display_index < 1) throw std::invalid_argument("display index must be >= 1");
    if (pad_width < 1) throw std::invalid_argument("pad width must be >= 1");
    switch (style) {
        case LabelStyle::style1: return "frame #" + text::zero_pad(display_index, pad_width);
        case LabelStyle::style2: return "#" + text::zero_pad(display_index, pad_width);
        case LabelStyle::style3: return std::to_string(display_index);
        case LabelStyle::style4:
            if (!timestamp_s) throw std::invalid_argument("style 4 needs frame timing (source fps)");
            return "t=" + format_timestamp(*timestamp_s);
    }
    throw std::logic_error("unknown label style");
}

// Display index encoded in a decoded label string, if the style carries one.
inline std::optional<int> parse_label_index(std::string_view label) {
    std::string_view digits = label;
    if (label.starts_with("frame #")) digits = label.substr(7);
    else if (label.starts_with("#")) digits = label.substr(1);
    if (digits.empty() || digits.size() > 9) return std::nullopt;
    for (char c : digits)
        if (c < '0' || c > '9') return std::nullopt;
    const int v = std::stoi(std::string(digits));
    return v >= 1 ? std::optional<int>(v) : std::nullopt;
}

// Pixel geometry of a label at a given font size.
struct LabelGeometry {
    int unit = 1;     // pixels per font cell
    int stroke = 0;   // outline width
    int box_w = 0;    // label_box extent, stroke included
    int box_h = 0;
    int margin = 0;
};

inline LabelGeometry label_geometry(std::size_t chars, int fontsize, const VpConfig& cfg) {
    LabelGeometry g;
    g.stroke = cfg.outline ? (fontsize + 14) / 15 : 0;
    g.unit = std::max(1, (fontsize - 2 * g.stroke) / kGlyphRows);
    g.box_w = text_width(chars, g.unit) + 2 * g.stroke;
    g.box_h = text_height(g.unit) + 2 * g.stroke;
    g.margin = cfg.margin_px ? *cfg.margin_px : std::max(2, fontsize / 8);
    return g;
}

// Draws `text` with its ink origin at (x, y). When stroke > 0 every ink pixel
// is first dilated (Chebyshev radius `stroke`) in the outline colour.
inline void draw_text(Image& img, std::string_view text, int x, int y, int unit, int stroke,
                      Rgb fill, Rgb outline) {
    auto for_each_ink = [&](auto&& fn) {
        for (std::size_t i = 0; i < text.size(); ++i) {
            const Glyph* g = find_glyph(text[i]);
            if (!g) throw std::invalid_argument(std::string("no glyph for character '") + text[i] + "'");
            const int cx = x + static_cast<int>(i) * kGlyphAdvance * unit;
            for (int r = 0; r < kGlyphRows; ++r)
                for (int c = 0; c < kGlyphCols; ++c)
                    if (g->ink(c, r)) fn(cx + c * unit, y + r * unit);
        }
    };
    auto fill_rect = [&](int x0, int y0, int w, int h, Rgb color) {
        for (int py = y0; py < y0 + h; ++py)
            for (int px = x0; px < x0 + w; ++px)
                if (img.contains(px, py)) img.set(px, py, color);
    };
    if (stroke > 0)
        for_each_ink([&](int px, int py) {
            fill_rect(px - stroke, py - stroke, unit + 2 * stroke, unit + 2 * stroke, outline);
        });
    for_each_ink([&](int px, int py) { fill_rect(px, py, unit, unit, fill); });
}

inline Box corner_box(Corner corner, int img_w, int img_h, int box_w, int box_h, int margin) {
    const bool left = corner == Corner::TL || corner == Corner::BL;
    const bool top = corner == Corner::TL || corner == Corner::TR;
    return {left ? margin : img_w - margin - box_w, top ? margin : img_h - margin - box_h, box_w, box_h};
}

inline LabeledFrame insert_vp(const Image& frame, int display_index, const VpConfig& cfg, int pad_width,
                              std::optional<double> timestamp_s = std::nullopt) {
    if (frame.empty()) throw std::invalid_argument("insert_vp: empty frame");
    const std::string label = render_label(display_index, cfg.style, pad_width, timestamp_s);
    const bool letterbox = cfg.padding == Padding::letterbox;

    LabeledFrame out;
    out.display_index = display_index;
    out.label_text = label;

    int fontsize = compute_fontsize(frame.width(), frame.height(), cfg.size_divisor);
    auto fits = [&](const LabelGeometry& g) {
        const bool w_ok = g.box_w + 2 * g.margin <= frame.width();
        const bool h_ok = letterbox || g.box_h + 2 * g.margin <= frame.height();
        return w_ok && h_ok;
    };
    LabelGeometry geo = label_geometry(label.size(), fontsize, cfg);
    if (!fits(geo)) {
        const int requested = fontsize;
        while (fontsize > 1 && !fits(geo)) geo = label_geometry(label.size(), --fontsize, cfg);
        if (!fits(geo))
            throw FormatError("label '" + label + "' does not fit a " + std::to_string(frame.width()) + "x" +
                              std::to_string(frame.height()) + " frame even at font size 1");
        out.warning = "label '" + label + "' wider than frame at font size " + std::to_string(requested) +
                      "; shrunk to " + std::to_string(fontsize);
    }
    out.fontsize = fontsize;
    out.margin = geo.margin;

    const bool top = cfg.position == Corner::TL || cfg.position == Corner::TR;
    if (letterbox) {
        const int band = std::max(fontsize, geo.box_h) + 2 * geo.margin;
        out.pixels = Image(frame.width(), frame.height() + band, Rgb{0, 0, 0});
        blit(out.pixels, frame, 0, top ? band : 0);
        out.content_box = {0, top ? band : 0, frame.width(), frame.height()};
    } else {
        out.pixels = frame;
        out.content_box = {0, 0, frame.width(), frame.height()};
    }
    out.label_box = corner_box(cfg.position, out.pixels.width(), out.pixels.height(), geo.box_w, geo.box_h,
                               geo.margin);
    draw_text(out.pixels, label, out.label_box.x + geo.stroke, out.label_box.y + geo.stroke, geo.unit,
              geo.stroke, cfg.text_color, cfg.outline_color);
    return out;
}

// Labels every frame of a sequence with its display index. Zero-pad width is
// the digit count of N. Frames are rendered on up to `workers` threads; the
// result is ordered by display index regardless.
inline std::vector<LabeledFrame> apply_sequence(const frames::SampledSequence& seq,
                                                const std::vector<Image>& pixels, const VpConfig& cfg,
                                                std::size_t workers = 1) {
    if (seq.items.empty()) throw std::invalid_argument("apply_sequence: empty sequence");
    if (pixels.size() != seq.items.size())
        throw std::invalid_argument("apply_sequence: pixel count does not match sequence length");
    const int pad = text::decimal_digits(static_cast<long long>(seq.items.size()));
    std::vector<LabeledFrame> out(seq.items.size());
    parallel_for(seq.items.size(), workers, [&](std::size_t i) {
        out[i] = insert_vp(pixels[i], seq.items[i].display_index, cfg, pad, seq.timestamp_s(i));
    });
    return out;
}

inline std::vector<Image> load_frames(const frames::SampledSequence& seq, FrameLoader& loader) {
    std::vector<Image> out;
    out.reserve(seq.items.size());
    for (const auto& it : seq.items) out.push_back(loader.load(it.frame_ref));
    return out;
}

inline std::vector<LabeledFrame> apply_sequence(const frames::SampledSequence& seq, FrameLoader& loader,
                                                const VpConfig& cfg, std::size_t workers = 1) {
    return apply_sequence(seq, load_frames(seq, loader), cfg, workers);
}

// Frames passed through without a label (the no-VP condition).
inline std::vector<LabeledFrame> passthrough_sequence(const frames::SampledSequence& seq,
                                                      std::vector<Image> pixels) {
    std::vector<LabeledFrame> out(seq.items.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].display_index = seq.items[i].display_index;
        out[i].pixels = std::move(pixels.at(i));
        out[i].content_box = {0, 0, out[i].pixels.width(), out[i].pixels.height()};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reading labels back from pixels.

// Decodes a label rendered by insert_vp in `text_color`, searching the top and
// bottom halves of the image. Decoding is exact: the candidate string is
// re-rasterised and must reproduce every text-coloured pixel of its box.
inline std::optional<std::string> decode_label(const Image& img, Rgb text_color) {
    const int half = img.height() / 2;
    const int bands[2][2] = {{0, half}, {half, img.height()}};
    for (const auto& band : bands) {
        int left = img.width(), right = -1, top = img.height(), bottom = -1;
        for (int y = band[0]; y < band[1]; ++y)
            for (int x = 0; x < img.width(); ++x)
                if (img.at(x, y) == text_color) {
                    left = std::min(left, x);
                    right = std::max(right, x);
                    top = std::min(top, y);
                    bottom = std::max(bottom, y);
                }
        if (right < 0) continue;
        const int h = bottom - top + 1;
        if (h % kGlyphRows != 0) continue;
        const int unit = h / kGlyphRows;

        std::string decoded;
        bool ok = true;
        for (int cx = left; cx <= right; cx += kGlyphAdvance * unit) {
            std::array<std::uint8_t, 7> rows{};
            for (int r = 0; r < kGlyphRows; ++r)
                for (int c = 0; c < kGlyphCols; ++c) {
                    const int px = cx + c * unit + unit / 2;
                    const int py = top + r * unit + unit / 2;
                    if (img.contains(px, py) && img.at(px, py) == text_color)
                        rows[static_cast<std::size_t>(r)] |= static_cast<std::uint8_t>(1u << (4 - c));
                }
            const auto ch = match_glyph(rows);
            if (!ch) {
                ok = false;
                break;
            }
            decoded += *ch;
        }
        if (!ok || decoded.empty()) continue;

        // Exact verification against a fresh rasterisation.
        const int w = text_width(decoded.size(), unit);
        if (left + w - 1 < right) continue;
        Image mask(w, h, Rgb{0, 0, 0});
        draw_text(mask, decoded, 0, 0, unit, 0, Rgb{255, 255, 255}, Rgb{});
        for (int y = 0; y < h && ok; ++y)
            for (int x = 0; x < w && ok; ++x) {
                const bool expect = mask.at(x, y) == Rgb{255, 255, 255};
                const bool have = img.contains(left + x, top + y) && img.at(left + x, top + y) == text_color;
                ok = expect == have;
            }
        if (ok) return decoded;
    }
    return std::nullopt;
}

}  // namespace vikey::vp
