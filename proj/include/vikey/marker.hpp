#pragma once

#include <algorithm>

#include "vikey/image.hpp"

// The probe marker: a black-and-white image pasted at the centre of one frame.
namespace vikey::marker {

// Procedural 64x64 panda face, pure black and white.
inline Image default_marker() {
    constexpr int kSize = 64;
    const Rgb white{255, 255, 255}, black{0, 0, 0};
    Image img(kSize, kSize, white);
    auto disc = [&](int cx, int cy, int r, Rgb c) {
        for (int y = 0; y < kSize; ++y)
            for (int x = 0; x < kSize; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, c);
    };
    disc(12, 12, 10, black);  // ears
    disc(51, 12, 10, black);
    disc(32, 36, 24, white);  // face, drawn over the ears' inner halves
    for (int y = 0; y < kSize; ++y)  // face border
        for (int x = 0; x < kSize; ++x) {
            const int d2 = (x - 32) * (x - 32) + (y - 36) * (y - 36);
            if (d2 <= 26 * 26 && d2 > 24 * 24) img.set(x, y, black);
        }
    disc(23, 32, 6, black);  // eye patches
    disc(41, 32, 6, black);
    disc(24, 31, 2, white);
    disc(40, 31, 2, white);
    disc(32, 44, 3, black);  // nose
    return img;
}

// Marker resized so its longer side is half the frame's shorter side.
inline Image scaled_for(const Image& marker, int frame_w, int frame_h) {
    const int target = std::max(1, std::min(frame_w, frame_h) / 2);
    const bool wide = marker.width() >= marker.height();
    const int w = wide ? target : std::max(1, marker.width() * target / marker.height());
    const int h = wide ? std::max(1, marker.height() * target / marker.width()) : target;
    return resize_nearest(marker, w, h);
}

inline Image composite(const Image& frame, const Image& marker) {
    const Image scaled = scaled_for(marker, frame.width(), frame.height());
    Image out = frame;
    blit(out, scaled, (frame.width() - scaled.width()) / 2, (frame.height() - scaled.height()) / 2);
    return out;
}

namespace detail {
inline bool matches_at(const Image& frame, const Image& tpl, int x0, int y0) {
    for (int y = 0; y < tpl.height(); ++y)
        for (int x = 0; x < tpl.width(); ++x)
            if (!(frame.at(x0 + x, y0 + y) == tpl.at(x, y))) return false;
    return true;
}
}  // namespace detail

// Exact template search for the marker as scaled for a rw x rh frame whose
// pixels sit at (rx, ry) inside `frame` (letterboxed frames carry a band). The
// centre placement is tried first; otherwise every offset is scanned.
inline bool contains(const Image& frame, const Image& marker, int rx, int ry, int rw, int rh) {
    const Image tpl = scaled_for(marker, rw, rh);
    if (tpl.width() > rw || tpl.height() > rh || rx + rw > frame.width() || ry + rh > frame.height()) return false;
    if (detail::matches_at(frame, tpl, rx + (rw - tpl.width()) / 2, ry + (rh - tpl.height()) / 2)) return true;
    for (int y = ry; y + tpl.height() <= ry + rh; ++y)
        for (int x = rx; x + tpl.width() <= rx + rw; ++x)
            if (detail::matches_at(frame, tpl, x, y)) return true;
    return false;
}

inline bool contains(const Image& frame, const Image& marker) {
    return contains(frame, marker, 0, 0, frame.width(), frame.height());
}

}  // namespace vikey::marker
