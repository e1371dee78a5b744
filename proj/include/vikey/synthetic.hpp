#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "vikey/core/error.hpp"
#include "vikey/core/rng.hpp"
#include "vikey/core/text.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/image.hpp"
#include "vikey/marker.hpp"

// Procedural videos for desk-scale runs. A frame reference of the form
// "synthetic:<video_seed>:<frame>:<width>x<height>" is generated on demand; a
// trailing "+marker" pastes the probe marker into that frame.
// Generated pixels never use pure red, so rendered labels stay unambiguous.
namespace vikey::synthetic {

inline constexpr std::string_view kScheme = "synthetic:";

inline constexpr std::string_view kMarkerSuffix = "+marker";

inline std::string frame_ref(std::uint64_t video_seed, std::size_t frame, int width, int height,
                             bool with_marker = false) {
    return std::string(kScheme) + std::to_string(video_seed) + ":" + std::to_string(frame) + ":" +
           std::to_string(width) + "x" + std::to_string(height) + (with_marker ? std::string(kMarkerSuffix) : "");
}

inline Image render_frame(std::uint64_t video_seed, std::size_t frame, int width, int height) {
    SplitMix64 rng(video_seed);
    const int base_r = static_cast<int>(rng.below(120)) + 40;
    const int base_g = static_cast<int>(rng.below(120)) + 40;
    const int base_b = static_cast<int>(rng.below(120)) + 40;
    const int speed = static_cast<int>(rng.below(5)) + 2;
    Image img(width, height);
    const int sq = std::max(4, std::min(width, height) / 6);
    const int span_x = std::max(1, width - sq);
    const int sx = static_cast<int>((frame * static_cast<std::size_t>(speed) * 7) % static_cast<std::size_t>(span_x));
    const int sy = static_cast<int>((frame * 5 + video_seed % 13) % static_cast<std::size_t>(std::max(1, height - sq)));
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            Rgb c{static_cast<std::uint8_t>((base_r + x / 4 + static_cast<int>(frame)) % 200 + 20),
                  static_cast<std::uint8_t>((base_g + y / 4) % 200 + 20),
                  static_cast<std::uint8_t>((base_b + (x + y) / 8 + 3 * static_cast<int>(frame)) % 200 + 20)};
            if (x >= sx && x < sx + sq && y >= sy && y < sy + sq) c = Rgb{230, 230, 40};
            img.set(x, y, c);
        }
    return img;
}

inline bool is_synthetic(std::string_view ref) { return ref.starts_with(kScheme); }

inline Image render_ref(std::string_view ref) {
    unsigned long long seed = 0, frame = 0;
    int w = 0, h = 0, used = 0;
    const std::string s(ref.substr(kScheme.size()));
    if (std::sscanf(s.c_str(), "%llu:%llu:%dx%d%n", &seed, &frame, &w, &h, &used) != 4 || w <= 0 || h <= 0)
        throw FormatError("malformed synthetic frame reference: " + std::string(ref));
    const std::string_view tail = std::string_view(s).substr(static_cast<std::size_t>(used));
    if (!tail.empty() && tail != kMarkerSuffix)
        throw FormatError("malformed synthetic frame reference: " + std::string(ref));
    auto img = render_frame(seed, frame, w, h);
    if (!tail.empty()) img = marker::composite(img, marker::default_marker());
    return img;
}

// Loads synthetic references procedurally and everything else as PNG files.
class DefaultFrameLoader final : public FrameLoader {
public:
    Image load(const std::string& ref) override {
        if (is_synthetic(ref)) return render_ref(ref);
        return png_.load(ref);
    }

private:
    PngFrameLoader png_;
};

inline std::vector<frames::VideoSource> make_sources(std::size_t count, std::size_t frames_per_video, int width,
                                                     int height, std::uint64_t seed, double fps = 1.0) {
    std::vector<frames::VideoSource> out;
    for (std::size_t v = 0; v < count; ++v) {
        const auto video_seed = mix_seed(seed, v);
        frames::VideoSource src{"synthetic_" + text::zero_pad(static_cast<long long>(v), 3), {}, fps,
                                static_cast<double>(frames_per_video) / fps};
        for (std::size_t f = 0; f < frames_per_video; ++f)
            src.frame_paths.push_back(frame_ref(video_seed, f, width, height));
        out.push_back(std::move(src));
    }
    return out;
}

}  // namespace vikey::synthetic
