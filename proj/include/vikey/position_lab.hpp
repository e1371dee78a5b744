#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/core/text.hpp"

// Position-index assignment for visual tokens under rotary encodings, with the
// two degraded variants used to remove temporal order from the embedding.
namespace vikey::poslab {

enum class DegradationMode { standard, temporal_only, full_collapse };

inline DegradationMode parse_mode(std::string_view s) {
    const auto l = text::to_lower(s);
    if (l == "standard") return DegradationMode::standard;
    if (l == "temporal_only" || l == "temporal-only") return DegradationMode::temporal_only;
    if (l == "full_collapse" || l == "full-collapse") return DegradationMode::full_collapse;
    throw ConfigError("unknown degradation mode '" + std::string(s) + "'");
}

inline std::string_view to_string(DegradationMode m) {
    switch (m) {
        case DegradationMode::standard: return "standard";
        case DegradationMode::temporal_only: return "temporal_only";
        case DegradationMode::full_collapse: return "full_collapse";
    }
    return "?";
}

struct RopeLayout {
    long long text_len = 0;       // L_t, text tokens preceding the video
    long long tokens_per_frame = 1;
    long long num_frames = 1;
};

inline void validate(const RopeLayout& l) {
    if (l.text_len < 0) throw std::invalid_argument("text_len must be non-negative");
    if (l.tokens_per_frame < 1) throw std::invalid_argument("tokens_per_frame must be >= 1");
    if (l.num_frames < 1) throw std::invalid_argument("num_frames must be >= 1");
}

// 1D RoPE index of token j (0-based) in frame k (1-based).
inline long long rope_pos(const RopeLayout& l, long long k, long long j, DegradationMode mode) {
    validate(l);
    if (k < 1 || k > l.num_frames) throw std::out_of_range("frame index k out of range");
    if (j < 0 || j >= l.tokens_per_frame) throw std::out_of_range("token index j out of range");
    switch (mode) {
        case DegradationMode::standard: return l.text_len + (k - 1) * l.tokens_per_frame + j;
        case DegradationMode::temporal_only: return l.text_len + j;
        case DegradationMode::full_collapse: return l.text_len;
    }
    throw std::logic_error("unknown degradation mode");
}

// rope_pos over all visual tokens, frame-major.
inline std::vector<long long> layout_table(const RopeLayout& l, DegradationMode mode) {
    validate(l);
    std::vector<long long> out;
    out.reserve(static_cast<std::size_t>(l.num_frames * l.tokens_per_frame));
    for (long long k = 1; k <= l.num_frames; ++k)
        for (long long j = 0; j < l.tokens_per_frame; ++j) out.push_back(rope_pos(l, k, j, mode));
    return out;
}

struct MRopeTriplet {
    long long t = 0, h = 0, w = 0;
    friend bool operator==(const MRopeTriplet&, const MRopeTriplet&) = default;
};

inline MRopeTriplet mrope_pos(const MRopeTriplet& base, DegradationMode mode, const MRopeTriplet& anchor = {}) {
    switch (mode) {
        case DegradationMode::standard: return base;
        case DegradationMode::temporal_only: return {anchor.t, base.h, base.w};
        case DegradationMode::full_collapse: return anchor;
    }
    throw std::logic_error("unknown degradation mode");
}

// Triplets for a K-frame video of grid_h x grid_w patches: base (k-1, row, col),
// then degraded by `mode`.
inline std::vector<MRopeTriplet> mrope_table(long long num_frames, long long grid_h, long long grid_w,
                                             DegradationMode mode, const MRopeTriplet& anchor = {}) {
    if (num_frames < 1 || grid_h < 1 || grid_w < 1) throw std::invalid_argument("mrope_table: empty grid");
    std::vector<MRopeTriplet> out;
    out.reserve(static_cast<std::size_t>(num_frames * grid_h * grid_w));
    for (long long k = 0; k < num_frames; ++k)
        for (long long r = 0; r < grid_h; ++r)
            for (long long c = 0; c < grid_w; ++c) out.push_back(mrope_pos({k, r, c}, mode, anchor));
    return out;
}

// Structured table for external model-patching scripts. Text tokens keep
// indices 0..L_t-1 in every mode.
inline nlohmann::json layout_json(const RopeLayout& l, DegradationMode mode) {
    std::vector<long long> text_positions;
    for (long long i = 0; i < l.text_len; ++i) text_positions.push_back(i);
    return {{"scheme", "rope"},
            {"mode", to_string(mode)},
            {"text_len", l.text_len},
            {"tokens_per_frame", l.tokens_per_frame},
            {"num_frames", l.num_frames},
            {"text_positions", text_positions},
            {"visual_positions", layout_table(l, mode)}};
}

inline nlohmann::json mrope_json(long long num_frames, long long grid_h, long long grid_w, DegradationMode mode,
                                 const MRopeTriplet& anchor = {}) {
    nlohmann::json triplets = nlohmann::json::array();
    for (const auto& t : mrope_table(num_frames, grid_h, grid_w, mode, anchor)) triplets.push_back({t.t, t.h, t.w});
    return {{"scheme", "mrope"},
            {"mode", to_string(mode)},
            {"num_frames", num_frames},
            {"grid_h", grid_h},
            {"grid_w", grid_w},
            {"anchor", {anchor.t, anchor.h, anchor.w}},
            {"visual_positions", std::move(triplets)}};
}

}  // namespace vikey::poslab
