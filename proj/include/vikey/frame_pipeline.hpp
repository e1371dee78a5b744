#pragma once

#include <cmath>
#include <cstddef>
#include <cctype>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/image.hpp"

namespace vikey::frames {

struct VideoSource {
    std::string video_id;
    std::vector<std::string> frame_paths;  // temporal order
    std::optional<double> source_fps;
    std::optional<double> duration_s;

    std::size_t frame_count() const { return frame_paths.size(); }
    friend bool operator==(const VideoSource&, const VideoSource&) = default;
};

struct SampledFrame {
    int display_index = 0;        // 1-based, the number rendered on the frame
    std::size_t source_index = 0; // 0-based into VideoSource::frame_paths
    std::string frame_ref;
    friend bool operator==(const SampledFrame&, const SampledFrame&) = default;
};

struct SampledSequence {
    std::string video_id;
    std::vector<SampledFrame> items;
    std::optional<double> source_fps;

    std::size_t size() const { return items.size(); }
    friend bool operator==(const SampledSequence&, const SampledSequence&) = default;

    // Seconds from the start of the video, when the source frame rate is known.
    std::optional<double> timestamp_s(std::size_t item) const {
        if (!source_fps) return std::nullopt;
        return static_cast<double>(items.at(item).source_index) / *source_fps;
    }
};

// ---------------------------------------------------------------------------
// Manifest I/O

namespace detail {

inline void validate_source(const VideoSource& v, std::size_t entry) {
    const auto where = "manifest entry " + std::to_string(entry) + " (video_id '" + v.video_id + "')";
    if (v.video_id.empty()) throw FormatError("manifest entry " + std::to_string(entry) + ": empty video_id");
    if (v.frame_paths.empty()) throw FormatError(where + ": empty frame list");
    std::set<std::string> seen;
    for (const auto& p : v.frame_paths)
        if (!seen.insert(p).second) throw FormatError(where + ": duplicate frame path " + p);
    if (v.source_fps && !(*v.source_fps > 0)) throw FormatError(where + ": fps must be positive");
    if (v.duration_s && !(*v.duration_s > 0)) throw FormatError(where + ": duration_s must be positive");
}

// "scheme:rest" references (two or more letters before the colon) are not
// filesystem paths and pass through untouched.
inline bool has_scheme(std::string_view ref) {
    const auto colon = ref.find(':');
    if (colon == std::string_view::npos || colon < 2) return false;
    for (std::size_t i = 0; i < colon; ++i)
        if (!std::isalpha(static_cast<unsigned char>(ref[i]))) return false;
    return true;
}

}  // namespace detail

// Parses a manifest document. Relative frame paths are resolved against `base_dir`.
inline std::vector<VideoSource> parse_manifest(const nlohmann::json& doc,
                                               const std::filesystem::path& base_dir) {
    const nlohmann::json* entries = &doc;
    if (doc.is_object()) {
        if (!doc.contains("videos")) throw FormatError("manifest: missing 'videos' array");
        entries = &doc.at("videos");
    }
    if (!entries->is_array()) throw FormatError("manifest: 'videos' must be an array");

    std::vector<VideoSource> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < entries->size(); ++i) {
        const auto& e = (*entries)[i];
        VideoSource v;
        try {
            v.video_id = e.at("video_id").get<std::string>();
            for (const auto& f : e.at("frames")) {
                const auto ref = f.get<std::string>();
                const std::filesystem::path p = ref;
                if (detail::has_scheme(ref)) v.frame_paths.push_back(ref);
                else v.frame_paths.push_back((p.is_absolute() ? p : base_dir / p).lexically_normal().string());
            }
            if (e.contains("fps") && !e["fps"].is_null()) v.source_fps = e["fps"].get<double>();
            if (e.contains("duration_s") && !e["duration_s"].is_null())
                v.duration_s = e["duration_s"].get<double>();
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError("manifest entry " + std::to_string(i) + ": " + ex.what());
        }
        detail::validate_source(v, i);
        if (!ids.insert(v.video_id).second)
            throw FormatError("manifest entry " + std::to_string(i) + ": duplicate video_id '" +
                              v.video_id + "'");
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<VideoSource> load_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw FormatError("manifest not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& ex) {
        throw FormatError("manifest " + path.string() + ": " + ex.what());
    }
    return parse_manifest(doc, path.parent_path());
}

inline nlohmann::json manifest_to_json(const std::vector<VideoSource>& videos) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : videos) {
        nlohmann::json e{{"video_id", v.video_id}, {"frames", v.frame_paths}};
        if (v.source_fps) e["fps"] = *v.source_fps;
        if (v.duration_s) e["duration_s"] = *v.duration_s;
        arr.push_back(std::move(e));
    }
    return nlohmann::json{{"videos", std::move(arr)}};
}

inline nlohmann::json to_json(const SampledSequence& seq) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : seq.items)
        items.push_back({{"display_index", it.display_index},
                         {"source_index", it.source_index},
                         {"frame", it.frame_ref}});
    nlohmann::json out{{"video_id", seq.video_id}, {"items", std::move(items)}};
    if (seq.source_fps) out["fps"] = *seq.source_fps;
    return out;
}

// ---------------------------------------------------------------------------
// Samplers

// Endpoint-inclusive linear spacing: floor(i * (count - 1) / (n - 1)) for
// i = 0..n-1, with n clamped to count. Exact integer arithmetic.
inline std::vector<std::size_t> uniform_positions(std::size_t count, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    if (count == 0) throw std::invalid_argument("cannot sample from an empty frame list");
    n = std::min(n, count);
    std::vector<std::size_t> pos(n);
    if (n == 1) return {0};
    for (std::size_t i = 0; i < n; ++i) pos[i] = i * (count - 1) / (n - 1);
    return pos;
}

// Picks items of `pool` at `positions` and renumbers display indices 1..n.
inline SampledSequence select(const SampledSequence& pool, const std::vector<std::size_t>& positions) {
    SampledSequence out{pool.video_id, {}, pool.source_fps};
    out.items.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        auto item = pool.items.at(positions[i]);
        item.display_index = static_cast<int>(i + 1);
        out.items.push_back(std::move(item));
    }
    return out;
}

// The whole video as a sequence (display index = source index + 1).
inline SampledSequence all_frames(const VideoSource& video) {
    SampledSequence seq{video.video_id, {}, video.source_fps};
    seq.items.reserve(video.frame_count());
    for (std::size_t i = 0; i < video.frame_count(); ++i)
        seq.items.push_back({static_cast<int>(i + 1), i, video.frame_paths[i]});
    return seq;
}

inline SampledSequence sample_fixed(const SampledSequence& pool, std::size_t n) {
    return select(pool, uniform_positions(pool.size(), n));
}

inline SampledSequence sample_fixed(const VideoSource& video, std::size_t n) {
    return sample_fixed(all_frames(video), n);
}

// Number of frames a `fraction` of `count` yields: floor(count * fraction),
// raised to `min_frames`, never above `count`. A 1e-9 guard keeps products
// such as 100 * 0.29 from flooring one below their exact value.
inline std::size_t fraction_count(std::size_t count, double fraction, std::size_t min_frames) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("fraction must lie in (0, 1], got " + std::to_string(fraction));
    if (min_frames == 0) throw std::invalid_argument("min_frames must be at least 1");
    const auto raw = static_cast<std::size_t>(std::floor(static_cast<double>(count) * fraction + 1e-9));
    return std::min(std::max(raw, min_frames), count);
}

inline SampledSequence sample_fraction(const SampledSequence& pool, double fraction,
                                       std::size_t min_frames = 3) {
    return sample_fixed(pool, fraction_count(pool.size(), fraction, min_frames));
}

inline SampledSequence sample_fraction(const VideoSource& video, double fraction,
                                       std::size_t min_frames = 3) {
    return sample_fraction(all_frames(video), fraction, min_frames);
}

// Frames at `target_fps`, at most `cap` of them. The decimated candidate pool
// has min(floor(duration * target_fps), F) frames (at least 1); the cap is
// applied to that pool.
inline SampledSequence sample_fps_capped(const VideoSource& video, double target_fps = 1.0,
                                         std::size_t cap = 64) {
    if (!video.source_fps || !video.duration_s)
        throw std::invalid_argument("video '" + video.video_id +
                                    "': fps-capped sampling needs fps and duration_s metadata");
    if (!(target_fps > 0)) throw std::invalid_argument("target_fps must be positive");
    if (cap == 0) throw std::invalid_argument("cap must be at least 1");
    const auto by_time = static_cast<std::size_t>(std::floor(*video.duration_s * target_fps + 1e-9));
    const auto candidates = std::max<std::size_t>(1, std::min(by_time, video.frame_count()));
    auto pool = sample_fixed(video, candidates);
    if (candidates <= cap) return pool;
    return sample_fixed(pool, cap);
}

// Declarative sampling plan as read from a run configuration.
struct SamplingSpec {
    enum class Mode { fps_capped, fraction, fixed };
    enum class FractionPool { fps, raw };

    Mode mode = Mode::fps_capped;
    double target_fps = 1.0;
    std::size_t cap = 64;
    double fraction = 0.2;
    std::size_t min_frames = 3;
    std::size_t n = 16;
    FractionPool fraction_pool = FractionPool::fps;
};

inline SampledSequence sample(const VideoSource& video, const SamplingSpec& spec) {
    using Mode = SamplingSpec::Mode;
    switch (spec.mode) {
        case Mode::fixed:
            return sample_fixed(video, spec.n);
        case Mode::fps_capped:
            return sample_fps_capped(video, spec.target_fps, spec.cap);
        case Mode::fraction: {
            if (spec.fraction_pool == SamplingSpec::FractionPool::raw)
                return sample_fraction(video, spec.fraction, spec.min_frames);
            // Same 1 fps pool the dense setting draws from, before the cap.
            const auto pool = sample_fps_capped(video, spec.target_fps, video.frame_count());
            return sample_fraction(pool, spec.fraction, spec.min_frames);
        }
    }
    throw std::logic_error("unknown sampling mode");
}

}  // namespace vikey::frames
