#pragma once

#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "vikey/backends/videollm.hpp"
#include "vikey/core/text.hpp"
#include "vikey/marker.hpp"
#include "vikey/visual_prompter.hpp"

namespace vikey::backends {

// A VideoLLM stand-in that reads frames pixel-exactly: frame labels through the
// bundled glyph atlas and the probe marker through template matching. It
// answers the two probe questions and declines everything else.
//
//   "... frame #k ..."        -> whether the frame labelled k shows the marker
//   "Which frame ... ?"       -> "frame <label>" of the frame showing the marker
//
// Without readable labels it answers "unknown". In strict mode a frame list in
// which no label decodes is reported as an error (a rendering regression).
class MockDecoderModel final : public VideoLlmBackend {
public:
    explicit MockDecoderModel(Image marker = marker::default_marker(), std::string marker_word = "panda",
                              Rgb text_color = {255, 0, 0}, bool strict = false)
        : marker_(std::move(marker)), marker_word_(std::move(marker_word)), text_color_(text_color), strict_(strict) {}

    std::string name() const override { return "mock"; }

    std::string answer(const std::string&, const std::string& user_prompt,
                       std::span<const vp::LabeledFrame> frames) override {
        if (frames.empty()) throw std::invalid_argument("mock decoder: no frames");
        std::vector<std::optional<int>> labels(frames.size());
        bool any = false;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (const auto text = vp::decode_label(frames[i].pixels, text_color_))
                labels[i] = vp::parse_label_index(*text);
            any = any || labels[i].has_value();
        }
        if (strict_ && !any) throw FormatError("mock decoder: no frame's label decodes");

        static const std::regex kLookup(R"(frame #(\d+))");
        std::smatch m;
        const auto lower = text::to_lower(user_prompt);
        if (lower.find("which frame") != std::string::npos) {
            for (std::size_t i = 0; i < frames.size(); ++i)
                if (has_marker(frames[i]))
                    return labels[i] ? "frame " + std::to_string(*labels[i]) : std::string("unknown");
            return "unknown";
        }
        if (std::regex_search(user_prompt, m, kLookup)) {
            const int k = std::stoi(m[1].str());
            for (std::size_t i = 0; i < frames.size(); ++i)
                if (labels[i] == k)
                    return has_marker(frames[i]) ? "The frame shows a " + marker_word_ + "."
                                                 : std::string("The frame shows nothing notable.");
        }
        return "unknown";
    }

private:
    bool has_marker(const vp::LabeledFrame& f) const {
        const auto& c = f.content_box;
        if (c.w > 0 && c.h > 0) return marker::contains(f.pixels, marker_, c.x, c.y, c.w, c.h);
        return marker::contains(f.pixels, marker_);
    }

    Image marker_;
    std::string marker_word_;
    Rgb text_color_;
    bool strict_;
};

}  // namespace vikey::backends
