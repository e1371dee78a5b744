#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "vikey/backends/chat.hpp"
#include "vikey/backends/transport.hpp"
#include "vikey/visual_prompter.hpp"

namespace vikey::backends {

class VideoLlmBackend {
public:
    virtual ~VideoLlmBackend() = default;
    virtual std::string name() const = 0;
    // Frames must be given in display-index order.
    virtual std::string answer(const std::string& system_prompt, const std::string& user_prompt,
                               std::span<const vp::LabeledFrame> frames) = 0;
};

// One chat request per question: system message, then a user message holding
// the frames in display order followed by the prompt text.
class ChatVideoLlm final : public VideoLlmBackend {
public:
    ChatVideoLlm(Transport& transport, std::string model, chat::GenerationParams gen = {},
                 std::size_t max_payload_bytes = 64u << 20)
        : transport_(transport), model_(std::move(model)), gen_(gen), max_payload_bytes_(max_payload_bytes) {}

    std::string name() const override { return "chat:" + model_; }

    nlohmann::json build_request(const std::string& system_prompt, const std::string& user_prompt,
                                 std::span<const vp::LabeledFrame> frames) const {
        if (frames.empty()) throw std::invalid_argument("chat videollm: a video question needs at least one frame");
        std::vector<const vp::LabeledFrame*> ordered;
        for (const auto& f : frames) ordered.push_back(&f);
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](auto* a, auto* b) { return a->display_index < b->display_index; });

        nlohmann::json user = nlohmann::json::array();
        for (const auto* f : ordered) user.push_back(chat::image_part(f->pixels));
        user.push_back(chat::text_part(user_prompt));
        nlohmann::json messages = nlohmann::json::array();
        messages.push_back(chat::message("system", nlohmann::json::array({chat::text_part(system_prompt)})));
        messages.push_back(chat::message("user", std::move(user)));
        auto req = chat::request(model_, std::move(messages), gen_);

        const auto bytes = req.dump().size();
        if (bytes > max_payload_bytes_)
            throw std::length_error("chat videollm: payload of " + std::to_string(frames.size()) + " frames is " +
                                    std::to_string(bytes) + " bytes, limit " + std::to_string(max_payload_bytes_));
        return req;
    }

    std::string answer(const std::string& system_prompt, const std::string& user_prompt,
                       std::span<const vp::LabeledFrame> frames) override {
        return chat::response_text(transport_.post("/chat", build_request(system_prompt, user_prompt, frames)));
    }

private:
    Transport& transport_;
    std::string model_;
    chat::GenerationParams gen_;
    std::size_t max_payload_bytes_;
};

}  // namespace vikey::backends
