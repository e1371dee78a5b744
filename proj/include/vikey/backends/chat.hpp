#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/image.hpp"

// Chat wire protocol shared by the extractor and VideoLLM roles:
//   POST /chat {"model", "messages": [{"role", "content": [part, ...]}], "max_tokens", "temperature"}
//   -> {"text": "..."}
// Parts are {"type": "text", "text": ...} or
// {"type": "image", "media_type": "image/png", "data": <base64>}.
namespace vikey::backends::chat {

struct GenerationParams {
    int max_tokens = 256;
    double temperature = 0.0;
};

inline nlohmann::json text_part(const std::string& text) { return {{"type", "text"}, {"text", text}}; }

inline nlohmann::json image_part(const Image& img) {
    return {{"type", "image"}, {"media_type", "image/png"}, {"data", base64_encode(encode_png(img))}};
}

inline nlohmann::json message(const std::string& role, nlohmann::json parts) {
    return {{"role", role}, {"content", std::move(parts)}};
}

inline nlohmann::json request(const std::string& model, nlohmann::json messages, const GenerationParams& gen) {
    return {{"model", model},
            {"messages", std::move(messages)},
            {"max_tokens", gen.max_tokens},
            {"temperature", gen.temperature}};
}

inline std::string response_text(const nlohmann::json& response) {
    if (!response.is_object() || !response.contains("text") || !response["text"].is_string())
        throw FormatError("chat response: missing string field 'text'");
    return response["text"].get<std::string>();
}

}  // namespace vikey::backends::chat
