#pragma once

#include <memory>

#include "vikey/backends/embedder.hpp"
#include "vikey/backends/extractor.hpp"
#include "vikey/backends/http_transport.hpp"
#include "vikey/backends/mock_decoder.hpp"
#include "vikey/backends/videollm.hpp"
#include "vikey/harness/config.hpp"
#include "vikey/harness/pipeline.hpp"
#include "vikey/synthetic.hpp"

namespace vikey::harness {

// Owns the backends a RunConfig names. Endpoint URLs and tokens go through
// ${VAR} expansion here, so unused backends never need their variables set.
class BackendSet {
public:
    explicit BackendSet(const RunConfig& cfg) {
        auto optional_token = [](const std::string& raw, const char* key) -> std::optional<std::string> {
            if (raw.empty()) return std::nullopt;
            return interpolate_env(raw, key);
        };
        if (cfg.kfm.embedder == "http") {
            embed_transport_ = std::make_unique<backends::HttpTransport>(
                interpolate_env(cfg.kfm.embedder_url, "kfm.embedder_url"),
                optional_token(cfg.kfm.embedder_token, "kfm.embedder_token"));
            embedder_ = std::make_unique<backends::HttpEmbedder>(*embed_transport_, cfg.kfm.embed_batch);
        } else {
            embedder_ = std::make_unique<backends::HashEmbedder>(cfg.kfm.embedder_dim, cfg.seed);
        }

        if (cfg.kfm.extractor == "llm") {
            extract_transport_ = std::make_unique<backends::HttpTransport>(
                interpolate_env(cfg.kfm.extractor_url, "kfm.extractor_url"),
                optional_token(cfg.kfm.extractor_token, "kfm.extractor_token"));
            extractor_ = std::make_unique<backends::LlmExtractor>(*extract_transport_, cfg.kfm.extractor_model,
                                                                 cfg.model.gen);
        } else if (cfg.kfm.extractor == "rule") {
            extractor_ = std::make_unique<backends::RuleExtractor>();
        } else {
            extractor_ = std::make_unique<backends::NullExtractor>();
        }

        if (cfg.model.backend == "chat") {
            model_transport_ = std::make_unique<backends::HttpTransport>(
                interpolate_env(cfg.model.url, "model.url"), optional_token(cfg.model.token, "model.token"));
            model_ = std::make_unique<backends::ChatVideoLlm>(*model_transport_, cfg.model.name, cfg.model.gen);
        } else {
            model_ = std::make_unique<backends::MockDecoderModel>(marker::default_marker(), cfg.model.marker_word,
                                                                  cfg.vp.text_color);
        }
    }

    Backends handles() { return {embedder_.get(), extractor_.get(), model_.get(), &loader_}; }
    FrameLoader& loader() { return loader_; }
    backends::VideoLlmBackend& model() { return *model_; }

private:
    std::unique_ptr<backends::Transport> embed_transport_, extract_transport_, model_transport_;
    std::unique_ptr<backends::EmbedderBackend> embedder_;
    std::unique_ptr<backends::ExtractorBackend> extractor_;
    std::unique_ptr<backends::VideoLlmBackend> model_;
    synthetic::DefaultFrameLoader loader_;
};

}  // namespace vikey::harness
