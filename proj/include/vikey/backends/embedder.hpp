#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vikey/backends/transport.hpp"
#include "vikey/core/rng.hpp"
#include "vikey/image.hpp"
#include "vikey/kfm.hpp"

namespace vikey::backends {

using kfm::EmbeddingVector;

// Shared text/image embedding space (the CLIP role).
class EmbedderBackend {
public:
    virtual ~EmbedderBackend() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) = 0;
    virtual std::vector<EmbeddingVector> embed_images(const std::vector<Image>& images) = 0;
};

// Deterministic content-hash embedder: each distinct input maps to a seeded
// pseudo-random unit vector. Identical content gives an identical vector.
class HashEmbedder final : public EmbedderBackend {
public:
    HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
        if (dim < 2) throw std::invalid_argument("hash embedder needs dim >= 2");
    }

    std::string name() const override { return "hash"; }
    std::size_t dim() const override { return dim_; }

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(vector_for(fnv1a(t, fnv1a("text:"))));
        return out;
    }

    std::vector<EmbeddingVector> embed_images(const std::vector<Image>& images) override {
        std::vector<EmbeddingVector> out;
        out.reserve(images.size());
        for (const auto& img : images) out.push_back(vector_for(fnv1a_u64(pixel_hash(img), fnv1a("image:"))));
        return out;
    }

private:
    EmbeddingVector vector_for(std::uint64_t content) const {
        SplitMix64 rng(mix_seed(seed_, content));
        EmbeddingVector v(dim_);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& x : v) {
                x = rng.uniform(-1.0, 1.0);
                norm2 += x * x;
            }
        } while (!(norm2 > 1e-12));
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

    std::size_t dim_;
    std::uint64_t seed_;
};

// Client for the embedding wire protocol:
//   POST /embed {"texts": [...]} or {"images": [base64 PNG, ...]}
//   -> {"vectors": [[...], ...], "dim": d}
// Inputs are sent in batches of `batch_size`.
class HttpEmbedder final : public EmbedderBackend {
public:
    HttpEmbedder(Transport& transport, std::size_t batch_size = 32, std::optional<std::size_t> expected_dim = {})
        : transport_(transport), batch_size_(batch_size), dim_(expected_dim) {
        if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
    }

    std::string name() const override { return "http"; }

    std::size_t dim() const override {
        std::lock_guard lock(mutex_);
        if (!dim_) throw std::logic_error("http embedder: dimension unknown before the first response");
        return *dim_;
    }

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) override {
        return embed_batched(texts.size(), "texts", [&](std::size_t i) { return nlohmann::json(texts[i]); });
    }

    std::vector<EmbeddingVector> embed_images(const std::vector<Image>& images) override {
        return embed_batched(images.size(), "images",
                             [&](std::size_t i) { return nlohmann::json(base64_encode(encode_png(images[i]))); });
    }

    std::size_t requests_issued() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    template <typename Item>
    std::vector<EmbeddingVector> embed_batched(std::size_t count, const char* field, Item&& item) {
        std::vector<EmbeddingVector> out;
        out.reserve(count);
        for (std::size_t start = 0; start < count; start += batch_size_) {
            const std::size_t end = std::min(count, start + batch_size_);
            nlohmann::json payload = nlohmann::json::array();
            for (std::size_t i = start; i < end; ++i) payload.push_back(item(i));
            const auto response = transport_.post("/embed", {{field, std::move(payload)}});
            {
                std::lock_guard lock(mutex_);
                ++requests_;
            }
            const auto& vectors = response.at("vectors");
            if (!vectors.is_array() || vectors.size() != end - start)
                throw FormatError("embedding response: expected " + std::to_string(end - start) + " vectors");
            const auto declared = response.value("dim", vectors.empty() ? 0 : vectors[0].size());
            for (std::size_t k = 0; k < vectors.size(); ++k) {
                auto v = vectors[k].get<EmbeddingVector>();
                std::lock_guard lock(mutex_);
                if (!dim_) dim_ = declared;
                if (v.size() != *dim_ || declared != *dim_)
                    throw FormatError("embedding response: item " + std::to_string(start + k) + " has dimension " +
                                      std::to_string(v.size()) + ", expected " + std::to_string(*dim_));
                out.push_back(std::move(v));
            }
        }
        return out;
    }

    Transport& transport_;
    std::size_t batch_size_;
    mutable std::mutex mutex_;
    std::optional<std::size_t> dim_;
    std::size_t requests_ = 0;
};

}  // namespace vikey::backends
