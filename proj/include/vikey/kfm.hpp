#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vikey::kfm {

struct Span {
    std::size_t start = 0;  // byte offsets into the question, [start, end)
    std::size_t end = 0;
    friend bool operator==(const Span&, const Span&) = default;
};

struct Keyword {
    std::string text;
    std::optional<Span> span;
    friend bool operator==(const Keyword&, const Keyword&) = default;
};

using EmbeddingVector = std::vector<double>;

struct Mapping {
    Keyword keyword;
    std::optional<int> frame_display_index;  // present iff mapped
    double score = 0.0;                      // best similarity over frames
    bool mapped = false;
};

// Locates `kw.text` in the question (first case-sensitive occurrence) when no
// span is attached yet.
inline Keyword resolve_span(std::string_view question, Keyword kw) {
    if (kw.span) {
        if (kw.span->end > question.size() || kw.span->start >= kw.span->end ||
            question.substr(kw.span->start, kw.span->end - kw.span->start) != kw.text)
            kw.span.reset();
        else
            return kw;
    }
    if (const auto pos = question.find(kw.text); !kw.text.empty() && pos != std::string_view::npos)
        kw.span = Span{pos, pos + kw.text.size()};
    return kw;
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("cosine_similarity: dimension mismatch (" + std::to_string(u.size()) +
                                    " vs " + std::to_string(v.size()) + ")");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (!(uu > 0.0) || !(vv > 0.0)) throw std::invalid_argument("cosine_similarity: zero-norm vector");
    // sqrt(uu * vv) rather than sqrt(uu) * sqrt(vv): identical inputs give exactly 1.
    const double c = dot / std::sqrt(uu * vv);
    return std::clamp(c, -1.0, 1.0);
}

// Row-major m x F matrix: entry (j, i) is the similarity of keyword j to frame i.
struct SimilarityMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t j, std::size_t i) const { return values.at(j * cols + i); }
    std::span<const double> row(std::size_t j) const {
        return std::span<const double>(values).subspan(j * cols, cols);
    }
};

inline SimilarityMatrix similarity_matrix(const std::vector<EmbeddingVector>& frame_embs,
                                          const std::vector<EmbeddingVector>& keyword_embs) {
    if (frame_embs.empty()) throw std::invalid_argument("similarity_matrix: no frame embeddings");
    SimilarityMatrix m{keyword_embs.size(), frame_embs.size(), {}};
    m.values.resize(m.rows * m.cols);
    for (std::size_t j = 0; j < m.rows; ++j)
        for (std::size_t i = 0; i < m.cols; ++i) m.values[j * m.cols + i] = cosine_similarity(frame_embs[i], keyword_embs[j]);
    return m;
}

// Argmax with ties resolved to the lowest index. Returns a 1-based index.
inline std::pair<int, double> best_frame(std::span<const double> row) {
    if (row.empty()) throw std::invalid_argument("best_frame: empty similarity row");
    std::size_t best = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i])) throw std::invalid_argument("best_frame: non-finite similarity");
        if (row[i] > row[best]) best = i;
    }
    return {static_cast<int>(best + 1), row[best]};
}

// Maps each keyword to its most similar frame when that similarity is >= tau.
// Frame numbering is the 1-based display order of `frame_embs`.
inline std::vector<Mapping> map_keywords(std::string_view question, const std::vector<Keyword>& keywords,
                                         const std::vector<EmbeddingVector>& frame_embs,
                                         const std::vector<EmbeddingVector>& keyword_embs, double tau) {
    if (keywords.size() != keyword_embs.size())
        throw std::invalid_argument("map_keywords: keyword and embedding counts differ");
    if (!(tau >= -1.0 && tau <= 1.0)) throw std::invalid_argument("map_keywords: tau must lie in [-1, 1]");
    std::vector<Mapping> out;
    out.reserve(keywords.size());
    if (keywords.empty()) return out;
    const auto sims = similarity_matrix(frame_embs, keyword_embs);
    for (std::size_t j = 0; j < keywords.size(); ++j) {
        const auto [index, score] = best_frame(sims.row(j));
        Mapping m{resolve_span(question, keywords[j]), std::nullopt, score, score >= tau};
        if (m.mapped) m.frame_display_index = index;
        out.push_back(std::move(m));
    }
    return out;
}

inline std::string index_annotation(int frame) { return " (frame " + std::to_string(frame) + ")"; }

// Rewrites the question so each mapped keyword is followed by " (frame K)".
// Mapped keywords without a locatable span become a trailing note. Spans that
// overlap an earlier keyword's span are skipped with a warning; an identical
// span is annotated once.
inline std::string insert_index(std::string_view question, const std::vector<Mapping>& mappings,
                                std::vector<std::string>* warnings = nullptr) {
    struct Insertion {
        Span span;
        int frame;
    };
    std::vector<Insertion> inserts;
    std::vector<std::string> notes;
    for (const auto& m : mappings) {
        if (!m.mapped || !m.frame_display_index) continue;
        const auto kw = resolve_span(question, m.keyword);
        if (!kw.span) {
            notes.push_back("Note: '" + kw.text + "' corresponds to frame " +
                            std::to_string(*m.frame_display_index) + ".");
            continue;
        }
        bool skip = false;
        for (const auto& prior : inserts) {
            if (prior.span == *kw.span) {
                skip = true;
                break;
            }
            if (kw.span->start < prior.span.end && prior.span.start < kw.span->end) {
                if (warnings)
                    warnings->push_back("keyword '" + kw.text + "' overlaps an earlier keyword span; not annotated");
                skip = true;
                break;
            }
        }
        if (!skip) inserts.push_back({*kw.span, *m.frame_display_index});
    }

    std::string out(question);
    std::sort(inserts.begin(), inserts.end(),
              [](const Insertion& a, const Insertion& b) { return a.span.end > b.span.end; });
    for (const auto& ins : inserts) out.insert(ins.span.end, index_annotation(ins.frame));
    for (const auto& n : notes) out += " " + n;
    return out;
}

}  // namespace vikey::kfm
