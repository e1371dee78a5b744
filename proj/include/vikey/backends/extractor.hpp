#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vikey/backends/chat.hpp"
#include "vikey/backends/transport.hpp"
#include "vikey/core/text.hpp"
#include "vikey/kfm.hpp"
#include "vikey/prompting.hpp"

namespace vikey::backends {

using kfm::Keyword;

struct Extraction {
    std::vector<Keyword> keywords;
    std::vector<std::string> warnings;
};

class ExtractorBackend {
public:
    virtual ~ExtractorBackend() = default;
    virtual std::string name() const = 0;
    virtual Extraction extract(std::string_view question, prompting::DatasetStyle profile) = 0;
};

// Extractor that always returns the empty list (VP-only runs).
class NullExtractor final : public ExtractorBackend {
public:
    std::string name() const override { return "none"; }
    Extraction extract(std::string_view, prompting::DatasetStyle) override { return {}; }
};

// Pattern-based extractor: the clause after "after"/"before" up to the next
// punctuation, both sides of "between X and Y", and quoted spans. Every
// keyword is an exact substring with its span attached.
class RuleExtractor final : public ExtractorBackend {
public:
    std::string name() const override { return "rule"; }

    // End of the clause starting at `from`: the next , ? ! ; : or a sentence
    // period (one not following a title abbreviation such as "Mr.").
    static std::size_t clause_end(std::string_view q, std::size_t from) {
        constexpr std::string_view kAbbrev[] = {"mr", "mrs", "ms", "dr", "st", "vs", "prof", "jr", "sr"};
        for (std::size_t i = from; i < q.size(); ++i) {
            const char c = q[i];
            if (c == ',' || c == '?' || c == '!' || c == ';' || c == ':') return i;
            if (c != '.') continue;
            if (i + 1 < q.size() && q[i + 1] != ' ') continue;  // "3.5", "e.g"
            std::size_t w = i;
            while (w > from && text::is_word_char(q[w - 1])) --w;
            const auto word = text::to_lower(q.substr(w, i - w));
            if (std::find(std::begin(kAbbrev), std::end(kAbbrev), word) == std::end(kAbbrev)) return i;
        }
        return q.size();
    }

    Extraction extract(std::string_view q, prompting::DatasetStyle) override {
        std::vector<Keyword> found;
        auto add = [&](std::size_t start, std::size_t end) {
            while (start < end && q[start] == ' ') ++start;
            while (end > start && q[end - 1] == ' ') --end;
            if (start < end) found.push_back({std::string(q.substr(start, end - start)), kfm::Span{start, end}});
        };

        const std::string lower = text::to_lower(q);
        for (std::string_view word : {"after", "before", "between"}) {
            for (auto pos = text::find_whole_word(lower, word); pos;
                 pos = text::find_whole_word(lower, word, *pos + 1)) {
                const std::size_t start = *pos + word.size();
                const std::size_t end = clause_end(q, start);
                if (word == "between") {
                    const auto clause = std::string_view(lower).substr(0, end);
                    if (const auto and_pos = text::find_whole_word(clause, "and", start)) {
                        add(start, *and_pos);
                        add(*and_pos + 3, end);
                        continue;
                    }
                }
                add(start, end);
            }
        }
        for (std::size_t i = 0; i < q.size(); ++i) {
            const char quote = q[i];
            if (quote != '"' && quote != '\'') continue;
            if (quote == '\'' && i > 0 && text::is_word_char(q[i - 1])) continue;  // apostrophe
            const auto close = q.find(quote, i + 1);
            if (close == std::string_view::npos) break;
            if (quote == '\'' && close + 1 < q.size() && text::is_word_char(q[close + 1])) continue;
            add(i + 1, close);
            i = close;
        }

        std::stable_sort(found.begin(), found.end(),
                         [](const Keyword& a, const Keyword& b) { return a.span->start < b.span->start; });
        Extraction out;
        for (auto& kw : found) {
            const bool clash = std::any_of(out.keywords.begin(), out.keywords.end(), [&](const Keyword& k) {
                return k.text == kw.text || (kw.span->start < k.span->end && k.span->start < kw.span->end);
            });
            if (!clash) out.keywords.push_back(std::move(kw));
        }
        return out;
    }
};

// Parses a list literal such as ["a", 'b']. Only a bracketed, comma-separated
// sequence of quoted strings is accepted; anything else yields nullopt.
inline std::optional<std::vector<std::string>> parse_keyword_list(std::string_view s) {
    s = text::trim(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') return std::nullopt;
    std::vector<std::string> out;
    std::size_t i = 1;
    auto skip_ws = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    };
    skip_ws();
    if (s[i] == ']') return i + 1 == s.size() ? std::optional(out) : std::nullopt;
    for (;;) {
        skip_ws();
        if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) return std::nullopt;
        const char quote = s[i++];
        std::string item;
        for (;;) {
            if (i >= s.size()) return std::nullopt;
            const char c = s[i++];
            if (c == quote) break;
            if (c == '\\') {
                if (i >= s.size()) return std::nullopt;
                item += s[i++];
            } else {
                item += c;
            }
        }
        out.push_back(std::move(item));
        skip_ws();
        if (i >= s.size()) return std::nullopt;
        if (s[i] == ',') {
            ++i;
            skip_ws();
            if (i < s.size() && s[i] == ']' && i + 1 == s.size()) return out;  // trailing comma
            continue;
        }
        if (s[i] == ']' && i + 1 == s.size()) return out;
        return std::nullopt;
    }
}

// Extractor backed by a chat endpoint with the keyword-extraction prompts.
class LlmExtractor final : public ExtractorBackend {
public:
    LlmExtractor(Transport& transport, std::string model, chat::GenerationParams gen = {})
        : transport_(transport), model_(std::move(model)), gen_(gen) {}

    std::string name() const override { return "llm"; }

    Extraction extract(std::string_view question, prompting::DatasetStyle profile) override {
        const auto prompt = prompting::extractor_prompt({profile, vp::Corner::BL}, question);
        nlohmann::json messages = nlohmann::json::array();
        messages.push_back(chat::message("system", nlohmann::json::array({chat::text_part(prompt.system)})));
        messages.push_back(chat::message("user", nlohmann::json::array({chat::text_part(prompt.user)})));
        const auto reply = chat::response_text(transport_.post("/chat", chat::request(model_, messages, gen_)));
        return interpret(question, reply);
    }

    // Turns a raw model reply into validated keywords.
    static Extraction interpret(std::string_view question, std::string_view reply) {
        Extraction out;
        const auto phrases = parse_keyword_list(reply);
        if (!phrases) {
            out.warnings.push_back("extractor reply is not a list literal; using []: " +
                                   std::string(reply.substr(0, 120)));
            return out;
        }
        for (const auto& p : *phrases) {
            if (p.empty()) continue;
            const auto pos = question.find(p);
            if (pos == std::string_view::npos) {
                out.warnings.push_back("dropped keyword not found verbatim in question: '" + p + "'");
                continue;
            }
            out.keywords.push_back({p, kfm::Span{pos, pos + p.size()}});
        }
        return out;
    }

private:
    Transport& transport_;
    std::string model_;
    chat::GenerationParams gen_;
};

}  // namespace vikey::backends
