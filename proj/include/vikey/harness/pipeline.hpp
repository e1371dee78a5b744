#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vikey/backends/embedder.hpp"
#include "vikey/backends/extractor.hpp"
#include "vikey/backends/videollm.hpp"
#include "vikey/core/parallel.hpp"
#include "vikey/core/text.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/harness/config.hpp"
#include "vikey/harness/questions.hpp"
#include "vikey/kfm.hpp"
#include "vikey/prompting.hpp"
#include "vikey/visual_prompter.hpp"

namespace vikey::harness {

// Non-owning handles to everything a run talks to.
struct Backends {
    backends::EmbedderBackend* embedder = nullptr;
    backends::ExtractorBackend* extractor = nullptr;
    backends::VideoLlmBackend* model = nullptr;
    FrameLoader* loader = nullptr;
};

struct StageError {
    std::string stage;  // sample, render, extract, embed, map, prompt, model
    std::string message;
};

struct EvalRecord {
    std::string question_id;
    std::string category;
    std::string system_prompt;
    std::string augmented_prompt;  // full user prompt sent to the model
    std::vector<kfm::Mapping> mappings;
    std::size_t frame_count = 0;
    std::uint64_t frames_digest = 0;  // identifies the exact labelled pixels sent
    std::string raw_answer;
    std::optional<char> parsed_choice;
    std::optional<bool> correct;  // unset when unevaluated or ungraded
    double latency_ms = 0.0;
    std::vector<std::string> warnings;
    std::optional<StageError> error;

    bool evaluated() const { return !error.has_value(); }
};

// First standalone upper-case option letter in range (e.g. "B", "B.", "(B)");
// failing that, the longest option text found as a whole phrase,
// case-insensitively. Options may carry their own "X. " prefix.
inline std::optional<char> parse_choice(std::string_view answer, const std::vector<std::string>& options) {
    if (options.empty()) return std::nullopt;
    const char last = static_cast<char>('A' + std::min<std::size_t>(options.size(), 26) - 1);
    for (std::size_t i = 0; i < answer.size(); ++i) {
        const char c = answer[i];
        if (c < 'A' || c > last) continue;
        const bool left_ok = i == 0 || !text::is_word_char(answer[i - 1]);
        const bool right_ok = i + 1 == answer.size() || !text::is_word_char(answer[i + 1]);
        if (left_ok && right_ok) return c;
    }
    const auto hay = text::to_lower(answer);
    std::optional<char> best;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < options.size() && i < 26; ++i) {
        const auto opt = text::to_lower(text::trim(prompting::strip_option_letter(options[i], i)));
        if (opt.empty() || opt.size() <= best_len) continue;
        if (text::find_whole_word(hay, opt)) {
            best = prompting::option_letter(i);
            best_len = opt.size();
        }
    }
    return best;
}

// Gold comparison: option letter for multiple choice, whole-phrase
// containment for free-text answers, nothing when no gold is given.
inline std::optional<bool> grade(const QuestionRecord& q, std::string_view raw, std::optional<char> parsed) {
    if (q.answer.empty()) return std::nullopt;
    if (!q.options.empty()) return parsed && *parsed == q.answer[0];
    return text::find_whole_word(text::to_lower(raw), text::to_lower(q.answer)).has_value();
}

namespace detail {

template <typename Fn>
bool stage(EvalRecord& rec, const char* name, Fn&& fn) {
    try {
        fn();
        return true;
    } catch (const std::exception& e) {
        rec.error = StageError{name, e.what()};
        return false;
    }
}

}  // namespace detail

// Frames a question sees: a function of the sampling plan and VP settings only.
inline std::vector<vp::LabeledFrame> render_frames(const frames::VideoSource& source, const RunConfig& cfg,
                                                   FrameLoader& loader, std::vector<std::string>* warnings = nullptr) {
    const auto seq = frames::sample(source, cfg.sampling);
    auto pixels = vp::load_frames(seq, loader);
    auto out = cfg.vp_enabled ? vp::apply_sequence(seq, pixels, cfg.vp) : vp::passthrough_sequence(seq, std::move(pixels));
    if (warnings)
        for (const auto& f : out)
            if (f.warning) warnings->push_back("frame " + std::to_string(f.display_index) + ": " + *f.warning);
    return out;
}

inline std::uint64_t frames_digest(const std::vector<vp::LabeledFrame>& frames) {
    std::uint64_t h = fnv1a("frames");
    for (const auto& f : frames) h = fnv1a_u64(pixel_hash(f.pixels), fnv1a_u64(static_cast<std::uint64_t>(f.display_index), h));
    return h;
}

// Runs one question end to end. Any stage failure is captured on the record
// (with the stage name) instead of propagating. With `query_model` false the
// run stops once the prompts are assembled.
inline EvalRecord run_pipeline(const QuestionRecord& q, const frames::VideoSource* source, const RunConfig& cfg,
                               const Backends& be, bool query_model = true) {
    const auto started = std::chrono::steady_clock::now();
    EvalRecord rec;
    rec.question_id = q.id;
    rec.category = q.category;
    const auto profile = cfg.profile();

    std::vector<vp::LabeledFrame> frames;
    if (!detail::stage(rec, "sample", [&] {
            if (!source) throw FormatError("unknown video_id '" + q.video_id + "'");
            if (!be.loader) throw std::logic_error("a frame loader is required");
            if (query_model && !be.model) throw std::logic_error("a model backend is required");
        }))
        return rec;
    if (!detail::stage(rec, "render", [&] {
            frames = render_frames(*source, cfg, *be.loader, &rec.warnings);
            rec.frame_count = frames.size();
            rec.frames_digest = frames_digest(frames);
        }))
        return rec;

    // tau = 1 disables mapping outright; extraction and embedding are skipped.
    const bool kfm_enabled = cfg.kfm.tau < 1.0 && be.extractor && be.embedder;
    std::vector<kfm::Keyword> keywords;
    if (kfm_enabled && !detail::stage(rec, "extract", [&] {
            auto ex = be.extractor->extract(q.question, cfg.prompt_profile);
            keywords = std::move(ex.keywords);
            for (auto& w : ex.warnings) rec.warnings.push_back("extract: " + w);
        }))
        return rec;

    std::string question = q.question;
    if (!keywords.empty()) {
        std::vector<kfm::EmbeddingVector> frame_embs, kw_embs;
        if (!detail::stage(rec, "embed", [&] {
                std::vector<Image> imgs;
                imgs.reserve(frames.size());
                for (const auto& f : frames) imgs.push_back(f.pixels);
                frame_embs = be.embedder->embed_images(imgs);
                std::vector<std::string> texts;
                for (const auto& k : keywords) texts.push_back(k.text);
                kw_embs = be.embedder->embed_texts(texts);
            }))
            return rec;
        if (!detail::stage(rec, "map", [&] {
                rec.mappings = kfm::map_keywords(q.question, keywords, frame_embs, kw_embs, cfg.kfm.tau);
                question = kfm::insert_index(q.question, rec.mappings, &rec.warnings);
            }))
            return rec;
    }

    if (!detail::stage(rec, "prompt", [&] {
            rec.system_prompt = cfg.vp_enabled ? prompting::system_prompt(profile) : std::string(prompting::kBaseSystem);
            rec.augmented_prompt = prompting::user_prompt(profile, question, q.options, q.task_type);
        }))
        return rec;
    if (!query_model) return rec;
    if (!detail::stage(rec, "model", [&] { rec.raw_answer = be.model->answer(rec.system_prompt, rec.augmented_prompt, frames); }))
        return rec;

    rec.parsed_choice = parse_choice(rec.raw_answer, q.options);
    rec.correct = grade(q, rec.raw_answer, rec.parsed_choice);
    rec.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

// Processes questions with at most cfg.in_flight running at once. Output order
// matches input order.
inline std::vector<EvalRecord> run_eval(const std::vector<QuestionRecord>& questions,
                                        const std::vector<frames::VideoSource>& sources, const RunConfig& cfg,
                                        const Backends& be, bool query_model = true) {
    std::map<std::string, const frames::VideoSource*> by_id;
    for (const auto& s : sources) by_id[s.video_id] = &s;
    std::vector<EvalRecord> out(questions.size());
    parallel_for(questions.size(), cfg.in_flight, [&](std::size_t i) {
        const auto it = by_id.find(questions[i].video_id);
        out[i] = run_pipeline(questions[i], it == by_id.end() ? nullptr : it->second, cfg, be, query_model);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation and reports.

struct CategoryTally {
    long long evaluated = 0;  // graded and completed
    long long correct = 0;
    long long unevaluated = 0;  // a stage failed
    long long ungraded = 0;     // completed, no gold answer

    std::string accuracy() const { return text::percent_2dp(correct, evaluated); }
};

struct Aggregate {
    std::map<std::string, CategoryTally> categories;  // only categories with evaluated > 0
    CategoryTally total;
    std::vector<std::string> notes;
};

// Integer tallies throughout; percentages only at formatting time. Independent
// of record order.
inline Aggregate aggregate(const std::vector<EvalRecord>& records) {
    std::map<std::string, CategoryTally> all;
    Aggregate a;
    for (const auto& r : records) {
        auto& t = all[r.category];
        for (auto* tally : {&t, &a.total}) {
            if (!r.evaluated()) ++tally->unevaluated;
            else if (!r.correct) ++tally->ungraded;
            else {
                ++tally->evaluated;
                tally->correct += *r.correct ? 1 : 0;
            }
        }
    }
    for (auto& [name, t] : all) {
        if (t.evaluated == 0) {
            a.notes.push_back("category '" + name + "': 0 evaluated (" + std::to_string(t.unevaluated) +
                              " unevaluated, " + std::to_string(t.ungraded) + " ungraded); omitted");
            continue;
        }
        a.categories.emplace(name, t);
    }
    return a;
}

inline nlohmann::json tally_json(const CategoryTally& t) {
    return {{"accuracy", t.accuracy()},
            {"correct", t.correct},
            {"evaluated", t.evaluated},
            {"unevaluated", t.unevaluated},
            {"ungraded", t.ungraded}};
}

inline nlohmann::json aggregate_json(const Aggregate& a) {
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [name, t] : a.categories) cats[name] = tally_json(t);
    return {{"categories", cats}, {"total", tally_json(a.total)}, {"notes", a.notes}};
}

inline nlohmann::json record_json(const EvalRecord& r, bool include_timing) {
    nlohmann::json maps = nlohmann::json::array();
    for (const auto& m : r.mappings) {
        nlohmann::json j = {{"keyword", m.keyword.text}, {"score", m.score}, {"mapped", m.mapped}};
        j["frame"] = m.frame_display_index ? nlohmann::json(*m.frame_display_index) : nlohmann::json(nullptr);
        maps.push_back(std::move(j));
    }
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.frames_digest));
    nlohmann::json j = {{"id", r.question_id},
                        {"category", r.category},
                        {"system_prompt", r.system_prompt},
                        {"augmented_prompt", r.augmented_prompt},
                        {"mappings", maps},
                        {"frame_count", r.frame_count},
                        {"frames_digest", digest},
                        {"raw_answer", r.raw_answer},
                        {"warnings", r.warnings}};
    j["parsed_choice"] = r.parsed_choice ? nlohmann::json(std::string(1, *r.parsed_choice)) : nlohmann::json(nullptr);
    j["correct"] = r.correct ? nlohmann::json(*r.correct) : nlohmann::json(nullptr);
    j["error"] = r.error ? nlohmann::json({{"stage", r.error->stage}, {"message", r.error->message}})
                         : nlohmann::json(nullptr);
    if (include_timing) j["latency_ms"] = r.latency_ms;
    return j;
}

// Machine-readable report. Latency is left out unless asked for, so reports
// from identical runs compare byte for byte.
inline nlohmann::json eval_report_json(const std::vector<EvalRecord>& records, bool include_timing = false) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) recs.push_back(record_json(r, include_timing));
    return {{"summary", aggregate_json(aggregate(records))}, {"records", std::move(recs)}};
}

inline std::string eval_report_text(const Aggregate& a) {
    std::size_t w = 8;
    for (const auto& [name, _] : a.categories) w = std::max(w, name.size());
    auto row = [&](const std::string& name, const std::string& acc, const std::string& c, const std::string& e,
                   const std::string& u) {
        std::string s = name + std::string(w - std::min(w, name.size()) + 2, ' ');
        for (const auto* col : {&acc, &c, &e, &u}) s += std::string(12 - std::min<std::size_t>(12, col->size()), ' ') + *col;
        return s + "\n";
    };
    std::string out = row("category", "accuracy", "correct", "evaluated", "unevaluated");
    for (const auto& [name, t] : a.categories)
        out += row(name, t.accuracy(), std::to_string(t.correct), std::to_string(t.evaluated),
                   std::to_string(t.unevaluated));
    out += row("total", a.total.accuracy(), std::to_string(a.total.correct), std::to_string(a.total.evaluated),
               std::to_string(a.total.unevaluated));
    for (const auto& n : a.notes) out += "note: " + n + "\n";
    return out;
}

// Dry-run plan: what an eval would send, without loading a single frame.
inline nlohmann::json plan_requests(const std::vector<QuestionRecord>& questions,
                                    const std::vector<frames::VideoSource>& sources, const RunConfig& cfg) {
    std::map<std::string, const frames::VideoSource*> by_id;
    for (const auto& s : sources) by_id[s.video_id] = &s;
    long long frames_total = 0, unresolved = 0, image_batches = 0;
    for (const auto& q : questions) {
        const auto it = by_id.find(q.video_id);
        if (it == by_id.end()) {
            ++unresolved;
            continue;
        }
        const auto n = static_cast<long long>(frames::sample(*it->second, cfg.sampling).size());
        frames_total += n;
        const auto batch = static_cast<long long>(cfg.kfm.embed_batch);
        image_batches += (n + batch - 1) / batch;
    }
    const long long resolvable = static_cast<long long>(questions.size()) - unresolved;
    const bool kfm_on = cfg.kfm.tau < 1.0 && cfg.kfm.extractor != "none";
    nlohmann::json req = {
        {"model", {{"backend", cfg.model.backend}, {"requests", resolvable}}},
        {"extractor",
         {{"backend", cfg.kfm.extractor}, {"requests", kfm_on && cfg.kfm.extractor == "llm" ? resolvable : 0}}},
        {"embedder",
         {{"backend", cfg.kfm.embedder},
          {"max_image_requests", kfm_on && cfg.kfm.embedder == "http" ? image_batches : 0},
          {"max_text_requests", kfm_on && cfg.kfm.embedder == "http" ? resolvable : 0}}}};
    return {{"questions", questions.size()},
            {"videos", sources.size()},
            {"unresolved_questions", unresolved},
            {"frames_total", frames_total},
            {"requests", std::move(req)}};
}

}  // namespace vikey::harness
