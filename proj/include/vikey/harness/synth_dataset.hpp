#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vikey/core/rng.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/harness/questions.hpp"
#include "vikey/probe_bench.hpp"
#include "vikey/synthetic.hpp"

namespace vikey::harness {

struct SynthDataset {
    std::vector<frames::VideoSource> sources;
    std::vector<QuestionRecord> questions;
};

struct SynthOptions {
    std::size_t videos = 8;
    std::size_t frames_per_video = 48;
    int width = 160;
    int height = 120;
    std::uint64_t seed = 0;
    std::string marker_word = "panda";
};

// Procedural videos with the marker on one frame that `sampling` is certain
// to select, plus questions about it:
//   reverse_lookup  which frame shows the marker (4 "frame k" options)
//   lookup          what frame #k shows, for the marked frame and another one
//   temporal        a reverse lookup phrased with an "after ..." clause
inline SynthDataset make_eval_dataset(const SynthOptions& opt, const frames::SamplingSpec& sampling) {
    SynthDataset ds;
    auto sources = synthetic::make_sources(opt.videos, opt.frames_per_video, opt.width, opt.height, opt.seed);
    for (std::size_t v = 0; v < sources.size(); ++v) {
        auto& src = sources[v];
        const auto seq = frames::sample(src, sampling);
        const auto n = seq.size();
        SplitMix64 rng(mix_seed(opt.seed, fnv1a(src.video_id)));
        const int k = static_cast<int>(rng.below(n)) + 1;
        auto& ref = src.frame_paths[seq.items[static_cast<std::size_t>(k - 1)].source_index];
        ref += synthetic::kMarkerSuffix;

        // Up to four distinct display indices, the true one at a random slot.
        std::vector<int> choices{k};
        const std::size_t want = std::min<std::size_t>(4, n);
        while (choices.size() < want) {
            const int c = static_cast<int>(rng.below(n)) + 1;
            if (std::find(choices.begin(), choices.end(), c) == choices.end()) choices.push_back(c);
        }
        const auto slot = rng.below(choices.size());
        std::swap(choices[0], choices[slot]);
        std::vector<std::string> frame_opts;
        for (int c : choices) frame_opts.push_back("frame " + std::to_string(c));
        const std::string gold(1, static_cast<char>('A' + slot));

        const std::string id = src.video_id;
        ds.questions.push_back({id + "_rev", id, probe::reverse_question(opt.marker_word), frame_opts, gold,
                                "reverse_lookup", ""});
        ds.questions.push_back({id + "_after", id,
                                "After the square starts moving, which frame contains the " + opt.marker_word + "?",
                                frame_opts, gold, "temporal", ""});
        const std::vector<std::string> content_opts{"a " + opt.marker_word, "nothing notable"};
        ds.questions.push_back({id + "_look", id, probe::lookup_question(k), content_opts, "A", "lookup", ""});
        if (n > 1) {
            const int other = k == static_cast<int>(n) ? k - 1 : k + 1;
            ds.questions.push_back(
                {id + "_look_other", id, probe::lookup_question(other), content_opts, "B", "lookup", ""});
        }
    }
    ds.sources = std::move(sources);
    return ds;
}

inline void write_questions(const std::filesystem::path& path, const std::vector<QuestionRecord>& qs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    for (const auto& q : qs) out << question_to_json(q).dump() << "\n";
}

}  // namespace vikey::harness
