// Acceptance checks for the whole library. Each criterion prints one
// [PASS]/[FAIL] line; the process exits non-zero if any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "vikey/harness/factory.hpp"
#include "vikey/vikey.hpp"

using namespace vikey;

namespace {

// Pinned tolerances and budgets.
constexpr double kScoreTol = 1e-12;        // KFM score vs oracle
constexpr double kAttentionTol = 1e-12;    // layer mean vs brute force
constexpr double kRelChangeTol = 1e-4;     // 0.081 -> 0.089 vs 0.0988
constexpr double kKfmBudgetS = 5.0;
constexpr double kPositionBudgetS = 1.0;
constexpr double kProbeBudgetS = 60.0;

struct Outcome {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;  // keep the first failure
        ok = false;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------
// KFM

struct KfmInstance {
    std::vector<kfm::EmbeddingVector> frames, keywords;
    double tau = 0;
};

KfmInstance random_instance(SplitMix64& rng) {
    KfmInstance in;
    const auto f = 1 + rng.below(16);
    const auto m = rng.below(6);
    // In one dimension every pair of vectors is parallel, so distinct frames tie
    // exactly in theory and only rounding separates them. Start at two.
    const auto dim = 2 + rng.below(7);
    auto vec = [&] {
        kfm::EmbeddingVector v(dim);
        do {
            for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
        return v;
    };
    for (std::size_t i = 0; i < f; ++i) in.frames.push_back(vec());
    // Exact duplicates exercise the lowest-index tie rule.
    if (f > 1 && rng.below(3) == 0) in.frames[f - 1] = in.frames[rng.below(f - 1)];
    for (std::size_t j = 0; j < m; ++j) in.keywords.push_back(vec());
    // Sometimes reuse a frame vector verbatim as a keyword (similarity exactly 1).
    if (m > 0 && rng.below(4) == 0) in.keywords[0] = in.frames[rng.below(f)];
    in.tau = rng.uniform(-1.0, 1.0);
    return in;
}

std::vector<kfm::Keyword> keyword_list(std::size_t m) {
    std::vector<kfm::Keyword> k;
    for (std::size_t j = 0; j < m; ++j) k.push_back({"kw" + std::to_string(j), std::nullopt});
    return k;
}

// Independent cosine via normalised vectors.
double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    double dot = 0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += (a[i] / na) * (b[i] / nb);
    return dot;
}

Outcome criterion_kfm_oracle() {
    Outcome out;
    SplitMix64 rng(20240501);
    const auto t0 = std::chrono::steady_clock::now();
    int instances = 0, keywords = 0;
    for (; instances < 1000; ++instances) {
        const auto in = random_instance(rng);
        const auto got = kfm::map_keywords("", keyword_list(in.keywords.size()), in.frames, in.keywords, in.tau);
        if (got.size() != in.keywords.size()) {
            out.fail("wrong mapping count");
            continue;
        }
        for (std::size_t j = 0; j < in.keywords.size(); ++j, ++keywords) {
            // Plain double loop. A later frame must beat the current best by more
            // than rounding noise to take over; exact duplicates never do.
            std::size_t best = 0;
            std::vector<double> sims;
            for (const auto& f : in.frames) sims.push_back(oracle_cosine(f, in.keywords[j]));
            for (std::size_t i = 1; i < sims.size(); ++i)
                if (sims[i] > sims[best] + 1e-14) best = i;
            const bool mapped = sims[best] >= in.tau;
            const auto& g = got[j];
            if (g.mapped != mapped) out.fail("mapped flag differs at instance " + std::to_string(instances));
            if (std::abs(g.score - sims[best]) > kScoreTol)
                out.fail("score differs at instance " + std::to_string(instances));
            if (mapped && g.frame_display_index != static_cast<int>(best + 1))
                out.fail("frame index differs at instance " + std::to_string(instances));
            if (!mapped && g.frame_display_index) out.fail("unmapped keyword carries an index");
        }
    }
    const double secs = seconds_since(t0);
    if (secs > kKfmBudgetS) out.fail("took " + fmt("%.2f", secs) + " s");
    if (out.ok)
        out.detail = std::to_string(instances) + " instances, " + std::to_string(keywords) + " keywords, " +
                     fmt("%.3f", secs) + " s";
    return out;
}

Outcome criterion_kfm_properties() {
    Outcome out;
    SplitMix64 rng(77);
    int checked = 0;
    for (int it = 0; it < 500; ++it) {
        auto in = random_instance(rng);
        const auto kws = keyword_list(in.keywords.size());
        double lo = rng.uniform(-1.0, 1.0), hi = rng.uniform(-1.0, 1.0);
        if (lo > hi) std::swap(lo, hi);
        const auto a = kfm::map_keywords("", kws, in.frames, in.keywords, lo);
        const auto b = kfm::map_keywords("", kws, in.frames, in.keywords, hi);
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (b[j].mapped && !a[j].mapped) out.fail("raising tau added a mapping");
            if (b[j].mapped && b[j].frame_display_index != a[j].frame_display_index)
                out.fail("raising tau moved a mapping");
        }

        const double c = rng.uniform(0.1, 100.0);
        auto scaled = in;
        for (auto& v : scaled.frames)
            for (auto& x : v) x *= c;
        for (auto& v : scaled.keywords) {
            const double ck = rng.uniform(0.1, 100.0);  // each keyword its own scale
            for (auto& x : v) x *= ck;
        }
        const auto base = kfm::map_keywords("", kws, in.frames, in.keywords, -1.0);
        const auto sc = kfm::map_keywords("", kws, scaled.frames, scaled.keywords, -1.0);
        for (std::size_t j = 0; j < base.size(); ++j) {
            if (base[j].frame_display_index != sc[j].frame_display_index) {
                // Only acceptable when the top two similarities are a rounding-level tie.
                std::vector<double> s;
                for (const auto& f : in.frames) s.push_back(oracle_cosine(f, in.keywords[j]));
                std::sort(s.rbegin(), s.rend());
                if (s.size() < 2 || s[0] - s[1] > 1e-12) out.fail("positive scaling changed the argmax");
            }
        }
        ++checked;
    }
    if (out.ok) out.detail = std::to_string(checked) + " instances for monotonicity and scale invariance";
    return out;
}

// ---------------------------------------------------------------------------
// Position laws

Outcome criterion_position_laws() {
    using poslab::DegradationMode;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const poslab::RopeLayout ex{10, 4, 3};
    if (poslab::rope_pos(ex, 2, 3, DegradationMode::standard) != 17 ||
        poslab::rope_pos(ex, 2, 3, DegradationMode::temporal_only) != 13 ||
        poslab::rope_pos(ex, 2, 3, DegradationMode::full_collapse) != 10)
        out.fail("worked example is not 17/13/10");
    int layouts = 0;
    for (long long lt = 0; lt <= 8; ++lt)
        for (long long n = 1; n <= 8; ++n)
            for (long long k = 1; k <= 8; ++k, ++layouts) {
                const poslab::RopeLayout l{lt, n, k};
                std::set<long long> seen;
                for (long long f = 1; f <= k; ++f)
                    for (long long j = 0; j < n; ++j) {
                        const auto s = poslab::rope_pos(l, f, j, DegradationMode::standard);
                        if (s != lt + (f - 1) * n + j) out.fail("standard formula");
                        if (!seen.insert(s).second) out.fail("standard positions collide");
                        if (poslab::rope_pos(l, f, j, DegradationMode::temporal_only) !=
                            poslab::rope_pos(l, 1, j, DegradationMode::temporal_only))
                            out.fail("temporal_only varies with frame");
                        if (poslab::rope_pos(l, f, j, DegradationMode::full_collapse) != lt)
                            out.fail("full_collapse is not constant");
                    }
                if (seen.size() != static_cast<std::size_t>(n * k)) out.fail("standard is not injective");
            }
    const double secs = seconds_since(t0);
    if (secs > kPositionBudgetS) out.fail("took " + fmt("%.3f", secs) + " s");
    if (out.ok) out.detail = std::to_string(layouts) + " layouts, " + fmt("%.3f", secs) + " s";
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

struct GoldenRender {
    int w, h;
    std::uint64_t bl_s12, tr_s15_outline;
};

// Recorded from the reference renderer. Frame: synthetic video 7, frame 3.
constexpr GoldenRender kGolden[] = {
    {64, 64, 0xc395efe02c8bb0b6ULL, 0x0a673dedb33ed300ULL},
    {224, 224, 0xc3223ef8daf1287fULL, 0x36acd165552256c2ULL},
    {640, 360, 0x099a257e1512ed21ULL, 0x075b5ad1977ff070ULL},
    {1920, 1080, 0xadd63d5559dcaedbULL, 0x9e4a51d0c0aa661cULL},
};

Outcome criterion_rendering() {
    Outcome out;
    int renders = 0;
    for (const auto& g : kGolden) {
        const auto frame = synthetic::render_frame(7, 3, g.w, g.h);
        for (auto corner : vp::kAllCorners)
            for (int s : {9, 12, 15, 16})
                for (bool o : {false, true}) {
                    vp::VpConfig cfg;
                    cfg.position = corner;
                    cfg.size_divisor = s;
                    cfg.outline = o;
                    const auto where = std::to_string(g.w) + "x" + std::to_string(g.h) + " " +
                                       std::string(vp::to_string(corner)) + " s=" + std::to_string(s) +
                                       " o=" + std::to_string(o) + ": ";
                    const auto a = vp::insert_vp(frame, 7, cfg, 2);
                    const auto b = vp::insert_vp(frame, 7, cfg, 2);
                    ++renders;
                    if (a.pixels.bytes() != b.pixels.bytes()) out.fail(where + "not deterministic");
                    if (a.fontsize != std::min(g.w, g.h) / s) out.fail(where + "fontsize");
                    if (a.warning) out.fail(where + "unexpected shrink");
                    const int m = std::max(2, a.fontsize / 8);
                    if (a.margin != m) out.fail(where + "margin");
                    const auto& box = a.label_box;
                    const bool left = corner == vp::Corner::TL || corner == vp::Corner::BL;
                    const bool top = corner == vp::Corner::TL || corner == vp::Corner::TR;
                    if ((left ? box.x : g.w - box.x - box.w) != m) out.fail(where + "horizontal margin");
                    if ((top ? box.y : g.h - box.y - box.h) != m) out.fail(where + "vertical margin");
                    if (a.pixels.width() != g.w || a.pixels.height() != g.h) out.fail(where + "size changed");
                    for (int y = 0; y < g.h && out.ok; ++y)
                        for (int x = 0; x < g.w; ++x)
                            if (!box.contains(x, y) && !(a.pixels.at(x, y) == frame.at(x, y))) {
                                out.fail(where + "pixel outside label changed");
                                break;
                            }
                    if (corner == vp::Corner::BL && s == 12 && !o && pixel_hash(a.pixels) != g.bl_s12)
                        out.fail(where + "golden hash");
                    if (corner == vp::Corner::TR && s == 15 && o && pixel_hash(a.pixels) != g.tr_s15_outline)
                        out.fail(where + "golden hash");
                }
    }
    if (out.ok) out.detail = std::to_string(renders) + " renders, purity/margins/fontsize/goldens";
    return out;
}

// ---------------------------------------------------------------------------
// Probe benchmark

Outcome criterion_probe() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto sources = synthetic::make_sources(20, 128, 224, 224, 1);
    synthetic::DefaultFrameLoader loader;
    backends::MockDecoderModel model;
    const std::vector<vp::Corner> corners(std::begin(vp::kAllCorners), std::end(vp::kAllCorners));
    const auto report = probe::run_probe_suite(sources, {8, 16, 32, 64}, corners, model, vp::VpConfig{}, 3, loader);
    int cells = 0;
    for (const auto& [key, c] : report.cells()) {
        const auto& [task, row, n] = key;
        ++cells;
        const auto where = std::string(probe::to_string(task)) + " " + row + " N=" + std::to_string(n) + ": ";
        if (c.evaluated != 20 || c.failed != 0) out.fail(where + "not all evaluated");
        if (row != "--") {
            if (c.correct != c.evaluated) out.fail(where + "VP cell below 100");
        } else if (task == probe::Task::reverse_lookup && c.correct_tol1 != 0) {
            out.fail(where + "blind reverse lookup scored");
        }
    }
    const auto j = probe::report_json(report);
    for (std::size_t r = 1; r < 5; ++r)
        for (const char* t : {"lookup", "reverse_lookup", "reverse_lookup_tol1"})
            if (j["tables"][t][r]["average"] != "100.00") out.fail(std::string(t) + " average below 100.00");
    if (j["tables"]["reverse_lookup"][0]["average"] != "0.00") out.fail("no-VP reverse average is not 0.00");
    const double secs = seconds_since(t0);
    if (secs > kProbeBudgetS) out.fail("took " + fmt("%.1f", secs) + " s");
    if (out.ok) out.detail = std::to_string(cells) + " cells, " + fmt("%.2f", secs) + " s";
    return out;
}

Outcome criterion_tolerance() {
    Outcome out;
    for (int answer = 1; answer <= 64; ++answer)
        for (int truth = 1; truth <= 64; ++truth) {
            const auto text = "frame " + std::to_string(answer);
            const bool t0 = probe::score_reverse(text, truth, 0);
            const bool t1 = probe::score_reverse(text, truth, 1);
            if (t0 != (answer == truth)) out.fail("tolerance 0 at " + text);
            if (t1 != (std::abs(answer - truth) <= 1)) out.fail("tolerance 1 at " + text);
            if (t0 && !t1) out.fail("tolerance not monotone");
        }
    if (out.ok) out.detail = "4096 (answer, truth) pairs";
    return out;
}

// ---------------------------------------------------------------------------
// Attention

attention::AttentionDump random_dump(SplitMix64& rng) {
    attention::AttentionDump d;
    d.num_heads = 1 + rng.below(4);
    d.query_rows = 1 + rng.below(5);
    d.key_cols = 2 + rng.below(10);
    d.image_token_mask.resize(d.key_cols);
    for (std::size_t k = 0; k < d.key_cols; ++k) d.image_token_mask[k] = rng.below(2) == 1;
    d.image_token_mask[rng.below(d.key_cols)] = true;
    if (rng.below(2)) d.query_mode = attention::QueryMode::last_row;
    const auto layers = 1 + rng.below(6);
    for (std::size_t l = 0; l < layers; ++l) {
        attention::AttentionLayer layer;
        for (std::size_t h = 0; h < d.num_heads; ++h) {
            std::vector<double> m(d.query_rows * d.key_cols);
            for (std::size_t r = 0; r < d.query_rows; ++r) {
                double sum = 0;
                for (std::size_t c = 0; c < d.key_cols; ++c) sum += m[r * d.key_cols + c] = rng.uniform(0.0, 1.0);
                for (std::size_t c = 0; c < d.key_cols; ++c) m[r * d.key_cols + c] /= sum;
            }
            layer.heads.push_back(std::move(m));
        }
        d.layers.push_back(std::move(layer));
    }
    return d;
}

Outcome criterion_attention() {
    Outcome out;
    SplitMix64 rng(4242);
    for (int it = 0; it < 100; ++it) {
        const auto d = random_dump(rng);
        attention::validate(d);
        const auto got = attention::layer_mean_attention(d);
        const std::size_t first = d.query_mode == attention::QueryMode::last_row ? d.query_rows - 1 : 0;
        for (std::size_t l = 0; l < d.layers.size(); ++l) {
            double sum = 0;
            for (const auto& m : d.layers[l].heads)
                for (std::size_t t = first; t < d.query_rows; ++t)
                    for (std::size_t s = 0; s < d.key_cols; ++s)
                        if (d.image_token_mask[s]) sum += m[t * d.key_cols + s] / double((d.query_rows - first) * d.num_heads);
            if (std::abs(got.at(l) - sum) > kAttentionTol) out.fail("dump " + std::to_string(it) + " layer mismatch");
        }
    }

    // Uniform rows over K = 16 keys with S = 4 image tokens give exactly 1/4.
    attention::AttentionDump u;
    u.num_heads = 2;
    u.query_rows = 3;
    u.key_cols = 16;
    u.image_token_mask.assign(16, false);
    for (int i = 0; i < 4; ++i) u.image_token_mask[static_cast<std::size_t>(i) * 3] = true;
    for (int l = 0; l < 3; ++l)
        u.layers.push_back({std::vector<std::vector<double>>(2, std::vector<double>(48, 1.0 / 16))});
    for (double v : attention::layer_mean_attention(u))
        if (v != 0.25) out.fail("uniform attention is not S/K");

    const auto rc = attention::relative_change(std::vector<double>(28, 0.089), std::vector<double>(28, 0.081));
    if (std::abs(rc.overall - 0.0988) > kRelChangeTol) out.fail("relative change " + fmt("%.5f", rc.overall));
    if (out.ok) out.detail = "100 dumps, uniform S/K, relative change " + fmt("%.4f", rc.overall);
    return out;
}

// ---------------------------------------------------------------------------
// Sampling

frames::VideoSource video_of(std::size_t count, std::optional<double> fps = {}, std::optional<double> dur = {}) {
    frames::VideoSource v{"v", {}, fps, dur};
    for (std::size_t i = 0; i < count; ++i) v.frame_paths.push_back("f" + std::to_string(i));
    return v;
}

// Endpoint-inclusive spacing, computed in floating point.
std::vector<std::size_t> oracle_positions(std::size_t count, std::size_t n) {
    n = std::min(n, count);
    if (n == 1) return {0};
    std::vector<std::size_t> p;
    for (std::size_t i = 0; i < n; ++i)
        p.push_back(static_cast<std::size_t>(std::floor(double(i) * double(count - 1) / double(n - 1))));
    return p;
}

void check_sequence(Outcome& out, const frames::SampledSequence& seq, const std::vector<std::size_t>& want,
                    const std::string& where) {
    if (seq.size() != want.size()) {
        out.fail(where + "size " + std::to_string(seq.size()) + " != " + std::to_string(want.size()));
        return;
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq.items[i].display_index != static_cast<int>(i + 1)) out.fail(where + "display indices not 1..n");
        if (seq.items[i].source_index != want[i]) out.fail(where + "positions");
        if (i && seq.items[i].source_index <= seq.items[i - 1].source_index) out.fail(where + "not increasing");
    }
}

Outcome criterion_sampling() {
    Outcome out;
    // Hand-worked examples.
    if (frames::uniform_positions(10, 4) != std::vector<std::size_t>{0, 3, 6, 9}) out.fail("uniform(10,4)");
    if (frames::uniform_positions(10, 3) != std::vector<std::size_t>{0, 4, 9}) out.fail("uniform(10,3)");
    if (frames::uniform_positions(100, 8) != std::vector<std::size_t>{0, 14, 28, 42, 56, 70, 84, 99})
        out.fail("uniform(100,8)");
    if (frames::sample_fraction(video_of(10), 0.2).size() != 3) out.fail("fraction floor of 3");
    if (frames::sample_fraction(video_of(2), 0.2).size() != 2) out.fail("fraction floor capped by F");
    if (frames::sample_fraction(video_of(100), 0.2).size() != 20) out.fail("fraction 0.2 of 100");
    if (frames::sample_fps_capped(video_of(300, 30.0, 10.0)).size() != 10) out.fail("10 s at 1 fps");
    if (frames::sample_fps_capped(video_of(9000, 30.0, 300.0)).size() != 64) out.fail("cap of 64");

    SplitMix64 rng(8);
    for (int it = 0; it < 1000; ++it) {
        const auto count = 1 + rng.below(500);
        const auto n = 1 + rng.below(80);
        const double fraction = rng.uniform(0.01, 1.0);
        const auto where = "F=" + std::to_string(count) + " n=" + std::to_string(n) + ": ";
        const auto video = video_of(count);

        const auto fixed = frames::sample_fixed(video, n);
        check_sequence(out, fixed, oracle_positions(count, n), where);
        if (fixed.items.front().source_index != 0) out.fail(where + "first frame not included");
        if (std::min(n, count) > 1 && fixed.items.back().source_index != count - 1)
            out.fail(where + "last frame not included");

        const auto want = std::min<std::size_t>(
            std::max<std::size_t>(static_cast<std::size_t>(std::floor(double(count) * fraction + 1e-9)), 3), count);
        const auto frac = frames::sample_fraction(video, fraction);
        check_sequence(out, frac, oracle_positions(count, want), where + "fraction ");

        const double fps = rng.uniform(10.0, 60.0);
        const auto capped = frames::sample_fps_capped(video_of(count, fps, double(count) / fps), 1.0, 64);
        if (capped.size() > 64) out.fail(where + "cap exceeded");
        if (capped.size() < 1) out.fail(where + "empty fps sample");
    }
    if (out.ok) out.detail = "1000 random (F, n, fraction) triples plus 8 worked examples";
    return out;
}

// ---------------------------------------------------------------------------
// Prompts

std::string golden(const std::string& name) {
    return read_file(std::string(VIKEY_FIXTURES) + "/prompts/" + name);
}

Outcome criterion_prompts() {
    using prompting::DatasetStyle;
    Outcome out;
    const prompting::PromptProfile bl_mv{DatasetStyle::mvbench, vp::Corner::BL};
    if (prompting::system_prompt(bl_mv) != golden("system_bottom-left.txt")) out.fail("system prompt");

    struct Case {
        DatasetStyle style;
        const char* file;
        std::string question;
        std::vector<std::string> options;
        std::string task_type;
        const char* closing;
    };
    const std::vector<Case> cases{
        {DatasetStyle::tempcompass, "user_tempcompass.txt", "Which event happens first to the skillet?",
         {"Burning in fire", "None of both", "Smoking"}, "multi-choice", "Please directly give the best option."},
        {DatasetStyle::mvbench, "user_mvbench.txt", "What happened after the person took the food?",
         {"Ate the medicine.", "Tidied up the blanket.", "Put down the cup/glass/bottle.", "Took the box."}, "",
         "Only give the best option."},
        {DatasetStyle::videomme, "user_videomme.txt", "What kind of communication is listed before Semaphore?",
         {"Telephone.", "Homing pigeon.", "Telegraph.", "Pony express."}, "", "The best answer is:"},
        {DatasetStyle::longvideobench, "user_longvideobench.txt",
         "What is the color of the first piece of clothing shown in the video?",
         {"white", "purple", "red", "olive", "black"}, "",
         "Answer with the option's letter from the given choices directly."},
    };
    for (const auto& c : cases) {
        const prompting::PromptProfile p{c.style, vp::Corner::BL};
        const auto got = prompting::user_prompt(p, c.question, c.options, c.task_type);
        if (got != golden(c.file)) out.fail(std::string(c.file) + " differs");
        if (!got.ends_with(std::string("\n") + c.closing)) out.fail(std::string(c.file) + " closing line");
        const auto ex = prompting::extractor_prompt(p, "What kind of communication is listed before Semaphore?");
        if (ex.system != golden("extractor_system.txt")) out.fail("extractor system prompt");
        if (ex.user != golden("extractor_user_" + std::string(prompting::to_string(c.style)) + "" + ".txt"))
            out.fail("extractor prompt for " + std::string(prompting::to_string(c.style)));
    }
    if (out.ok) out.detail = "system, 4 user and 4 extractor templates byte-identical";
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end determinism

std::string mock_eval_report() {
    harness::RunConfig cfg;
    cfg.in_flight = 4;
    cfg.kfm.tau = 0.2;
    cfg.kfm.extractor = "rule";
    harness::SynthOptions opt;
    opt.videos = 6;
    opt.frames_per_video = 40;
    opt.seed = 11;
    const auto ds = harness::make_eval_dataset(opt, cfg.sampling);
    harness::BackendSet backends(cfg);
    const auto records = harness::run_eval(ds.questions, ds.sources, cfg, backends.handles());
    return harness::eval_report_json(records).dump(2);
}

Outcome criterion_determinism() {
    Outcome out;
    const auto a = mock_eval_report();
    const auto b = mock_eval_report();
    if (a != b) out.fail("reports differ");
    if (a.find("latency") != std::string::npos) out.fail("report contains timing");
    if (out.ok) out.detail = "two runs, " + std::to_string(a.size()) + " identical bytes";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"KFM matches a brute-force oracle", criterion_kfm_oracle},
        {"KFM tau monotonicity and scale invariance", criterion_kfm_properties},
        {"positional degradation laws", criterion_position_laws},
        {"visual prompt rendering grid", criterion_rendering},
        {"probe benchmark with the mock decoder", criterion_probe},
        {"reverse lookup tolerance", criterion_tolerance},
        {"attention aggregation", criterion_attention},
        {"frame sampling laws", criterion_sampling},
        {"prompt templates match goldens", criterion_prompts},
        {"mock evaluation is reproducible", criterion_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += o.ok ? 0 : 1;
        std::printf("[%s] %zu %s (%s)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
