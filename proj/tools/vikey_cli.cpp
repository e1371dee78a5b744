// vikey: command-line front end.
//
//   vikey render --config run.toml --out frames/
//   vikey map    --config run.toml
//   vikey eval   --config run.toml [--dry-run] [--report out.json]
//   vikey probe  --model mock
//   vikey poslab --text-len 10 --tokens-per-frame 4 --frames 3
//   vikey attn   --dump with_vp.json [--baseline without_vp.json]
//   vikey synth  --out data/
//
// Exit status: 0 success, 1 a stage or data error, 2 a configuration error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vikey/attention_probe.hpp"
#include "vikey/harness/config.hpp"
#include "vikey/harness/factory.hpp"
#include "vikey/harness/pipeline.hpp"
#include "vikey/harness/synth_dataset.hpp"
#include "vikey/position_lab.hpp"
#include "vikey/probe_bench.hpp"

namespace fs = std::filesystem;
using namespace vikey;

namespace {

constexpr int kExitStage = 1;
constexpr int kExitConfig = 2;

// Flags shared by every config-reading subcommand. They are folded into the
// config as section.key overrides, after --set entries.
struct ConfigFlags {
    std::string path;
    std::vector<std::string> sets;
    std::string preset, vp_position, vp_style, vp_padding, vp_outline;
    std::optional<int> vp_s;
    std::optional<double> tau;
    std::optional<unsigned long long> seed;
    std::optional<int> in_flight;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", path, "Run configuration file (INI-style sections)");
        app->add_option("--set", sets, "Override a config value: section.key=value")->take_all();
        app->add_option("--preset", preset, "Published setting, e.g. llava-video/videomme/20pct");
        app->add_option("--vp-position", vp_position, "TL, TR, BL or BR");
        app->add_option("--vp-style", vp_style, "style1 .. style4");
        app->add_option("--vp-s", vp_s, "Font size divisor s");
        app->add_option("--vp-outline", vp_outline, "true or false");
        app->add_option("--vp-padding", vp_padding, "overlay or letterbox");
        app->add_option("--tau", tau, "KFM similarity threshold");
        app->add_option("--seed", seed, "Run seed");
        app->add_option("--in-flight", in_flight, "Questions processed concurrently");
    }

    harness::RunConfig load() const {
        std::vector<std::pair<std::string, std::string>> ov;
        for (const auto& s : sets) ov.push_back(harness::parse_override(s));
        auto put = [&](const char* key, const std::string& v) {
            if (!v.empty()) ov.emplace_back(key, v);
        };
        put("run.preset", preset);
        put("vp.position", vp_position);
        put("vp.style", vp_style);
        put("vp.padding", vp_padding);
        put("vp.outline", vp_outline);
        if (vp_s) put("vp.s", std::to_string(*vp_s));
        if (tau) put("kfm.tau", std::to_string(*tau));
        if (seed) put("run.seed", std::to_string(*seed));
        if (in_flight) put("run.in_flight", std::to_string(*in_flight));
        // A preset is applied before everything else, whichever way it was given.
        std::stable_partition(ov.begin(), ov.end(), [](const auto& kv) { return kv.first == "run.preset"; });
        if (path.empty()) return harness::parse_config("", ov);
        if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
        return harness::load_config(path, ov);
    }
};

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    write_file(path, body);
}

std::vector<frames::VideoSource> manifest_of(const harness::RunConfig& cfg, const std::string& flag) {
    const auto path = !flag.empty() ? fs::path(flag) : cfg.resolve(cfg.manifest);
    if (flag.empty() && cfg.manifest.empty()) throw ConfigError("no manifest: set run.manifest or pass --manifest");
    return frames::load_manifest(path);
}

std::vector<harness::QuestionRecord> questions_of(const harness::RunConfig& cfg, const std::string& flag) {
    const auto path = !flag.empty() ? fs::path(flag) : cfg.resolve(cfg.questions);
    if (flag.empty() && cfg.questions.empty()) throw ConfigError("no questions: set run.questions or pass --questions");
    return harness::load_questions(path);
}

int report_stage_errors(const std::vector<harness::EvalRecord>& recs) {
    int failed = 0;
    for (const auto& r : recs)
        if (r.error) {
            ++failed;
            std::cerr << "question " << r.question_id << ": " << r.error->stage << " failed: " << r.error->message << "\n";
        }
    return failed;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : text::split(s, ',')) {
        const auto t = std::string(text::trim(part));
        if (t.empty()) continue;
        try {
            out.push_back(std::stoi(t));
        } catch (const std::exception&) {
            throw ConfigError("expected a comma-separated list of integers, got '" + s + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vikey: frame-index visual prompting and keyword-frame mapping toolkit"};
    app.require_subcommand(1);

    // render ---------------------------------------------------------------
    ConfigFlags render_cfg;
    std::string render_manifest, render_out = "rendered";
    auto* render = app.add_subcommand("render", "Sample and label frames for every video in a manifest");
    render_cfg.attach(render);
    render->add_option("--manifest", render_manifest, "Video manifest (overrides run.manifest)");
    render->add_option("-o,--out", render_out, "Output directory");

    // map ------------------------------------------------------------------
    ConfigFlags map_cfg;
    std::string map_manifest, map_questions, map_out;
    auto* map = app.add_subcommand("map", "Extract keywords, map them to frames and print augmented prompts");
    map_cfg.attach(map);
    map->add_option("--manifest", map_manifest, "Video manifest (overrides run.manifest)");
    map->add_option("--questions", map_questions, "Question file, one JSON object per line");
    map->add_option("-o,--out", map_out, "Write JSON lines here instead of stdout");

    // eval -----------------------------------------------------------------
    ConfigFlags eval_cfg;
    std::string eval_manifest, eval_questions, eval_report, eval_text;
    bool dry_run = false, with_timing = false;
    auto* eval = app.add_subcommand("eval", "Run the full pipeline over a question set and report accuracy");
    eval_cfg.attach(eval);
    eval->add_option("--manifest", eval_manifest, "Video manifest (overrides run.manifest)");
    eval->add_option("--questions", eval_questions, "Question file (overrides run.questions)");
    eval->add_option("--report", eval_report, "JSON report path (overrides run.output)");
    eval->add_option("--text", eval_text, "Also write the text table here");
    eval->add_flag("--dry-run", dry_run, "Print the resolved config and planned requests; send nothing");
    eval->add_flag("--timing", with_timing, "Include per-question latency in the JSON report");

    // probe ----------------------------------------------------------------
    ConfigFlags probe_cfg;
    std::string probe_model, probe_counts = "8,16,32,64", probe_positions = "TL,TR,BL,BR", probe_json, probe_size = "224x224";
    int probe_videos = 20, probe_frames = 128;
    bool probe_no_baseline = false;
    auto* probe = app.add_subcommand("probe", "Frame-referencing probe (lookup and reverse lookup)");
    probe_cfg.attach(probe);
    probe->add_option("--model", probe_model, "mock or chat (overrides model.backend)");
    probe->add_option("--videos", probe_videos, "Synthetic videos")->check(CLI::PositiveNumber);
    probe->add_option("--frames-per-video", probe_frames, "Frames per synthetic video")->check(CLI::PositiveNumber);
    probe->add_option("--size", probe_size, "Synthetic frame size WxH");
    probe->add_option("--counts", probe_counts, "Sampled frame counts, comma-separated");
    probe->add_option("--positions", probe_positions, "VP positions, comma-separated");
    probe->add_flag("--no-baseline", probe_no_baseline, "Skip the unlabeled row");
    probe->add_option("--json", probe_json, "Write the JSON report here");

    // poslab ---------------------------------------------------------------
    long long pl_text = 0, pl_tokens = 4, pl_frames = 2, pl_gh = 2, pl_gw = 2;
    std::string pl_mode = "standard", pl_scheme = "rope";
    auto* poslab = app.add_subcommand("poslab", "Position-index tables under positional degradation");
    poslab->add_option("--scheme", pl_scheme, "rope or mrope")->check(CLI::IsMember({"rope", "mrope"}));
    poslab->add_option("--mode", pl_mode, "standard, temporal_only or full_collapse");
    poslab->add_option("--text-len", pl_text, "Text tokens before the video (rope)");
    poslab->add_option("--tokens-per-frame", pl_tokens, "Visual tokens per frame (rope)");
    poslab->add_option("--frames", pl_frames, "Number of frames");
    poslab->add_option("--grid-h", pl_gh, "Patch rows per frame (mrope)");
    poslab->add_option("--grid-w", pl_gw, "Patch columns per frame (mrope)");

    // attn -----------------------------------------------------------------
    std::string attn_dump, attn_baseline;
    auto* attn = app.add_subcommand("attn", "Average attention-to-image per layer from a dump");
    attn->add_option("--dump", attn_dump, "Attention dump (JSON)")->required();
    attn->add_option("--baseline", attn_baseline, "Dump of the same input without VP, for relative change");

    // synth ----------------------------------------------------------------
    ConfigFlags synth_cfg;
    std::string synth_out = "synth", synth_size = "160x120";
    int synth_videos = 8, synth_frames = 48;
    auto* synth = app.add_subcommand("synth", "Write a synthetic manifest, question file and config");
    synth_cfg.attach(synth);
    synth->add_option("-o,--out", synth_out, "Output directory");
    synth->add_option("--videos", synth_videos, "Number of videos")->check(CLI::PositiveNumber);
    synth->add_option("--frames-per-video", synth_frames, "Frames per video")->check(CLI::PositiveNumber);
    synth->add_option("--size", synth_size, "Frame size WxH");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    auto parse_size = [](const std::string& s) {
        int w = 0, h = 0;
        char x = 0;
        if (std::sscanf(s.c_str(), "%d%c%d", &w, &x, &h) != 3 || x != 'x' || w < 1 || h < 1)
            throw ConfigError("size must look like WIDTHxHEIGHT, got '" + s + "'");
        return std::pair{w, h};
    };

    try {
        if (*render) {
            const auto cfg = render_cfg.load();
            const auto sources = manifest_of(cfg, render_manifest);
            synthetic::DefaultFrameLoader loader;
            nlohmann::json index = nlohmann::json::array();
            int warnings = 0;
            for (const auto& src : sources) {
                const auto seq = frames::sample(src, cfg.sampling);
                const auto labeled = cfg.vp_enabled ? vp::apply_sequence(seq, loader, cfg.vp, cfg.in_flight)
                                                    : vp::passthrough_sequence(seq, vp::load_frames(seq, loader));
                const fs::path dir = fs::path(render_out) / src.video_id;
                fs::create_directories(dir);
                nlohmann::json frames_j = nlohmann::json::array();
                const int pad = text::decimal_digits(static_cast<long long>(labeled.size()));
                for (std::size_t i = 0; i < labeled.size(); ++i) {
                    const auto& f = labeled[i];
                    const auto file = dir / (text::zero_pad(f.display_index, pad) + ".png");
                    write_png(file, f.pixels);
                    if (f.warning) {
                        ++warnings;
                        std::cerr << src.video_id << " frame " << f.display_index << ": " << *f.warning << "\n";
                    }
                    frames_j.push_back({{"display_index", f.display_index},
                                        {"source_index", seq.items[i].source_index},
                                        {"label", f.label_text},
                                        {"fontsize", f.fontsize},
                                        {"file", file.string()}});
                }
                index.push_back({{"video_id", src.video_id}, {"frames", std::move(frames_j)}});
            }
            write_file(fs::path(render_out) / "index.json", index.dump(2) + "\n");
            std::cout << "rendered " << sources.size() << " video(s) into " << render_out
                      << (warnings ? " (" + std::to_string(warnings) + " label warnings)" : std::string()) << "\n";
            return 0;
        }

        if (*map) {
            const auto cfg = map_cfg.load();
            const auto sources = manifest_of(cfg, map_manifest);
            const auto questions = questions_of(cfg, map_questions);
            harness::BackendSet be(cfg);
            const auto recs = harness::run_eval(questions, sources, cfg, be.handles(), /*query_model=*/false);
            std::string out;
            for (const auto& r : recs) {
                auto j = harness::record_json(r, false);
                for (const char* k : {"raw_answer", "parsed_choice", "correct"}) j.erase(k);
                out += j.dump() + "\n";
            }
            write_text(map_out, out);
            return report_stage_errors(recs) ? kExitStage : 0;
        }

        if (*eval) {
            const auto cfg = eval_cfg.load();
            const auto sources = manifest_of(cfg, eval_manifest);
            const auto questions = questions_of(cfg, eval_questions);
            if (dry_run) {
                nlohmann::json j = {{"config", harness::config_to_json(cfg)},
                                    {"plan", harness::plan_requests(questions, sources, cfg)}};
                std::cout << j.dump(2) << "\n";
                return 0;
            }
            harness::BackendSet be(cfg);
            const auto recs = harness::run_eval(questions, sources, cfg, be.handles());
            const auto agg = harness::aggregate(recs);
            const auto report_path = !eval_report.empty() ? eval_report
                                     : cfg.output.empty() ? std::string()
                                                          : cfg.resolve(cfg.output).string();
            const auto table = harness::eval_report_text(agg);
            if (!report_path.empty()) write_file(report_path, harness::eval_report_json(recs, with_timing).dump(2) + "\n");
            if (!eval_text.empty()) write_file(eval_text, table);
            std::cout << table;
            return report_stage_errors(recs) ? kExitStage : 0;
        }

        if (*probe) {
            if (!probe_model.empty()) probe_cfg.sets.push_back("model.backend=" + probe_model);
            const auto cfg = probe_cfg.load();
            const auto [w, h] = parse_size(probe_size);
            std::vector<vp::Corner> positions;
            for (const auto& p : text::split(probe_positions, ','))
                if (!text::trim(p).empty()) positions.push_back(vp::parse_corner(text::trim(p)));
            const auto counts = parse_int_list(probe_counts);
            for (int n : counts)
                if (n < 1 || n > probe_frames) throw ConfigError("frame counts must lie in 1..--frames-per-video");
            const auto sources = synthetic::make_sources(static_cast<std::size_t>(probe_videos),
                                                         static_cast<std::size_t>(probe_frames), w, h, cfg.seed);
            harness::BackendSet be(cfg);
            probe::ProbeOptions opt;
            opt.marker_word = cfg.model.marker_word;
            opt.include_no_vp = !probe_no_baseline;
            opt.workers = cfg.in_flight;
            const auto report =
                probe::run_probe_suite(sources, counts, positions, be.model(), cfg.vp, cfg.seed, be.loader(), opt);
            std::cout << probe::report_text(report);
            if (!probe_json.empty()) write_file(probe_json, probe::report_json(report).dump(2) + "\n");
            int failed = 0;
            for (const auto& r : report.results)
                if (r.error) {
                    if (++failed <= 10)
                        std::cerr << r.video_id << " n=" << r.n_frames << " " << probe::row_name(r.position) << ": "
                                  << *r.error << "\n";
                }
            if (failed) std::cerr << failed << " probe item(s) failed\n";
            return failed ? kExitStage : 0;
        }

        if (*poslab) {
            const auto mode = poslab::parse_mode(pl_mode);
            nlohmann::json j;
            if (pl_scheme == "rope") j = poslab::layout_json({pl_text, pl_tokens, pl_frames}, mode);
            else j = poslab::mrope_json(pl_frames, pl_gh, pl_gw, mode);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*attn) {
            const auto dump = attention::load_dump(attn_dump);
            const auto means = attention::layer_mean_attention(dump);
            nlohmann::json j = {{"layers", means}};
            double sum = 0.0;
            for (double m : means) sum += m;
            j["mean"] = sum / static_cast<double>(means.size());
            if (!attn_baseline.empty()) {
                const auto base = attention::layer_mean_attention(attention::load_dump(attn_baseline));
                const auto rc = attention::relative_change(means, base);
                j["baseline_layers"] = base;
                j["relative_change"] = {{"per_layer", rc.per_layer}, {"layer_mean", rc.layer_mean}, {"overall", rc.overall}};
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*synth) {
            const auto cfg = synth_cfg.load();
            const auto [w, h] = parse_size(synth_size);
            harness::SynthOptions opt;
            opt.videos = static_cast<std::size_t>(synth_videos);
            opt.frames_per_video = static_cast<std::size_t>(synth_frames);
            opt.width = w;
            opt.height = h;
            opt.seed = cfg.seed;
            opt.marker_word = cfg.model.marker_word;
            const auto ds = harness::make_eval_dataset(opt, cfg.sampling);
            const fs::path dir(synth_out);
            fs::create_directories(dir);
            write_file(dir / "manifest.json", frames::manifest_to_json(ds.sources).dump(2) + "\n");
            harness::write_questions(dir / "questions.jsonl", ds.questions);
            auto out_cfg = cfg;
            out_cfg.preset.clear();
            out_cfg.manifest = "manifest.json";
            out_cfg.questions = "questions.jsonl";
            out_cfg.output = "report.json";
            const std::string conf = "# Generated by `vikey synth`.\n" + harness::to_ini(out_cfg);
            write_file(dir / "config.toml", conf);
            std::cout << "wrote " << ds.sources.size() << " video(s) and " << ds.questions.size()
                      << " question(s) to " << dir.string() << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return 0;
}
