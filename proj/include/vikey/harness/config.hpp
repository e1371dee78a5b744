#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vikey/backends/chat.hpp"
#include "vikey/core/error.hpp"
#include "vikey/core/text.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/prompting.hpp"
#include "vikey/visual_prompter.hpp"

namespace vikey::harness {

// Published (tau, s, o) settings per model, dataset and sampling regime.
struct Preset {
    std::string_view model;    // gpt4.1, qwenvl, llava-video, llava-onevision
    std::string_view dataset;  // tempcompass, mvbench, videomme, longvideobench
    std::string_view regime;   // 64f (1 fps, at most 64 frames) or 20pct
    double tau;
    int s;
    bool outline;
};

// clang-format off
inline constexpr Preset kPresets[] = {
    {"gpt4.1",          "tempcompass",    "64f",   1.00, 12, false},
    {"gpt4.1",          "mvbench",        "64f",   0.18,  9, false},
    {"qwenvl",          "tempcompass",    "64f",   1.00, 12, false},
    {"qwenvl",          "mvbench",        "64f",   0.20,  9, false},
    {"qwenvl",          "videomme",       "64f",   0.15, 12, false},
    {"qwenvl",          "longvideobench", "64f",   0.15, 15, false},
    {"llava-video",     "tempcompass",    "64f",   1.00, 12, false},
    {"llava-video",     "mvbench",        "64f",   0.18,  9, false},
    {"llava-video",     "videomme",       "64f",   0.23, 12, false},
    {"llava-video",     "longvideobench", "64f",   0.22, 12, true},
    {"llava-onevision", "tempcompass",    "64f",   1.00, 12, false},
    {"llava-onevision", "mvbench",        "64f",   0.18,  9, true},
    {"llava-onevision", "videomme",       "64f",   0.28, 15, true},
    {"llava-onevision", "longvideobench", "64f",   0.18, 12, true},
    {"gpt4.1",          "tempcompass",    "20pct", 1.00, 12, false},
    {"gpt4.1",          "mvbench",        "20pct", 0.18,  9, false},
    {"qwenvl",          "tempcompass",    "20pct", 1.00, 12, false},
    {"qwenvl",          "mvbench",        "20pct", 0.20,  9, false},
    {"qwenvl",          "videomme",       "20pct", 0.32, 12, false},
    {"qwenvl",          "longvideobench", "20pct", 0.22, 15, false},
    {"llava-video",     "tempcompass",    "20pct", 1.00, 12, false},
    {"llava-video",     "mvbench",        "20pct", 0.18,  9, false},
    {"llava-video",     "videomme",       "20pct", 0.24, 12, false},
    {"llava-video",     "longvideobench", "20pct", 0.22, 16, false},
    {"llava-onevision", "tempcompass",    "20pct", 1.00, 12, false},
    {"llava-onevision", "mvbench",        "20pct", 0.20, 12, true},
    {"llava-onevision", "videomme",       "20pct", 0.27,  9, true},
    {"llava-onevision", "longvideobench", "20pct", 0.24, 12, true},
};
// clang-format on

inline std::string preset_name(const Preset& p) {
    return std::string(p.model) + "/" + std::string(p.dataset) + "/" + std::string(p.regime);
}

inline const Preset* find_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (preset_name(p) == name) return &p;
    return nullptr;
}

// Expands ${VAR} references from the process environment. An unset variable
// is a configuration error naming both the variable and the key.
inline std::string interpolate_env(std::string_view value, std::string_view key = {}) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        const auto open = value.find("${", i);
        if (open == std::string_view::npos) {
            out.append(value.substr(i));
            break;
        }
        out.append(value.substr(i, open - i));
        const auto close = value.find('}', open + 2);
        if (close == std::string_view::npos)
            throw ConfigError("unterminated ${...} in " + std::string(key.empty() ? "value" : key));
        const std::string var(value.substr(open + 2, close - open - 2));
        const char* env = var.empty() ? nullptr : std::getenv(var.c_str());
        if (!env)
            throw ConfigError("environment variable '" + var + "' referenced by " +
                              std::string(key.empty() ? "config" : key) + " is not set");
        out += env;
        i = close + 1;
    }
    return out;
}

struct KfmSettings {
    double tau = 0.2;
    std::string embedder = "hash";  // hash | http
    std::string embedder_url;       // may hold ${VAR}; expanded when the backend is built
    std::string embedder_token;
    std::size_t embedder_dim = 64;
    std::size_t embed_batch = 32;
    std::string extractor = "rule";  // rule | llm | none
    std::string extractor_url;
    std::string extractor_token;
    std::string extractor_model;
};

struct ModelSettings {
    std::string backend = "mock";  // mock | chat
    std::string url;
    std::string token;
    std::string name;
    backends::chat::GenerationParams gen;
    std::string marker_word = "panda";
};

struct RunConfig {
    std::string preset;
    frames::SamplingSpec sampling;
    vp::VpConfig vp;
    bool vp_enabled = true;
    KfmSettings kfm;
    ModelSettings model;
    prompting::DatasetStyle prompt_profile = prompting::DatasetStyle::generic;
    std::size_t in_flight = 4;
    std::uint64_t seed = 0;
    std::string manifest;   // relative paths resolve against base_dir
    std::string questions;
    std::string output;
    std::filesystem::path base_dir = ".";

    prompting::PromptProfile profile() const { return {prompt_profile, vp.position}; }

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }
};

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"run", {"preset", "in_flight", "seed", "manifest", "questions", "output"}},
        {"sampling", {"mode", "target_fps", "cap", "fraction", "min_frames", "n", "fraction_pool"}},
        {"vp", {"enabled", "position", "style", "s", "outline", "padding", "margin"}},
        {"kfm",
         {"tau", "embedder", "embedder_url", "embedder_token", "embedder_dim", "embed_batch", "extractor",
          "extractor_url", "extractor_token", "extractor_model"}},
        {"model", {"backend", "url", "token", "name", "max_tokens", "temperature", "marker_word"}},
        {"prompt", {"profile"}},
    };
    return keys;
}

// Drops a trailing "; ..." or "# ..." comment. The marker must follow
// whitespace and sit outside quotes, so URLs and quoted values survive.
inline std::string_view strip_inline_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if ((c == ';' || c == '#') && i > 0 && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
            return line.substr(0, i);
        }
    }
    return line;
}

inline std::string unquote(std::string_view v) {
    v = text::trim(v);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
        v = v.substr(1, v.size() - 2);
    return std::string(v);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected a number, got '" + v + "'");
}

inline long long to_int(const std::string& key, const std::string& v, long long min) {
    long long n = 0;
    try {
        std::size_t used = 0;
        n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    if (n < min) throw ConfigError(key + ": must be at least " + std::to_string(min));
    return n;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    const auto l = text::to_lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

inline void apply_preset(RunConfig& cfg, const Preset& p) {
    cfg.preset = preset_name(p);
    cfg.kfm.tau = p.tau;
    cfg.vp.size_divisor = p.s;
    cfg.vp.outline = p.outline;
    cfg.prompt_profile = prompting::parse_dataset_style(p.dataset);
    if (p.regime == "64f") {
        cfg.sampling.mode = frames::SamplingSpec::Mode::fps_capped;
        cfg.sampling.target_fps = 1.0;
        cfg.sampling.cap = 64;
    } else {
        cfg.sampling.mode = frames::SamplingSpec::Mode::fraction;
        cfg.sampling.fraction = 0.2;
    }
}

}  // namespace detail

// Parses "section.key=value" overrides as given on the command line.
inline std::pair<std::string, std::string> parse_override(std::string_view s) {
    const auto eq = s.find('=');
    const auto dot = s.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw ConfigError("override '" + std::string(s) + "' must look like section.key=value");
    return {std::string(text::trim(s.substr(0, eq))), std::string(text::trim(s.substr(eq + 1)))};
}

// Builds a RunConfig from INI text. Lines starting with '#' or ';' are comments;
// values may be quoted. `overrides` ("section.key" -> value) win over the file,
// and the file wins over any [run] preset.
inline RunConfig parse_config(std::string_view ini, const std::vector<std::pair<std::string, std::string>>& overrides = {},
                              std::filesystem::path base_dir = ".") {
    using detail::ptree;
    std::string cleaned;
    for (const auto& line : text::split(ini, '\n')) {
        const auto t = text::trim(line);
        if (t.starts_with('#')) continue;
        cleaned.append(detail::strip_inline_comment(line));
        cleaned.push_back('\n');
    }
    ptree tree;
    try {
        std::istringstream in(cleaned);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
    }

    std::map<std::string, std::string> values;
    for (const auto& [section, body] : tree) {
        const auto known = detail::known_keys().find(section);
        if (body.empty() && !body.data().empty())
            throw ConfigError("config key '" + section + "' must appear inside a [section]");
        if (known == detail::known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto& [key, node] : body) {
            if (!known->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
            values[section + "." + key] = detail::unquote(node.data());
        }
    }
    for (const auto& [key, value] : overrides) {
        const auto dot = key.find('.');
        const auto sec = detail::known_keys().find(key.substr(0, dot));
        if (dot == std::string::npos || sec == detail::known_keys().end() || !sec->second.count(key.substr(dot + 1)))
            throw ConfigError("unknown config key " + key);
        values[key] = detail::unquote(value);
    }

    RunConfig cfg;
    cfg.base_dir = std::move(base_dir);
    if (const auto it = values.find("run.preset"); it != values.end()) {
        const auto* p = find_preset(it->second);
        if (!p) throw ConfigError("run.preset: unknown preset '" + it->second + "'");
        detail::apply_preset(cfg, *p);
    }

    using namespace detail;
    for (const auto& [key, v] : values) {
        if (key == "run.preset") continue;
        else if (key == "run.in_flight") cfg.in_flight = static_cast<std::size_t>(to_int(key, v, 1));
        else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, v, 0));
        else if (key == "run.manifest") cfg.manifest = v;
        else if (key == "run.questions") cfg.questions = v;
        else if (key == "run.output") cfg.output = v;
        else if (key == "sampling.mode") {
            if (v == "fps_capped") cfg.sampling.mode = frames::SamplingSpec::Mode::fps_capped;
            else if (v == "fraction") cfg.sampling.mode = frames::SamplingSpec::Mode::fraction;
            else if (v == "fixed") cfg.sampling.mode = frames::SamplingSpec::Mode::fixed;
            else throw ConfigError(key + ": expected fps_capped, fraction or fixed, got '" + v + "'");
        } else if (key == "sampling.target_fps") cfg.sampling.target_fps = to_double(key, v);
        else if (key == "sampling.cap") cfg.sampling.cap = static_cast<std::size_t>(to_int(key, v, 1));
        else if (key == "sampling.fraction") cfg.sampling.fraction = to_double(key, v);
        else if (key == "sampling.min_frames") cfg.sampling.min_frames = static_cast<std::size_t>(to_int(key, v, 1));
        else if (key == "sampling.n") cfg.sampling.n = static_cast<std::size_t>(to_int(key, v, 1));
        else if (key == "sampling.fraction_pool") {
            if (v == "fps") cfg.sampling.fraction_pool = frames::SamplingSpec::FractionPool::fps;
            else if (v == "raw") cfg.sampling.fraction_pool = frames::SamplingSpec::FractionPool::raw;
            else throw ConfigError(key + ": expected fps or raw, got '" + v + "'");
        } else if (key == "vp.enabled") cfg.vp_enabled = to_bool(key, v);
        else if (key == "vp.position") cfg.vp.position = wrap(key, [&] { return vp::parse_corner(v); });
        else if (key == "vp.style") cfg.vp.style = wrap(key, [&] { return vp::parse_style(v); });
        else if (key == "vp.s") cfg.vp.size_divisor = static_cast<int>(to_int(key, v, 1));
        else if (key == "vp.outline") cfg.vp.outline = to_bool(key, v);
        else if (key == "vp.padding") cfg.vp.padding = wrap(key, [&] { return vp::parse_padding(v); });
        else if (key == "vp.margin") cfg.vp.margin_px = static_cast<int>(to_int(key, v, 0));
        else if (key == "kfm.tau") cfg.kfm.tau = to_double(key, v);
        else if (key == "kfm.embedder") cfg.kfm.embedder = v;
        else if (key == "kfm.embedder_url") cfg.kfm.embedder_url = v;
        else if (key == "kfm.embedder_token") cfg.kfm.embedder_token = v;
        else if (key == "kfm.embedder_dim") cfg.kfm.embedder_dim = static_cast<std::size_t>(to_int(key, v, 2));
        else if (key == "kfm.embed_batch") cfg.kfm.embed_batch = static_cast<std::size_t>(to_int(key, v, 1));
        else if (key == "kfm.extractor") cfg.kfm.extractor = v;
        else if (key == "kfm.extractor_url") cfg.kfm.extractor_url = v;
        else if (key == "kfm.extractor_token") cfg.kfm.extractor_token = v;
        else if (key == "kfm.extractor_model") cfg.kfm.extractor_model = v;
        else if (key == "model.backend") cfg.model.backend = v;
        else if (key == "model.url") cfg.model.url = v;
        else if (key == "model.token") cfg.model.token = v;
        else if (key == "model.name") cfg.model.name = v;
        else if (key == "model.max_tokens") cfg.model.gen.max_tokens = static_cast<int>(to_int(key, v, 1));
        else if (key == "model.temperature") cfg.model.gen.temperature = to_double(key, v);
        else if (key == "model.marker_word") cfg.model.marker_word = v;
        else if (key == "prompt.profile") cfg.prompt_profile = wrap(key, [&] { return prompting::parse_dataset_style(v); });
    }

    // Cross-field checks.
    if (!(cfg.kfm.tau >= -1.0 && cfg.kfm.tau <= 1.0))
        throw ConfigError("kfm.tau must lie in [-1, 1], got " + std::to_string(cfg.kfm.tau));
    if (!(cfg.sampling.fraction > 0.0 && cfg.sampling.fraction <= 1.0))
        throw ConfigError("sampling.fraction must lie in (0, 1]");
    if (!(cfg.sampling.target_fps > 0.0)) throw ConfigError("sampling.target_fps must be positive");
    if (cfg.kfm.embedder != "hash" && cfg.kfm.embedder != "http")
        throw ConfigError("kfm.embedder: expected hash or http, got '" + cfg.kfm.embedder + "'");
    if (cfg.kfm.embedder == "http" && cfg.kfm.embedder_url.empty())
        throw ConfigError("kfm.embedder = http needs kfm.embedder_url");
    if (cfg.kfm.extractor != "rule" && cfg.kfm.extractor != "llm" && cfg.kfm.extractor != "none")
        throw ConfigError("kfm.extractor: expected rule, llm or none, got '" + cfg.kfm.extractor + "'");
    if (cfg.kfm.extractor == "llm" && (cfg.kfm.extractor_url.empty() || cfg.kfm.extractor_model.empty()))
        throw ConfigError("kfm.extractor = llm needs kfm.extractor_url and kfm.extractor_model");
    if (cfg.model.backend != "mock" && cfg.model.backend != "chat")
        throw ConfigError("model.backend: expected mock or chat, got '" + cfg.model.backend + "'");
    if (cfg.model.backend == "chat" && (cfg.model.url.empty() || cfg.model.name.empty()))
        throw ConfigError("model.backend = chat needs model.url and model.name");
    if (cfg.model.gen.temperature < 0.0) throw ConfigError("model.temperature must be non-negative");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides, path.has_parent_path() ? path.parent_path() : ".");
}

// Resolved configuration as JSON; credentials are shown as set/unset only.
inline nlohmann::json config_to_json(const RunConfig& c) {
    auto mode = [](frames::SamplingSpec::Mode m) {
        switch (m) {
            case frames::SamplingSpec::Mode::fps_capped: return "fps_capped";
            case frames::SamplingSpec::Mode::fraction: return "fraction";
            case frames::SamplingSpec::Mode::fixed: return "fixed";
        }
        return "?";
    };
    auto secret = [](const std::string& s) { return s.empty() ? "unset" : "set"; };
    nlohmann::json j;
    j["preset"] = c.preset;
    j["sampling"] = {{"mode", mode(c.sampling.mode)},
                     {"target_fps", c.sampling.target_fps},
                     {"cap", c.sampling.cap},
                     {"fraction", c.sampling.fraction},
                     {"min_frames", c.sampling.min_frames},
                     {"n", c.sampling.n},
                     {"fraction_pool", c.sampling.fraction_pool == frames::SamplingSpec::FractionPool::fps ? "fps" : "raw"}};
    static constexpr const char* kStyles[] = {"style1", "style2", "style3", "style4"};
    j["vp"] = {{"enabled", c.vp_enabled},
               {"position", vp::to_string(c.vp.position)},
               {"style", kStyles[static_cast<int>(c.vp.style)]},
               {"s", c.vp.size_divisor},
               {"outline", c.vp.outline},
               {"padding", c.vp.padding == vp::Padding::overlay ? "overlay" : "letterbox"}};
    j["kfm"] = {{"tau", c.kfm.tau},
                {"embedder", c.kfm.embedder},
                {"embedder_url", c.kfm.embedder_url},
                {"embedder_token", secret(c.kfm.embedder_token)},
                {"embedder_dim", c.kfm.embedder_dim},
                {"embed_batch", c.kfm.embed_batch},
                {"extractor", c.kfm.extractor},
                {"extractor_url", c.kfm.extractor_url},
                {"extractor_token", secret(c.kfm.extractor_token)},
                {"extractor_model", c.kfm.extractor_model}};
    j["model"] = {{"backend", c.model.backend},
                  {"url", c.model.url},
                  {"token", secret(c.model.token)},
                  {"name", c.model.name},
                  {"max_tokens", c.model.gen.max_tokens},
                  {"temperature", c.model.gen.temperature}};
    j["prompt"] = {{"profile", prompting::to_string(c.prompt_profile)}};
    j["run"] = {{"in_flight", c.in_flight},
                {"seed", c.seed},
                {"manifest", c.manifest},
                {"questions", c.questions},
                {"output", c.output}};
    return j;
}

// Writes a config that parse_config reads back to an equal RunConfig. Raw
// ${VAR} references are kept as written.
inline std::string to_ini(const RunConfig& c) {
    const auto j = config_to_json(c);
    auto num = [](double d) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, d);
        return std::string(buf, res.ptr);
    };
    std::ostringstream o;
    o << "[run]\n"
      << "in_flight = " << c.in_flight << "\nseed = " << c.seed << "\n";
    if (!c.manifest.empty()) o << "manifest = " << c.manifest << "\n";
    if (!c.questions.empty()) o << "questions = " << c.questions << "\n";
    if (!c.output.empty()) o << "output = " << c.output << "\n";
    o << "\n[sampling]\n"
      << "mode = " << j["sampling"]["mode"].get<std::string>() << "\ntarget_fps = " << num(c.sampling.target_fps)
      << "\ncap = " << c.sampling.cap << "\nfraction = " << num(c.sampling.fraction)
      << "\nmin_frames = " << c.sampling.min_frames << "\nn = " << c.sampling.n
      << "\nfraction_pool = " << j["sampling"]["fraction_pool"].get<std::string>() << "\n";
    o << "\n[vp]\n"
      << "enabled = " << (c.vp_enabled ? "true" : "false") << "\nposition = " << vp::to_string(c.vp.position)
      << "\nstyle = " << j["vp"]["style"].get<std::string>() << "\ns = " << c.vp.size_divisor
      << "\noutline = " << (c.vp.outline ? "true" : "false") << "\npadding = " << j["vp"]["padding"].get<std::string>()
      << "\n";
    if (c.vp.margin_px) o << "margin = " << *c.vp.margin_px << "\n";
    o << "\n[kfm]\n"
      << "tau = " << num(c.kfm.tau) << "\nembedder = " << c.kfm.embedder << "\nembedder_dim = " << c.kfm.embedder_dim
      << "\nembed_batch = " << c.kfm.embed_batch << "\nextractor = " << c.kfm.extractor << "\n";
    for (const auto& [k, v] : {std::pair{"embedder_url", &c.kfm.embedder_url}, {"embedder_token", &c.kfm.embedder_token},
                               {"extractor_url", &c.kfm.extractor_url}, {"extractor_token", &c.kfm.extractor_token},
                               {"extractor_model", &c.kfm.extractor_model}})
        if (!v->empty()) o << k << " = " << *v << "\n";
    o << "\n[model]\n"
      << "backend = " << c.model.backend << "\nmax_tokens = " << c.model.gen.max_tokens
      << "\ntemperature = " << num(c.model.gen.temperature) << "\nmarker_word = " << c.model.marker_word << "\n";
    for (const auto& [k, v] : {std::pair{"url", &c.model.url}, {"token", &c.model.token}, {"name", &c.model.name}})
        if (!v->empty()) o << k << " = " << *v << "\n";
    o << "\n[prompt]\nprofile = " << prompting::to_string(c.prompt_profile) << "\n";
    return o.str();
}

}  // namespace vikey::harness
