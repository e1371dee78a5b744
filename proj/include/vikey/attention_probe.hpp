#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/image.hpp"

namespace vikey::attention {

enum class QueryMode { all_rows, last_row };

inline constexpr double kRowSumTolerance = 1e-4;

struct AttentionLayer {
    // heads[h] is a row-major T x K_total matrix.
    std::vector<std::vector<double>> heads;
    friend bool operator==(const AttentionLayer&, const AttentionLayer&) = default;
};

struct AttentionDump {
    std::size_t query_rows = 0;  // T
    std::size_t key_cols = 0;    // K_total
    std::size_t num_heads = 0;   // H
    std::vector<bool> image_token_mask;
    QueryMode query_mode = QueryMode::all_rows;
    std::vector<AttentionLayer> layers;

    std::size_t image_tokens() const {
        std::size_t s = 0;
        for (bool b : image_token_mask) s += b;
        return s;
    }
    friend bool operator==(const AttentionDump&, const AttentionDump&) = default;
};

inline void validate(const AttentionDump& d) {
    if (d.num_heads == 0 || d.query_rows == 0 || d.key_cols == 0)
        throw FormatError("attention dump: T, K_total and H must be positive");
    if (d.image_token_mask.size() != d.key_cols)
        throw FormatError("attention dump: mask length " + std::to_string(d.image_token_mask.size()) +
                          " != K_total " + std::to_string(d.key_cols));
    if (d.image_tokens() == 0) throw FormatError("attention dump: mask selects no image tokens");
    for (std::size_t l = 0; l < d.layers.size(); ++l) {
        const auto& layer = d.layers[l];
        if (layer.heads.size() != d.num_heads)
            throw FormatError("attention dump: layer " + std::to_string(l) + " has " +
                              std::to_string(layer.heads.size()) + " heads, expected " + std::to_string(d.num_heads));
        for (std::size_t h = 0; h < layer.heads.size(); ++h) {
            const auto& m = layer.heads[h];
            const auto where = "layer " + std::to_string(l) + " head " + std::to_string(h);
            if (m.size() != d.query_rows * d.key_cols)
                throw FormatError("attention dump: " + where + " has " + std::to_string(m.size()) +
                                  " entries, expected T*K_total = " + std::to_string(d.query_rows * d.key_cols));
            for (std::size_t t = 0; t < d.query_rows; ++t) {
                double sum = 0.0;
                for (std::size_t k = 0; k < d.key_cols; ++k) {
                    const double a = m[t * d.key_cols + k];
                    if (!std::isfinite(a) || a < 0.0)
                        throw FormatError("attention dump: " + where + " row " + std::to_string(t) +
                                          " has a negative or non-finite entry");
                    sum += a;
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance)
                    throw FormatError("attention dump: " + where + " row " + std::to_string(t) + " sums to " +
                                      std::to_string(sum) + ", expected 1");
            }
        }
    }
}

// Per layer: mean over heads and query rows of the attention mass on image
// columns. In last_row mode only the final query row is used.
inline std::vector<double> layer_mean_attention(const AttentionDump& d) {
    validate(d);
    std::vector<std::size_t> image_cols;
    for (std::size_t k = 0; k < d.key_cols; ++k)
        if (d.image_token_mask[k]) image_cols.push_back(k);
    const std::size_t first_row = d.query_mode == QueryMode::last_row ? d.query_rows - 1 : 0;
    const double rows = static_cast<double>(d.query_rows - first_row);

    std::vector<double> out;
    out.reserve(d.layers.size());
    for (const auto& layer : d.layers) {
        double head_sum = 0.0;
        for (const auto& m : layer.heads) {
            double row_sum = 0.0;
            for (std::size_t t = first_row; t < d.query_rows; ++t) {
                const double* row = m.data() + t * d.key_cols;
                for (auto k : image_cols) row_sum += row[k];
            }
            head_sum += row_sum / rows;
        }
        out.push_back(head_sum / static_cast<double>(d.num_heads));
    }
    return out;
}

struct RelativeChange {
    std::vector<double> per_layer;  // (a_l - b_l) / b_l
    double layer_mean = 0.0;        // mean of per_layer
    double overall = 0.0;           // (mean(a) - mean(b)) / mean(b)
};

inline RelativeChange relative_change(const std::vector<double>& with_vp, const std::vector<double>& without_vp) {
    if (with_vp.size() != without_vp.size())
        throw std::invalid_argument("relative_change: layer counts differ");
    if (with_vp.empty()) throw std::invalid_argument("relative_change: no layers");
    RelativeChange r;
    double sum_a = 0.0, sum_b = 0.0, sum_rel = 0.0;
    for (std::size_t l = 0; l < with_vp.size(); ++l) {
        if (!(without_vp[l] > 0.0))
            throw std::invalid_argument("relative_change: baseline layer " + std::to_string(l) + " is not positive");
        const double rel = (with_vp[l] - without_vp[l]) / without_vp[l];
        r.per_layer.push_back(rel);
        sum_rel += rel;
        sum_a += with_vp[l];
        sum_b += without_vp[l];
    }
    const double n = static_cast<double>(with_vp.size());
    r.layer_mean = sum_rel / n;
    r.overall = (sum_a / n - sum_b / n) / (sum_b / n);
    return r;
}

// ---------------------------------------------------------------------------
// Dump file format (JSON). See docs/formats.md.

inline constexpr const char* kDumpFormat = "vikey-attention-dump";

inline nlohmann::json dump_to_json(const AttentionDump& d) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : d.layers) layers.push_back({{"heads", l.heads}});
    std::vector<int> mask;
    for (bool b : d.image_token_mask) mask.push_back(b ? 1 : 0);
    return {{"format", kDumpFormat},
            {"version", 1},
            {"T", d.query_rows},
            {"K_total", d.key_cols},
            {"H", d.num_heads},
            {"query_mode", d.query_mode == QueryMode::last_row ? "last_row" : "all_rows"},
            {"image_token_mask", mask},
            {"layers", std::move(layers)}};
}

inline AttentionDump dump_from_json(const nlohmann::json& j) {
    AttentionDump d;
    try {
        if (j.value("format", std::string{}) != kDumpFormat)
            throw FormatError("attention dump: missing or wrong 'format' tag");
        d.query_rows = j.at("T").get<std::size_t>();
        d.key_cols = j.at("K_total").get<std::size_t>();
        d.num_heads = j.at("H").get<std::size_t>();
        const auto mode = j.value("query_mode", std::string("all_rows"));
        if (mode == "all_rows") d.query_mode = QueryMode::all_rows;
        else if (mode == "last_row") d.query_mode = QueryMode::last_row;
        else throw FormatError("attention dump: unknown query_mode '" + mode + "'");
        for (const auto& b : j.at("image_token_mask")) d.image_token_mask.push_back(b.get<int>() != 0);
        for (const auto& l : j.at("layers")) d.layers.push_back({l.at("heads").get<std::vector<std::vector<double>>>()});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("attention dump: ") + e.what());
    }
    validate(d);
    return d;
}

inline AttentionDump load_dump(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return dump_from_json(j);
}

inline void save_dump(const std::filesystem::path& path, const AttentionDump& d) {
    write_file(path, dump_to_json(d).dump());
}

}  // namespace vikey::attention
