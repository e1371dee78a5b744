#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "vikey/attention_probe.hpp"
#include "vikey/core/rng.hpp"

using namespace vikey;
using namespace vikey::attention;

namespace {

AttentionDump uniform_dump(std::size_t layers, std::size_t h, std::size_t t, std::size_t k, std::size_t s) {
    AttentionDump d;
    d.query_rows = t;
    d.key_cols = k;
    d.num_heads = h;
    d.image_token_mask.assign(k, false);
    for (std::size_t i = 0; i < s; ++i) d.image_token_mask[i] = true;
    for (std::size_t l = 0; l < layers; ++l)
        d.layers.push_back({std::vector<std::vector<double>>(h, std::vector<double>(t * k, 1.0 / double(k)))});
    return d;
}

// Softmax-like random rows.
AttentionDump random_dump(std::uint64_t seed, std::size_t layers, std::size_t h, std::size_t t, std::size_t k) {
    SplitMix64 rng(seed);
    AttentionDump d = uniform_dump(layers, h, t, k, 0);
    for (std::size_t i = 0; i < k; ++i) d.image_token_mask[i] = rng.below(2) == 1;
    d.image_token_mask[rng.below(k)] = true;
    for (auto& layer : d.layers)
        for (auto& m : layer.heads)
            for (std::size_t r = 0; r < t; ++r) {
                double sum = 0;
                for (std::size_t c = 0; c < k; ++c) sum += (m[r * k + c] = rng.uniform(0.0, 1.0));
                for (std::size_t c = 0; c < k; ++c) m[r * k + c] /= sum;
            }
    return d;
}

// Direct triple loop over layer/head/row.
std::vector<double> brute_force(const AttentionDump& d) {
    std::vector<double> out;
    const std::size_t t0 = d.query_mode == QueryMode::last_row ? d.query_rows - 1 : 0;
    for (const auto& layer : d.layers) {
        double acc = 0;
        for (const auto& m : layer.heads) {
            double per_head = 0;
            for (std::size_t t = t0; t < d.query_rows; ++t)
                for (std::size_t s = 0; s < d.key_cols; ++s)
                    if (d.image_token_mask[s]) per_head += m[t * d.key_cols + s];
            acc += per_head / double(d.query_rows - t0);
        }
        out.push_back(acc / double(d.num_heads));
    }
    return out;
}

std::string error_of(const AttentionDump& d) {
    try {
        validate(d);
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LayerMean, UniformIsImageFraction) {
    const auto d = uniform_dump(3, 2, 3, 8, 4);
    for (double v : layer_mean_attention(d)) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(LayerMean, MassOnNonImageColumnIsZero) {
    auto d = uniform_dump(1, 1, 2, 4, 2);
    for (auto& x : d.layers[0].heads[0]) x = 0;
    d.layers[0].heads[0][3] = 1;
    d.layers[0].heads[0][4 + 3] = 1;
    EXPECT_EQ(layer_mean_attention(d), std::vector<double>{0.0});
}

TEST(LayerMean, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto d = random_dump(seed, 3, 1 + seed % 3, 1 + seed % 4, 2 + seed % 7);
        if (seed % 2) d.query_mode = QueryMode::last_row;
        const auto got = layer_mean_attention(d);
        const auto want = brute_force(d);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_NEAR(got[i], want[i], 1e-12);
            EXPECT_GE(got[i], 0.0);
            EXPECT_LE(got[i], 1.0 + 1e-12);
        }
    }
}

TEST(LayerMean, LastRowUsesOnlyFinalQuery) {
    auto d = uniform_dump(1, 1, 2, 2, 1);
    auto& m = d.layers[0].heads[0];
    m = {0.0, 1.0, 1.0, 0.0};  // row 0 ignores the image column, row 1 attends to it fully
    EXPECT_DOUBLE_EQ(layer_mean_attention(d)[0], 0.5);
    d.query_mode = QueryMode::last_row;
    EXPECT_DOUBLE_EQ(layer_mean_attention(d)[0], 1.0);
}

TEST(LayerMean, PermutationInvariance) {
    auto d = random_dump(99, 2, 4, 5, 6);
    const auto base = layer_mean_attention(d);
    auto heads = d;
    for (auto& l : heads.layers) std::reverse(l.heads.begin(), l.heads.end());
    auto rows = d;
    for (auto& l : rows.layers)
        for (auto& m : l.heads)
            for (std::size_t r = 0; r < 2; ++r)
                std::swap_ranges(m.begin() + long(r * 6), m.begin() + long((r + 1) * 6), m.begin() + long((4 - r) * 6));
    const auto a = layer_mean_attention(heads), b = layer_mean_attention(rows);
    for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_NEAR(a[i], base[i], 1e-12);
        EXPECT_NEAR(b[i], base[i], 1e-12);
    }
}

TEST(Validate, RowSumErrorCitesLocation) {
    auto d = uniform_dump(2, 2, 3, 4, 1);
    for (std::size_t c = 0; c < 4; ++c) d.layers[1].heads[1][2 * 4 + c] = 0.125;
    const auto msg = error_of(d);
    EXPECT_NE(msg.find("layer 1 head 1 row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("0.5"), std::string::npos) << msg;
}

TEST(Validate, ShapeErrors) {
    auto mask = uniform_dump(1, 1, 2, 4, 1);
    mask.image_token_mask.pop_back();
    EXPECT_NE(error_of(mask).find("mask length"), std::string::npos);

    auto none = uniform_dump(1, 1, 2, 4, 0);
    EXPECT_NE(error_of(none).find("no image tokens"), std::string::npos);

    auto heads = uniform_dump(2, 2, 2, 4, 1);
    heads.layers[1].heads.pop_back();
    EXPECT_NE(error_of(heads).find("layer 1 has 1 heads"), std::string::npos);

    auto size = uniform_dump(1, 1, 2, 4, 1);
    size.layers[0].heads[0].pop_back();
    EXPECT_NE(error_of(size).find("layer 0 head 0"), std::string::npos);

    auto neg = uniform_dump(1, 1, 1, 2, 1);
    neg.layers[0].heads[0] = {1.5, -0.5};
    EXPECT_NE(error_of(neg).find("negative"), std::string::npos);

    auto within = uniform_dump(1, 1, 1, 2, 1);
    within.layers[0].heads[0] = {0.5, 0.5 + 0.5e-4};
    EXPECT_EQ(error_of(within), "");
}

TEST(RelativeChange, ConstantLists) {
    const auto r = relative_change(std::vector<double>(28, 0.089), std::vector<double>(28, 0.081));
    EXPECT_NEAR(r.overall, (0.089 - 0.081) / 0.081, 1e-12);
    EXPECT_NEAR(r.overall, 0.0988, 5e-5);
    EXPECT_NEAR(r.layer_mean, r.overall, 1e-12);
}

TEST(RelativeChange, LayerMeanDiffersFromOverall) {
    const auto r = relative_change({0.02, 0.10}, {0.01, 0.10});
    EXPECT_EQ(r.per_layer, (std::vector<double>{1.0, 0.0}));
    EXPECT_DOUBLE_EQ(r.layer_mean, 0.5);
    EXPECT_NEAR(r.overall, 0.01 / 0.11, 1e-12);
    EXPECT_NEAR(r.overall, 0.0909, 1e-4);
}

TEST(RelativeChange, IdentityAndErrors) {
    const auto r = relative_change({0.3, 0.2}, {0.3, 0.2});
    EXPECT_EQ(r.per_layer, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(r.overall, 0.0);
    EXPECT_THROW(relative_change({0.1}, {0.0}), std::invalid_argument);
    EXPECT_THROW(relative_change({0.1}, {0.1, 0.2}), std::invalid_argument);
    EXPECT_THROW(relative_change({}, {}), std::invalid_argument);
}

TEST(DumpFile, RoundTrip) {
    auto d = random_dump(5, 4, 2, 3, 5);
    d.query_mode = QueryMode::last_row;
    const auto path = std::filesystem::temp_directory_path() / "vikey_attn_roundtrip.json";
    save_dump(path, d);
    const auto back = load_dump(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.layers.size(), 4u);
    EXPECT_EQ(back.image_token_mask, d.image_token_mask);
    EXPECT_EQ(back.query_mode, QueryMode::last_row);
    const auto a = layer_mean_attention(d), b = layer_mean_attention(back);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
}

TEST(DumpFile, ThirtyTwoLayers) {
    const auto d = dump_from_json(dump_to_json(uniform_dump(32, 2, 2, 6, 3)));
    EXPECT_EQ(layer_mean_attention(d).size(), 32u);
}

TEST(DumpFile, Fixture) {
    const auto d = load_dump(std::string(VIKEY_FIXTURES) + "/attention_sample.json");
    const auto m = layer_mean_attention(d);
    ASSERT_EQ(m.size(), 2u);
    // Layer 0 rows carry 0.75 and 0.5 on the image columns. Layer 1 is uniform over 4 keys.
    EXPECT_NEAR(m[0], 0.625, 1e-12);
    EXPECT_NEAR(m[1], 0.5, 1e-12);
}

TEST(DumpFile, BadInputs) {
    EXPECT_THROW(dump_from_json(nlohmann::json{{"format", "other"}}), FormatError);
    auto j = dump_to_json(uniform_dump(1, 1, 1, 2, 1));
    j["query_mode"] = "first_row";
    EXPECT_THROW(dump_from_json(j), FormatError);
    j = dump_to_json(uniform_dump(1, 1, 1, 2, 1));
    j.erase("T");
    EXPECT_THROW(dump_from_json(j), FormatError);
    const auto path = std::filesystem::temp_directory_path() / "vikey_attn_bad.json";
    write_file(path, "{not json");
    EXPECT_THROW(load_dump(path), FormatError);
    std::filesystem::remove(path);
}
