#pragma once

#include <png.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "vikey/core/error.hpp"
#include "vikey/core/rng.hpp"

namespace vikey {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Interleaved 8-bit RGB raster, row-major, no padding.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
        if (width < 0 || height < 0) throw FormatError("image dimensions must be non-negative");
        for (std::size_t i = 0; i < data_.size(); i += 3) {
            data_[i] = fill.r;
            data_[i + 1] = fill.g;
            data_[i + 2] = fill.b;
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    Rgb at(int x, int y) const {
        const auto i = offset(x, y);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const auto i = offset(x, y);
        data_[i] = c.r;
        data_[i + 1] = c.g;
        data_[i + 2] = c.b;
    }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    const std::vector<std::uint8_t>& bytes() const { return data_; }
    std::vector<std::uint8_t>& bytes() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// Content hash over dimensions and pixels; used for golden tests.
inline std::uint64_t pixel_hash(const Image& img) {
    std::uint64_t h = fnv1a_u64(static_cast<std::uint64_t>(img.width()));
    h = fnv1a_u64(static_cast<std::uint64_t>(img.height()), h);
    const auto& b = img.bytes();
    return fnv1a(std::string_view(reinterpret_cast<const char*>(b.data()), b.size()), h);
}

// Paste `patch` with its top-left corner at (x0, y0), clipped to `dst`.
inline void blit(Image& dst, const Image& patch, int x0, int y0) {
    for (int y = 0; y < patch.height(); ++y)
        for (int x = 0; x < patch.width(); ++x)
            if (dst.contains(x0 + x, y0 + y)) dst.set(x0 + x, y0 + y, patch.at(x, y));
}

// Nearest-neighbour resample. Integer arithmetic only, so the result is exact
// and reproducible.
inline Image resize_nearest(const Image& src, int width, int height) {
    if (src.empty() || width <= 0 || height <= 0) throw FormatError("resize_nearest: empty image");
    Image out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = static_cast<int>(static_cast<long long>(y) * src.height() / height);
        for (int x = 0; x < width; ++x) {
            const int sx = static_cast<int>(static_cast<long long>(x) * src.width() / width);
            out.set(x, y, src.at(sx, sy));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// PNG codec (libpng simplified API, 8-bit RGB). The encoder writes a fixed
// chunk set, so the bytes depend only on the pixels and the zlib build.

inline Image decode_png(std::string_view bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        throw FormatError(std::string("png decode: ") + img.message);
    img.format = PNG_FORMAT_RGB;
    Image out(static_cast<int>(img.width), static_cast<int>(img.height));
    if (!png_image_finish_read(&img, nullptr, out.bytes().data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw FormatError("png decode: " + msg);
    }
    return out;
}

inline std::string encode_png(const Image& src) {
    if (src.empty()) throw FormatError("png encode: empty image");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(src.width());
    img.height = static_cast<png_uint_32>(src.height());
    img.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, src.bytes().data(), 0, nullptr))
        throw FormatError(std::string("png encode: ") + img.message);
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, src.bytes().data(), 0, nullptr))
        throw FormatError(std::string("png encode: ") + img.message);
    out.resize(size);
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write file: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Image read_png(const std::filesystem::path& path) {
    try {
        return decode_png(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline void write_png(const std::filesystem::path& path, const Image& img) {
    write_file(path, encode_png(img));
}

// Thread-safe memoizing loader for frame references.
class FrameLoader {
public:
    virtual ~FrameLoader() = default;
    virtual Image load(const std::string& ref) = 0;
};

class PngFrameLoader final : public FrameLoader {
public:
    explicit PngFrameLoader(std::size_t max_cached = 4096) : max_cached_(max_cached) {}

    Image load(const std::string& ref) override {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(ref); it != cache_.end()) return *it->second;
        }
        auto img = std::make_shared<const Image>(read_png(ref));
        std::lock_guard lock(mutex_);
        if (cache_.size() < max_cached_) cache_.emplace(ref, img);
        return *img;
    }

private:
    std::size_t max_cached_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const Image>> cache_;
};

// ---------------------------------------------------------------------------
// Base64 (RFC 4648, with padding).

inline std::string base64_encode(std::string_view in) {
    static constexpr char kAlphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        const std::uint32_t v = (std::uint32_t(std::uint8_t(in[i])) << 16) |
                                (std::uint32_t(std::uint8_t(in[i + 1])) << 8) |
                                std::uint32_t(std::uint8_t(in[i + 2]));
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (const auto rest = in.size() - i; rest > 0) {
        std::uint32_t v = std::uint32_t(std::uint8_t(in[i])) << 16;
        if (rest == 2) v |= std::uint32_t(std::uint8_t(in[i + 1])) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

inline std::string base64_decode(std::string_view in) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (in.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
    std::string out;
    out.reserve(in.size() / 4 * 3);
    for (std::size_t i = 0; i < in.size(); i += 4) {
        int v[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = in[i + k];
            if (c == '=' && i + 4 == in.size() && k >= 2) {
                v[k] = 0;
                ++pad;
            } else if ((v[k] = value(c)) < 0 || pad) {
                throw FormatError("base64: invalid character");
            }
        }
        const std::uint32_t n = (std::uint32_t(v[0]) << 18) | (std::uint32_t(v[1]) << 12) |
                                (std::uint32_t(v[2]) << 6) | std::uint32_t(v[3]);
        out += static_cast<char>((n >> 16) & 0xFF);
        if (pad < 2) out += static_cast<char>((n >> 8) & 0xFF);
        if (pad < 1) out += static_cast<char>(n & 0xFF);
    }
    return out;
}

}  // namespace vikey
