#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "layopt/layout.hpp"

namespace layopt {

/// 4-channel edge-likelihood field over the image, channel order
/// (bg, wf, ww, wc) matching the LabelClass codes. Values are expected in
/// [0,1]; storage is 32-bit float so file round-trips are bit-exact.
struct FeatureField {
    int w = 0;
    int h = 0;
    std::array<std::vector<float>, 4> channels;

    FeatureField() = default;
    FeatureField(int w_, int h_) : w(w_), h(h_) {
        for (auto& c : channels) c.assign(static_cast<size_t>(w) * h, 0.0f);
    }

    float at(LabelClass c, int x, int y) const {
        return channels[static_cast<int>(c)][static_cast<size_t>(y) * w + x];
    }
    float& at(LabelClass c, int x, int y) {
        return channels[static_cast<int>(c)][static_cast<size_t>(y) * w + x];
    }

    bool operator==(const FeatureField& o) const {
        return w == o.w && h == o.h && channels == o.channels;
    }
};

/// Bilinear sample of one channel with clamp-to-edge semantics.
/// Coordinates are clamped to [0,w-1] x [0,h-1]; integer coordinates return
/// the stored value exactly.
inline double sample(const FeatureField& f, LabelClass c, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(f.w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(f.h - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, f.w - 1);
    int y1 = std::min(y0 + 1, f.h - 1);
    double fx = x - x0;
    double fy = y - y0;
    const auto& ch = f.channels[static_cast<int>(c)];
    auto v = [&](int xx, int yy) {
        return static_cast<double>(ch[static_cast<size_t>(yy) * f.w + xx]);
    };
    double top = v(x0, y0) * (1.0 - fx) + v(x1, y0) * fx;
    double bot = v(x0, y1) * (1.0 - fx) + v(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

namespace detail {

inline void write_u32le(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

inline uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

} // namespace detail

/// Write a field as LFF: magic "LFF1"; little-endian u32 w, h, channels(=4);
/// then channel-major, row-major 32-bit floats in order bg, wf, ww, wc.
inline void save_field(const FeatureField& f, const std::string& path) {
    if (f.w < 16 || f.h < 16) throw Error("save_field: field smaller than 16x16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_field: cannot open '" + path + "'");
    out.write("LFF1", 4);
    detail::write_u32le(out, static_cast<uint32_t>(f.w));
    detail::write_u32le(out, static_cast<uint32_t>(f.h));
    detail::write_u32le(out, 4);
    for (const auto& ch : f.channels) {
        for (float v : ch) {
            if (!std::isfinite(v)) throw Error("save_field: non-finite value");
            detail::write_u32le(out, std::bit_cast<uint32_t>(v));
        }
    }
    if (!out) throw Error("save_field: write failed for '" + path + "'");
}

/// Load an LFF field. Rejects bad magic, channel counts other than 4, and
/// non-finite values (reporting the flat value index). An all-zero field
/// loads but sets *warning to "degenerate field" when a sink is given.
inline FeatureField load_field(const std::string& path, std::string* warning = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_field: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "LFF1")
        throw Error("load_field: bad magic in '" + path + "'");
    uint32_t w = detail::read_u32le(in);
    uint32_t h = detail::read_u32le(in);
    uint32_t nc = detail::read_u32le(in);
    if (!in) throw Error("load_field: truncated header in '" + path + "'");
    if (nc != 4)
        throw Error("load_field: channel count " + std::to_string(nc) + " != 4 in '" + path + "'");
    if (w < 16 || h < 16 || w > 1u << 16 || h > 1u << 16)
        throw Error("load_field: bad dimensions " + std::to_string(w) + "x" + std::to_string(h));

    FeatureField f(static_cast<int>(w), static_cast<int>(h));
    size_t index = 0;
    bool all_zero = true;
    for (auto& ch : f.channels) {
        for (float& v : ch) {
            uint32_t bits = detail::read_u32le(in);
            if (!in) throw Error("load_field: truncated data in '" + path + "'");
            v = std::bit_cast<float>(bits);
            if (!std::isfinite(v))
                throw Error("load_field: non-finite value at index " + std::to_string(index));
            if (v != 0.0f) all_zero = false;
            ++index;
        }
    }
    if (all_zero && warning) *warning = "degenerate field: all channels zero";
    return f;
}

} // namespace layopt
