#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "layopt/field.hpp"
#include "layopt/raster.hpp"

namespace layopt {

/// pcg32 (PCG-XSH-RR 64/32, O'Neill). Pinned here so synthetic fields are
/// reproducible across platforms.
class Pcg32 {
public:
    explicit Pcg32(uint64_t seed, uint64_t seq = 0xda3e39cb94b95bdbULL) {
        state_ = 0;
        inc_ = (seq << 1u) | 1u;
        next();
        state_ += seed;
        next();
    }

    uint32_t next() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform integer in [0, n).
    uint32_t bounded(uint32_t n) { return n ? next() % n : 0; }

    /// Uniform double in (0, 1].
    double uniform_pos() { return (static_cast<double>(next()) + 1.0) * 0x1p-32; }

    /// Standard normal via Box-Muller (two uniforms per call, no caching,
    /// so the draw order is the call order).
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform_pos();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 0;
};

/// Parameters of the synthetic field generator.
struct SynthParams {
    int thickness = 1;            // edge raster thickness, px
    double blur_sigma = 2.0;      // isotropic Gaussian, px
    double noise_sigma = 0.0;     // additive Gaussian on edge channels
    int occlusion_count = 0;      // boxes zeroed from the wf channel
    double occlusion_max_frac = 0.15; // max box side as fraction of min(w,h)
    uint64_t seed = 1;

    void validate() const {
        if (thickness < 1) throw Error("synth: thickness must be >= 1");
        if (blur_sigma < 0) throw Error("synth: blur_sigma must be >= 0");
        if (noise_sigma < 0) throw Error("synth: noise_sigma must be >= 0");
        if (occlusion_count < 0) throw Error("synth: occlusion_count must be >= 0");
        if (occlusion_max_frac < 0 || occlusion_max_frac > 0.5)
            throw Error("synth: occlusion_max_frac must be in [0, 0.5]");
    }
};

namespace detail {

/// Separable blur with a kernel truncated at 3 sigma, symmetric reflection
/// at the borders. The kernel is unnormalized; callers renormalize.
inline void gaussian_blur(std::vector<double>& img, int w, int h, double sigma) {
    if (sigma <= 0.0) return;
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * r + 1);
    for (int i = -r; i <= r; ++i) kernel[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));

    auto reflect = [](int i, int n) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - i - 1;
        }
        return i;
    };

    std::vector<double> tmp(img.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i)
                s += kernel[i + r] * img[static_cast<size_t>(y) * w + reflect(x + i, w)];
            tmp[static_cast<size_t>(y) * w + x] = s;
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i)
                s += kernel[i + r] * tmp[static_cast<size_t>(reflect(y + i, h)) * w + x];
            img[static_cast<size_t>(y) * w + x] = s;
        }
    }
}

} // namespace detail

/// Deterministic synthetic feature field from a ground-truth layout:
/// per-class edge rasters -> Gaussian blur (max renormalized to 1) ->
/// random occlusion boxes zeroed from wf -> additive Gaussian noise,
/// clipped to [0,1] -> bg = 1 - max(wf, ww, wc).
inline FeatureField synth_field(const LayoutState& gt, int w, int h, const SynthParams& params) {
    params.validate();
    if (!state_valid(gt, w, h)) throw Error("synth_field: invalid ground-truth state");

    // one plane per edge class, in LabelClass order wf, ww, wc
    std::array<std::vector<double>, 3> planes;
    for (auto& p : planes) p.assign(static_cast<size_t>(w) * h, 0.0);
    for (const auto& e : gt.topology.edges) {
        auto& plane = planes[static_cast<int>(e.cls) - 1];
        detail::for_each_segment_pixel(gt.points[e.a], gt.points[e.b], w, h, params.thickness,
                                       [&](int x, int y) {
                                           plane[static_cast<size_t>(y) * w + x] = 1.0;
                                       });
    }

    for (auto& plane : planes) {
        detail::gaussian_blur(plane, w, h, params.blur_sigma);
        double mx = 0.0;
        for (double v : plane) mx = std::max(mx, v);
        if (mx > 0.0)
            for (double& v : plane) v /= mx;
    }

    Pcg32 rng(params.seed);

    // furniture-style occlusion of wall-floor evidence only
    const int max_side =
        std::max(1, static_cast<int>(params.occlusion_max_frac * std::min(w, h)));
    auto& wf_plane = planes[0];
    for (int k = 0; k < params.occlusion_count; ++k) {
        int bw = 1 + static_cast<int>(rng.bounded(static_cast<uint32_t>(max_side)));
        int bh = 1 + static_cast<int>(rng.bounded(static_cast<uint32_t>(max_side)));
        int x0 = static_cast<int>(rng.bounded(static_cast<uint32_t>(std::max(1, w - bw + 1))));
        int y0 = static_cast<int>(rng.bounded(static_cast<uint32_t>(std::max(1, h - bh + 1))));
        for (int y = y0; y < y0 + bh && y < h; ++y)
            for (int x = x0; x < x0 + bw && x < w; ++x)
                wf_plane[static_cast<size_t>(y) * w + x] = 0.0;
    }

    if (params.noise_sigma > 0.0) {
        for (auto& plane : planes)
            for (double& v : plane)
                v = std::clamp(v + params.noise_sigma * rng.normal(), 0.0, 1.0);
    }

    FeatureField f(w, h);
    for (int c = 0; c < 3; ++c) {
        auto& dst = f.channels[c + 1];
        for (size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(planes[c][i]);
    }
    auto& bg = f.channels[0];
    for (size_t i = 0; i < bg.size(); ++i) {
        double m = std::max({planes[0][i], planes[1][i], planes[2][i]});
        bg[i] = static_cast<float>(1.0 - m);
    }
    return f;
}

} // namespace layopt
