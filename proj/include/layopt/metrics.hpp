#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "layopt/layout.hpp"
#include "layopt/raster.hpp"

namespace layopt {

/// LSUN-style evaluation result. e_corner is a fraction of the image
/// diagonal, e_pixel a fraction of all pixels.
struct EvalResult {
    double e_corner = 0.0;
    double e_pixel = 0.0;
    std::vector<std::pair<int, int>> matched_pairs; // (pred index, gt index)
};

namespace detail {

/// Minimum-cost assignment of the smaller point set onto the larger one.
/// Exhaustive bitmask DP; conjunction counts stay in single digits.
inline double min_cost_matching(const std::vector<Point2>& small,
                                const std::vector<Point2>& large,
                                std::vector<std::pair<int, int>>& pairs) {
    const int ns = static_cast<int>(small.size());
    const int nl = static_cast<int>(large.size());
    if (nl > 20) throw Error("corner_error: too many conjunctions");

    std::vector<std::vector<double>> cost(ns, std::vector<double>(nl));
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nl; ++j) cost[i][j] = distance(small[i], large[j]);

    const size_t nmask = size_t{1} << nl;
    const double inf = 1e300;
    // dp[mask] = best cost of matching the first popcount(mask) small points
    // onto the large subset `mask`
    std::vector<double> dp(nmask, inf);
    std::vector<int> choice(nmask, -1);
    dp[0] = 0.0;
    for (size_t mask = 0; mask < nmask; ++mask) {
        if (dp[mask] >= inf) continue;
        int i = __builtin_popcountll(mask);
        if (i >= ns) continue;
        for (int j = 0; j < nl; ++j) {
            if (mask & (size_t{1} << j)) continue;
            size_t nm = mask | (size_t{1} << j);
            double c = dp[mask] + cost[i][j];
            if (c < dp[nm]) {
                dp[nm] = c;
                choice[nm] = j;
            }
        }
    }

    double best = inf;
    size_t best_mask = 0;
    for (size_t mask = 0; mask < nmask; ++mask) {
        if (__builtin_popcountll(mask) != ns) continue;
        if (dp[mask] < best) {
            best = dp[mask];
            best_mask = mask;
        }
    }
    pairs.clear();
    size_t mask = best_mask;
    while (mask) {
        int j = choice[mask];
        int i = __builtin_popcountll(mask) - 1;
        pairs.push_back({i, j});
        mask &= ~(size_t{1} << j);
    }
    std::reverse(pairs.begin(), pairs.end());
    return best;
}

} // namespace detail

/// Corner error: minimum-cost bipartite matching of predicted against
/// ground-truth conjunctions on Euclidean distance, normalized by the image
/// diagonal. Each unmatched corner (when counts differ) costs one full
/// diagonal; the denominator is max(nC_pred, nC_gt).
inline EvalResult corner_error(const LayoutState& pred, const LayoutState& gt, double w,
                               double h) {
    EvalResult r;
    const double diag = std::sqrt(w * w + h * h);
    const int np = static_cast<int>(pred.points.size());
    const int ng = static_cast<int>(gt.points.size());
    if (np == 0 || ng == 0) throw Error("corner_error: empty state");

    std::vector<std::pair<int, int>> pairs;
    double matched_cost;
    if (np <= ng) {
        matched_cost = detail::min_cost_matching(pred.points, gt.points, pairs);
    } else {
        matched_cost = detail::min_cost_matching(gt.points, pred.points, pairs);
        for (auto& pr : pairs) std::swap(pr.first, pr.second);
    }
    const int unmatched = std::max(np, ng) - std::min(np, ng);
    r.matched_pairs = std::move(pairs);
    r.e_corner = (matched_cost + diag * unmatched) / (std::max(np, ng) * diag);
    return r;
}

/// Pixel error with label-overlap maximization: the fraction of pixels left
/// disagreeing under the best injective assignment between region labels.
/// All five region labels participate in the assignment.
inline double pixel_error(const RegionMap& pred, const RegionMap& gt) {
    if (pred.w != gt.w || pred.h != gt.h) throw Error("pixel_error: dimension mismatch");
    constexpr int L = 5;
    std::array<std::array<int64_t, L>, L> conf{};
    for (size_t i = 0; i < pred.data.size(); ++i) {
        uint8_t p = pred.data[i], g = gt.data[i];
        if (p >= L || g >= L) throw Error("pixel_error: invalid region label code");
        conf[p][g] += 1;
    }
    std::array<int, L> perm{0, 1, 2, 3, 4};
    int64_t best = -1;
    do {
        int64_t agreed = 0;
        for (int p = 0; p < L; ++p) agreed += conf[p][perm[p]];
        best = std::max(best, agreed);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - static_cast<double>(best) / static_cast<double>(pred.data.size());
}

/// Full evaluation of a predicted layout against ground truth.
inline EvalResult evaluate(const LayoutState& pred, const LayoutState& gt, int w, int h) {
    EvalResult r = corner_error(pred, gt, w, h);
    r.e_pixel = pixel_error(rasterize_regions(pred, w, h), rasterize_regions(gt, w, h));
    return r;
}

} // namespace layopt
