#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "layopt/layout.hpp"

namespace layopt {

/// Pixel-wise edge label map produced by converting a layout state.
struct LabelMap {
    int w = 0;
    int h = 0;
    std::vector<uint8_t> data; // LabelClass codes, row-major

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * w + x]; }
    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * w + x]; }
};

struct BinaryMask {
    int w = 0;
    int h = 0;
    std::vector<uint8_t> data; // 0/1

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * w + x]; }
};

/// Per-pixel surface region map (RegionLabel codes).
struct RegionMap {
    int w = 0;
    int h = 0;
    std::vector<uint8_t> data;

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * w + x]; }
    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * w + x]; }
};

namespace detail {

inline int round_px(double v, int n) {
    long r = std::lround(v);
    if (r < 0) r = 0;
    if (r > n - 1) r = n - 1;
    return static_cast<int>(r);
}

/// Walk the Bresenham line between the rounded endpoints, dilated by a
/// (thickness-1)-radius square. thickness 1 emits exactly the centerline;
/// dilated pixels may be emitted more than once.
template <class Fn>
void for_each_segment_pixel(Point2 pa, Point2 pb, int w, int h, int thickness, Fn&& fn) {
    int x0 = round_px(pa.x, w), y0 = round_px(pa.y, h);
    int x1 = round_px(pb.x, w), y1 = round_px(pb.y, h);
    const int r = thickness - 1;

    auto emit = [&](int cx, int cy) {
        if (r == 0) {
            fn(cx, cy);
            return;
        }
        for (int dy = -r; dy <= r; ++dy) {
            int y = cy + dy;
            if (y < 0 || y >= h) continue;
            for (int dx = -r; dx <= r; ++dx) {
                int x = cx + dx;
                if (x < 0 || x >= w) continue;
                fn(x, y);
            }
        }
    };

    int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
        emit(x, y);
        if (x == x1 && y == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

} // namespace detail

/// Convert a layout state into a pixel-wise edge label map. Edges are drawn
/// in list order; later edges overwrite earlier ones where they cross.
inline LabelMap rasterize_edges(const LayoutState& state, int w, int h, int thickness = 1) {
    if (thickness < 1) throw Error("rasterize_edges: thickness must be >= 1");
    LabelMap m;
    m.w = w;
    m.h = h;
    m.data.assign(static_cast<size_t>(w) * h, static_cast<uint8_t>(LabelClass::bg));
    for (const auto& e : state.topology.edges) {
        uint8_t code = static_cast<uint8_t>(e.cls);
        detail::for_each_segment_pixel(state.points[e.a], state.points[e.b], w, h, thickness,
                                       [&](int x, int y) { m.at(x, y) = code; });
    }
    return m;
}

/// Binary mask of one label class: 1 where M==l.
inline BinaryMask binary_mask(const LabelMap& m, LabelClass l) {
    BinaryMask b;
    b.w = m.w;
    b.h = m.h;
    b.data.resize(m.data.size());
    const uint8_t code = static_cast<uint8_t>(l);
    for (size_t i = 0; i < m.data.size(); ++i) b.data[i] = m.data[i] == code ? 1 : 0;
    return b;
}

namespace detail {

struct ResolvedPoly {
    std::vector<Point2> pts;
};

inline Point2 resolve_vertex(const VertexRef& v, const LayoutState& st, double w, double h) {
    if (!v.is_corner) return st.points[v.index];
    switch (v.index) {
        case 0: return {0.0, 0.0}; // TL
        case 1: return {w, 0.0};   // TR
        case 2: return {w, h};     // BR
        default: return {0.0, h};  // BL
    }
}

inline double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Strict segment crossing: true only when the interiors intersect.
/// Touching endpoints and collinear overlap (degenerate states) do not count.
inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    double d1 = cross(c, d, a);
    double d2 = cross(c, d, b);
    double d3 = cross(a, b, c);
    double d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline bool polygon_self_intersects(const std::vector<Point2>& p) {
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return true;
        }
    }
    return false;
}

inline double polygon_area(const std::vector<Point2>& p) {
    double s = 0.0;
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i) {
        const Point2& a = p[i];
        const Point2& b = p[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return std::abs(s) * 0.5;
}

/// Fill rows of `poly` into `map`, claiming only still-unset pixels.
/// Pixel centers at (x+0.5, y+0.5); crossing rule is half-open in y so
/// shared face boundaries resolve to exactly one side.
inline void scanline_fill(const std::vector<Point2>& poly, RegionMap& map, uint8_t label,
                          std::vector<uint8_t>& claimed) {
    const int n = static_cast<int>(poly.size());
    std::vector<double> xs;
    for (int y = 0; y < map.h; ++y) {
        const double cy = y + 0.5;
        xs.clear();
        for (int i = 0; i < n; ++i) {
            Point2 p = poly[i];
            Point2 q = poly[(i + 1) % n];
            if ((p.y <= cy) == (q.y <= cy)) continue;
            xs.push_back(p.x + (cy - p.y) / (q.y - p.y) * (q.x - p.x));
        }
        std::sort(xs.begin(), xs.end());
        for (size_t k = 0; k + 1 < xs.size(); k += 2) {
            int x_begin = static_cast<int>(std::ceil(xs[k] - 0.5));
            int x_end = static_cast<int>(std::ceil(xs[k + 1] - 0.5)); // exclusive
            x_begin = std::max(x_begin, 0);
            x_end = std::min(x_end, map.w);
            for (int x = x_begin; x < x_end; ++x) {
                size_t idx = static_cast<size_t>(y) * map.w + x;
                if (!claimed[idx]) {
                    claimed[idx] = 1;
                    map.data[idx] = label;
                }
            }
        }
    }
}

} // namespace detail

/// Scanline-fill the topology's faces into a total region map. Faces claim
/// pixels in list order; the rare pixel left unclaimed by boundary roundoff
/// inherits the label of its nearest claimed neighbor.
inline RegionMap rasterize_regions(const LayoutState& state, int w, int h) {
    const auto& spec = state.topology;
    if (spec.faces.empty()) throw Error("rasterize_regions: topology has no faces");

    RegionMap map;
    map.w = w;
    map.h = h;
    map.data.assign(static_cast<size_t>(w) * h, 0);
    std::vector<uint8_t> claimed(map.data.size(), 0);

    for (const auto& face : spec.faces) {
        std::vector<Point2> poly;
        poly.reserve(face.cycle.size());
        for (const auto& v : face.cycle)
            poly.push_back(detail::resolve_vertex(v, state, w, h));
        if (detail::polygon_self_intersects(poly))
            throw Error(std::string("rasterize_regions: self-intersecting face '") +
                        to_string(face.label) + "'");
        detail::scanline_fill(poly, map, static_cast<uint8_t>(face.label), claimed);
    }

    // sweep any unclaimed pixels from claimed neighbors
    bool any_unclaimed = false;
    for (uint8_t c : claimed)
        if (!c) {
            any_unclaimed = true;
            break;
        }
    if (any_unclaimed) {
        for (int pass = 0; pass < 4; ++pass) {
            bool left_to_right = pass == 0 || pass == 2;
            bool rows = pass < 2;
            if (rows) {
                for (int y = 0; y < h; ++y) {
                    int last = -1;
                    for (int i = 0; i < w; ++i) {
                        int x = left_to_right ? i : w - 1 - i;
                        size_t idx = static_cast<size_t>(y) * w + x;
                        if (claimed[idx])
                            last = map.data[idx];
                        else if (last >= 0) {
                            map.data[idx] = static_cast<uint8_t>(last);
                            claimed[idx] = 1;
                        }
                    }
                }
            } else {
                for (int x = 0; x < w; ++x) {
                    int last = -1;
                    for (int i = 0; i < h; ++i) {
                        int y = left_to_right ? i : h - 1 - i;
                        size_t idx = static_cast<size_t>(y) * w + x;
                        if (claimed[idx])
                            last = map.data[idx];
                        else if (last >= 0) {
                            map.data[idx] = static_cast<uint8_t>(last);
                            claimed[idx] = 1;
                        }
                    }
                }
            }
        }
    }
    return map;
}

/// Write an 8-bit PGM (P5) debug image; pixel byte = label code * 60.
template <class MapT>
void write_pgm(const MapT& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_pgm: cannot open '" + path + "'");
    out << "P5\n" << m.w << " " << m.h << "\n255\n";
    for (uint8_t v : m.data) {
        uint8_t byte = static_cast<uint8_t>(v * 60);
        out.write(reinterpret_cast<const char*>(&byte), 1);
    }
    if (!out) throw Error("write_pgm: write failed for '" + path + "'");
}

} // namespace layopt
