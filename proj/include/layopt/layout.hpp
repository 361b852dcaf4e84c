#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "layopt/geometry.hpp"

namespace layopt {

/// Error type for validation and I/O failures across the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pixel-wise edge classes. Integer codes are stable across serialization.
enum class LabelClass : int { bg = 0, wf = 1, ww = 2, wc = 3 };

inline const char* to_string(LabelClass c) {
    switch (c) {
        case LabelClass::bg: return "bg";
        case LabelClass::wf: return "wf";
        case LabelClass::ww: return "ww";
        case LabelClass::wc: return "wc";
    }
    return "?";
}

/// Surface region labels used by the region rasterizer and the pixel metric.
/// Codes: floor=0, ceiling=1, wall1=2, wall2=3, wall3=4.
enum class RegionLabel : int { floor = 0, ceiling = 1, wall1 = 2, wall2 = 3, wall3 = 4 };

inline const char* to_string(RegionLabel r) {
    switch (r) {
        case RegionLabel::floor: return "floor";
        case RegionLabel::ceiling: return "ceiling";
        case RegionLabel::wall1: return "wall1";
        case RegionLabel::wall2: return "wall2";
        case RegionLabel::wall3: return "wall3";
    }
    return "?";
}

enum class BoundarySide : int { left = 0, right = 1, top = 2, bottom = 3 };

/// Positional constraint of one conjunction slot. Boundary-anchored slots
/// live on an image border; the named side fixes where average_init puts
/// them. A slot that reaches a corner may slide onto the adjacent border.
struct AnchorConstraint {
    bool interior = true;
    BoundarySide side = BoundarySide::left; // meaningful only when !interior

    static AnchorConstraint make_interior() { return {true, BoundarySide::left}; }
    static AnchorConstraint boundary(BoundarySide s) { return {false, s}; }
};

/// One labeled layout edge between two conjunction slots.
struct EdgeSpec {
    int a = 0;
    int b = 0;
    LabelClass cls = LabelClass::wf; // never bg
};

enum class EdgeEnd : int { A = 0, B = 1 };

/// Reference to an edge incident to a slot, with the endpoint role.
struct EdgeRef {
    int edge_index = 0;
    EdgeEnd end = EdgeEnd::A;
};

/// Vertex reference inside a face cycle: either a conjunction slot or one
/// of the image-corner symbols TL, TR, BR, BL.
struct VertexRef {
    bool is_corner = false;
    int index = 0; // slot index, or corner id 0=TL 1=TR 2=BR 3=BL
};

struct FaceSpec {
    RegionLabel label = RegionLabel::floor;
    std::vector<VertexRef> cycle;
};

/// One of the room layout topologies: conjunction slots with anchor
/// constraints, labeled edges, region faces, and the fractional average
/// state used for initialization.
struct TopologySpec {
    int id = 0;
    std::vector<AnchorConstraint> anchors;       // one per slot
    std::vector<EdgeSpec> edges;                 // draw order matters
    std::vector<FaceSpec> faces;
    std::vector<Point2> average_state;           // fractions of (w,h), in [0,1]^2

    int slot_count() const { return static_cast<int>(anchors.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
};

/// A concrete parameterization: continuous conjunction coordinates bound to
/// a topology. Immutable value data after construction.
struct LayoutState {
    TopologySpec topology;
    std::vector<Point2> points;
};

struct Catalog {
    std::vector<TopologySpec> topologies;

    const TopologySpec* find(int id) const {
        for (const auto& t : topologies)
            if (t.id == id) return &t;
        return nullptr;
    }
};

namespace detail {
inline bool near(double a, double b, double tol = 0.5) { return std::abs(a - b) <= tol; }
} // namespace detail

/// True if the point touches the named border within half a pixel.
inline bool on_side(Point2 p, BoundarySide s, double w, double h) {
    switch (s) {
        case BoundarySide::left: return detail::near(p.x, 0.0);
        case BoundarySide::right: return detail::near(p.x, w);
        case BoundarySide::top: return detail::near(p.y, 0.0);
        case BoundarySide::bottom: return detail::near(p.y, h);
    }
    return false;
}

inline bool on_any_border(Point2 p, double w, double h) {
    return detail::near(p.x, 0.0) || detail::near(p.x, w) || detail::near(p.y, 0.0) ||
           detail::near(p.y, h);
}

inline bool at_corner(Point2 p, double w, double h) {
    return (detail::near(p.x, 0.0) || detail::near(p.x, w)) &&
           (detail::near(p.y, 0.0) || detail::near(p.y, h));
}

/// Constrain a displacement by the slot's anchor, given the current point.
///
/// Interior slots pass the delta through. Boundary slots get the component
/// perpendicular to the border they currently sit on zeroed, so they slide
/// along it. At an image corner the zeroing is lifted: components that
/// would leave the image are zeroed, and if both surviving components point
/// inward only the dominant one is kept, so the conjunction slides onto one
/// of the two adjacent borders (or sticks to the corner).
inline Vec2 apply_anchor(Vec2 delta, AnchorConstraint anchor, Point2 at, double w, double h) {
    if (anchor.interior) return delta;

    const bool left = detail::near(at.x, 0.0);
    const bool right = detail::near(at.x, w);
    const bool top = detail::near(at.y, 0.0);
    const bool bottom = detail::near(at.y, h);

    if ((left || right) && (top || bottom)) {
        Vec2 d = delta;
        if ((left && d.x < 0.0) || (right && d.x > 0.0)) d.x = 0.0;
        if ((top && d.y < 0.0) || (bottom && d.y > 0.0)) d.y = 0.0;
        if (d.x != 0.0 && d.y != 0.0) {
            // both inward: keep the dominant axis so the point stays on a border
            if (std::abs(d.x) >= std::abs(d.y))
                d.y = 0.0;
            else
                d.x = 0.0;
        }
        return d;
    }
    if (left || right) return {0.0, delta.y};
    if (top || bottom) return {delta.x, 0.0};

    // off-border boundary slot (should not happen); fall back to the named side
    switch (anchor.side) {
        case BoundarySide::left:
        case BoundarySide::right: return {0.0, delta.y};
        case BoundarySide::top:
        case BoundarySide::bottom: return {delta.x, 0.0};
    }
    return delta;
}

/// Initial layout for a topology: the stored average state scaled to the
/// image, with anchored coordinates pinned to their border.
inline LayoutState average_init(const TopologySpec& spec, double w, double h) {
    if (w < 16 || h < 16) throw Error("average_init: image size must be at least 16x16");
    LayoutState st;
    st.topology = spec;
    st.points.reserve(spec.average_state.size());
    for (int j = 0; j < spec.slot_count(); ++j) {
        Point2 p{spec.average_state[j].x * w, spec.average_state[j].y * h};
        const auto& a = spec.anchors[j];
        if (!a.interior) {
            switch (a.side) {
                case BoundarySide::left: p.x = 0.0; break;
                case BoundarySide::right: p.x = w; break;
                case BoundarySide::top: p.y = 0.0; break;
                case BoundarySide::bottom: p.y = h; break;
            }
        }
        st.points.push_back(clamp_to_rect(p, w, h));
    }
    return st;
}

/// Edges whose endpoint a or b is slot j, in edge-list order.
inline std::vector<EdgeRef> incident_edges(const TopologySpec& spec, int j) {
    if (j < 0 || j >= spec.slot_count()) throw Error("incident_edges: slot index out of range");
    std::vector<EdgeRef> out;
    for (int k = 0; k < spec.edge_count(); ++k) {
        if (spec.edges[k].a == j) out.push_back({k, EdgeEnd::A});
        if (spec.edges[k].b == j) out.push_back({k, EdgeEnd::B});
    }
    return out;
}

/// Check all LayoutState invariants for the given image size.
/// Returns an explanation of the first violation, or empty when valid.
inline std::string check_state(const LayoutState& st, double w, double h) {
    const auto& spec = st.topology;
    if (static_cast<int>(st.points.size()) != spec.slot_count())
        return "point count does not match slot count";
    for (int j = 0; j < spec.slot_count(); ++j) {
        Point2 p = st.points[j];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            return "slot " + std::to_string(j) + ": non-finite coordinate";
        if (p.x < -1e-9 || p.x > w + 1e-9 || p.y < -1e-9 || p.y > h + 1e-9)
            return "slot " + std::to_string(j) + ": outside image rectangle";
        if (!spec.anchors[j].interior && !on_any_border(p, w, h))
            return "slot " + std::to_string(j) + ": boundary slot off all borders";
    }
    return {};
}

inline bool state_valid(const LayoutState& st, double w, double h) {
    return check_state(st, w, h).empty();
}

} // namespace layopt
