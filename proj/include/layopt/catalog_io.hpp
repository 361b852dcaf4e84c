#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "layopt/layout.hpp"
#include "layopt/raster.hpp"

namespace layopt {

namespace detail {

inline LabelClass parse_edge_class(const std::string& s, int topo_id) {
    if (s == "wf") return LabelClass::wf;
    if (s == "ww") return LabelClass::ww;
    if (s == "wc") return LabelClass::wc;
    throw Error("catalog: topology " + std::to_string(topo_id) + ": edge class '" + s +
                "' is not one of wf/ww/wc");
}

inline RegionLabel parse_region_label(const std::string& s, int topo_id) {
    if (s == "floor") return RegionLabel::floor;
    if (s == "ceiling") return RegionLabel::ceiling;
    if (s == "wall1") return RegionLabel::wall1;
    if (s == "wall2") return RegionLabel::wall2;
    if (s == "wall3") return RegionLabel::wall3;
    throw Error("catalog: topology " + std::to_string(topo_id) + ": unknown face label '" + s +
                "'");
}

inline AnchorConstraint parse_anchor(const std::string& s, int topo_id) {
    if (s == "interior") return AnchorConstraint::make_interior();
    if (s == "left") return AnchorConstraint::boundary(BoundarySide::left);
    if (s == "right") return AnchorConstraint::boundary(BoundarySide::right);
    if (s == "top") return AnchorConstraint::boundary(BoundarySide::top);
    if (s == "bottom") return AnchorConstraint::boundary(BoundarySide::bottom);
    throw Error("catalog: topology " + std::to_string(topo_id) + ": unknown anchor '" + s + "'");
}

inline VertexRef parse_vertex_ref(const std::string& s, int n_slots, int topo_id) {
    if (s == "TL") return {true, 0};
    if (s == "TR") return {true, 1};
    if (s == "BR") return {true, 2};
    if (s == "BL") return {true, 3};
    if (s.size() >= 2 && s[0] == 'P') {
        int idx = std::stoi(s.substr(1));
        if (idx < 0 || idx >= n_slots)
            throw Error("catalog: topology " + std::to_string(topo_id) +
                        ": face cycle references missing slot " + s);
        return {false, idx};
    }
    throw Error("catalog: topology " + std::to_string(topo_id) + ": bad vertex reference '" + s +
                "'");
}

inline void validate_topology(const TopologySpec& t) {
    const std::string where = "catalog: topology " + std::to_string(t.id) + ": ";
    if (t.id < 1 || t.id > 11) throw Error(where + "id must be in [1,11]");
    const int n = t.slot_count();
    if (n < 1) throw Error(where + "needs at least one conjunction slot");
    if (t.edges.empty()) throw Error(where + "needs at least one edge");
    if (static_cast<int>(t.average_state.size()) != n)
        throw Error(where + "average_state length does not match slot count");

    std::vector<int> referenced(n, 0);
    for (size_t k = 0; k < t.edges.size(); ++k) {
        const EdgeSpec& e = t.edges[k];
        if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n)
            throw Error(where + "edge " + std::to_string(k) + " references a missing slot");
        if (e.a == e.b) throw Error(where + "edge " + std::to_string(k) + " is a self-loop");
        referenced[e.a] = referenced[e.b] = 1;
    }
    for (int j = 0; j < n; ++j)
        if (!referenced[j])
            throw Error(where + "slot " + std::to_string(j) + " is not referenced by any edge");

    for (int j = 0; j < n; ++j) {
        Point2 f = t.average_state[j];
        if (!(f.x >= 0.0 && f.x <= 1.0 && f.y >= 0.0 && f.y <= 1.0))
            throw Error(where + "average_state[" + std::to_string(j) + "] outside [0,1]^2");
        const auto& a = t.anchors[j];
        if (!a.interior) {
            bool ok = true;
            switch (a.side) {
                case BoundarySide::left: ok = f.x == 0.0; break;
                case BoundarySide::right: ok = f.x == 1.0; break;
                case BoundarySide::top: ok = f.y == 0.0; break;
                case BoundarySide::bottom: ok = f.y == 1.0; break;
            }
            if (!ok)
                throw Error(where + "average_state[" + std::to_string(j) +
                            "] does not sit on its anchored border");
        }
    }

    if (t.faces.empty()) throw Error(where + "needs at least one face");
    int walls = 0;
    std::vector<int> seen_labels;
    double area = 0.0;
    for (const auto& face : t.faces) {
        if (face.cycle.size() < 3)
            throw Error(where + "face '" + std::string(to_string(face.label)) +
                        "' has fewer than 3 vertices");
        int code = static_cast<int>(face.label);
        for (int s : seen_labels)
            if (s == code)
                throw Error(where + "duplicate face label '" + to_string(face.label) + "'");
        seen_labels.push_back(code);
        if (face.label == RegionLabel::wall1 || face.label == RegionLabel::wall2 ||
            face.label == RegionLabel::wall3)
            ++walls;

        // geometry checks on the unit square at the average state
        std::vector<Point2> poly;
        for (const auto& v : face.cycle) {
            if (v.is_corner) {
                static const Point2 corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
                poly.push_back(corners[v.index]);
            } else {
                poly.push_back(t.average_state[v.index]);
            }
        }
        if (detail::polygon_self_intersects(poly))
            throw Error(where + "face '" + std::string(to_string(face.label)) +
                        "' self-intersects at the average state");
        area += detail::polygon_area(poly);
    }
    if (walls > 3) throw Error(where + "more than 3 wall faces");
    if (std::abs(area - 1.0) > 1e-6)
        throw Error(where + "faces do not tile the image (area sum " + std::to_string(area) +
                    ")");
}

} // namespace detail

/// Parse and validate a catalog from its JSON representation.
inline Catalog parse_catalog(const nlohmann::json& doc) {
    if (!doc.contains("topologies") || !doc["topologies"].is_array())
        throw Error("catalog: missing 'topologies' array");
    Catalog cat;
    for (const auto& jt : doc["topologies"]) {
        TopologySpec t;
        t.id = jt.at("id").get<int>();
        for (const auto& ja : jt.at("anchors"))
            t.anchors.push_back(detail::parse_anchor(ja.get<std::string>(), t.id));
        for (const auto& je : jt.at("edges")) {
            if (!je.is_array() || je.size() != 3)
                throw Error("catalog: topology " + std::to_string(t.id) +
                            ": edge entries must be [a, b, class]");
            t.edges.push_back({je[0].get<int>(), je[1].get<int>(),
                               detail::parse_edge_class(je[2].get<std::string>(), t.id)});
        }
        for (const auto& jf : jt.at("faces")) {
            FaceSpec f;
            f.label = detail::parse_region_label(jf.at("label").get<std::string>(), t.id);
            for (const auto& jv : jf.at("cycle"))
                f.cycle.push_back(detail::parse_vertex_ref(jv.get<std::string>(),
                                                           static_cast<int>(t.anchors.size()),
                                                           t.id));
            t.faces.push_back(std::move(f));
        }
        for (const auto& jp : jt.at("average_state")) {
            if (!jp.is_array() || jp.size() != 2)
                throw Error("catalog: topology " + std::to_string(t.id) +
                            ": average_state entries must be [fx, fy]");
            t.average_state.push_back({jp[0].get<double>(), jp[1].get<double>()});
        }
        detail::validate_topology(t);
        for (const auto& prev : cat.topologies)
            if (prev.id == t.id)
                throw Error("catalog: duplicate topology id " + std::to_string(t.id));
        cat.topologies.push_back(std::move(t));
    }
    if (cat.topologies.empty()) throw Error("catalog: no topologies");
    return cat;
}

/// Load a topology catalog from a JSON file, checking every invariant.
inline Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_catalog: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_catalog: parse error in '" + path + "': " + e.what());
    }
    try {
        return parse_catalog(doc);
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_catalog: schema violation in '" + path + "': " + e.what());
    }
}

/// Layout file: {"topology_id": int, "points": [[x, y], ...]}.
inline void save_layout(const LayoutState& state, const std::string& path) {
    nlohmann::json doc;
    doc["topology_id"] = state.topology.id;
    auto& pts = doc["points"] = nlohmann::json::array();
    for (const Point2& p : state.points) pts.push_back({p.x, p.y});
    std::ofstream out(path);
    if (!out) throw Error("save_layout: cannot open '" + path + "'");
    out << doc.dump(2) << "\n";
}

/// Load a layout and bind it to its topology from the catalog.
inline LayoutState load_layout(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw Error("load_layout: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_layout: parse error in '" + path + "': " + e.what());
    }
    int id;
    LayoutState st;
    try {
        id = doc.at("topology_id").get<int>();
        for (const auto& jp : doc.at("points")) st.points.push_back({jp[0], jp[1]});
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_layout: schema violation in '" + path + "': " + e.what());
    }
    const TopologySpec* spec = catalog.find(id);
    if (!spec)
        throw Error("load_layout: topology id " + std::to_string(id) + " not in catalog");
    st.topology = *spec;
    if (st.points.size() != static_cast<size_t>(spec->slot_count()))
        throw Error("load_layout: point count does not match topology " + std::to_string(id));
    return st;
}

} // namespace layopt
