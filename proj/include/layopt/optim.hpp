#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "layopt/objective.hpp"

namespace layopt {

enum class Method : int { NO = 0, PIO = 1 };

inline const char* to_string(Method m) { return m == Method::NO ? "no" : "pio"; }

struct OptimConfig {
    int window = 3;          // finite-difference step, px (dx = dy)
    double alpha_min = 1.0;  // adaptive force length band, px
    double alpha_max = 3.0;
    double stop_eps = 1e-6;  // minimum energy decrease to continue
    int max_iters = 500;
    int thickness = 1;       // raster thickness for the energy

    void validate() const {
        if (window < 1) throw Error("optim: window must be >= 1");
        if (!(alpha_min > 0) || alpha_min > alpha_max)
            throw Error("optim: need 0 < alpha_min <= alpha_max");
        if (!(stop_eps > 0)) throw Error("optim: stop_eps must be > 0");
        if (max_iters < 1) throw Error("optim: max_iters must be >= 1");
        if (thickness < 1) throw Error("optim: thickness must be >= 1");
    }
};

/// Result of one optimization run. The trace holds the initial entry plus
/// one entry per iteration; `final` is the best-energy state visited.
struct OptimReport {
    LayoutState final;
    double final_energy = 0.0;
    std::vector<double> energy_trace;
    std::vector<std::vector<Point2>> state_trace;
    int iters = 0;
    double elapsed = 0.0; // seconds, whole run
    Method method = Method::NO;
    int topology_id = 0;
    bool no_progress = false;
    bool hit_max_iters = false;
};

/// Rescale a raw gradient/force into the [alpha_min, alpha_max] length band.
/// Zero input stays zero: plateaus produce no motion instead of jitter.
/// `gain` maps typical raw magnitudes into the band; the optimizers freeze
/// it from the first iteration of each run.
inline Vec2 adaptive_scale(Vec2 raw, const OptimConfig& cfg, double gain = 1.0) {
    double len = norm(raw);
    if (len == 0.0) return {0.0, 0.0};
    double target = std::clamp(len * gain, cfg.alpha_min, cfg.alpha_max);
    return (target / len) * raw;
}

/// Vector sum of endpoint forces (parallelogram law).
inline Vec2 compose_forces(const std::vector<Vec2>& forces) {
    Vec2 sum;
    for (const Vec2& f : forces) sum = sum + f;
    return sum;
}

/// Finite-difference probe position for slot j: the window-size displacement
/// along one axis, passed through the slot's anchor and clamped to the image.
inline Point2 probe_point(const LayoutState& state, int j, int axis, int sign,
                          const OptimConfig& cfg, int w, int h) {
    Vec2 delta = axis == 0 ? Vec2{static_cast<double>(sign * cfg.window), 0.0}
                           : Vec2{0.0, static_cast<double>(sign * cfg.window)};
    Vec2 d = apply_anchor(delta, state.topology.anchors[j], state.points[j], w, h);
    return clamp_to_rect(state.points[j] + d, w, h);
}

namespace detail {

struct StampCell {
    uint32_t gen = 0;
    int16_t order = 0;
    uint8_t label = 0;
};

/// Per-thread scratch shared by all workspaces: the generation counter is
/// global to the thread, so interleaved workspaces never misread stale
/// stamps. Buffers grow to the largest field seen and are reused.
struct TlsScratch {
    std::vector<StampCell> probe, base;
    std::vector<int32_t> probe_px, base_px;
    uint32_t gen = 0;

    static TlsScratch& get() {
        thread_local TlsScratch s;
        return s;
    }
    void ensure(size_t n) {
        if (probe.size() < n) probe.resize(n);
        if (probe_px.capacity() < 4096) probe_px.reserve(4096);
    }
    void ensure_base(size_t n) {
        if (base.size() < n) base.resize(n);
        if (base_px.capacity() < 4096) base_px.reserve(4096);
    }
};

/// Deterministic fixed-order blocked sum; cheap enough to run per
/// optimization without dominating PIO's per-frame cost.
inline double blocked_sum(const std::vector<float>& v) {
    double lane[4] = {0, 0, 0, 0};
    size_t i = 0;
    const size_t n4 = v.size() / 4 * 4;
    for (; i < n4; i += 4) {
        lane[0] += v[i];
        lane[1] += v[i + 1];
        lane[2] += v[i + 2];
        lane[3] += v[i + 3];
    }
    double tail = 0.0;
    for (; i < v.size(); ++i) tail += v[i];
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

/// O(N) energy and gradient evaluation: edge pixels are stamped with their
/// edge's list order into per-thread scratch, so the overwrite semantics of
/// the full label map are reproduced without touching all w*h pixels.
/// Within one workspace, set_base must not interleave with another
/// workspace's set_base between the probes that rely on it (runs are
/// sequential, so this holds).
class EnergyWorkspace {
public:
    explicit EnergyWorkspace(const FeatureField& f)
        : field_(&f), w_(f.w), h_(f.h), scratch_(TlsScratch::get()) {
        scratch_.ensure(static_cast<size_t>(w_) * h_);
        bg_sum_ = blocked_sum(f.channels[0]);
    }

    /// Energy of a full state, equal to -consistency(field, raster) up to
    /// summation order: only edge pixels are visited.
    double energy(const TopologySpec& spec, const std::vector<Point2>& points, int thickness) {
        uint32_t gen = ++scratch_.gen;
        scratch_.probe_px.clear();
        for (int k = 0; k < spec.edge_count(); ++k)
            stamp(scratch_.probe, scratch_.probe_px, gen, points[spec.edges[k].a],
                  points[spec.edges[k].b], spec.edges[k].cls, k, thickness);
        KahanSum s;
        const auto& bg = field_->channels[0];
        for (int32_t px : scratch_.probe_px) {
            const StampCell& c = scratch_.probe[px];
            s.add(static_cast<double>(field_->channels[c.label][px]) -
                  static_cast<double>(bg[px]));
        }
        return -(bg_sum_ + s.value()) / (static_cast<double>(w_) * h_);
    }

    double energy(const LayoutState& state, int thickness) {
        return energy(state.topology, state.points, thickness);
    }

    /// Stamp every edge not incident to slot j; later probes draw the
    /// incident edges on top with correct draw-order resolution.
    void set_base(const LayoutState& state, int j, int thickness) {
        scratch_.ensure_base(static_cast<size_t>(w_) * h_);
        base_gen_ = ++scratch_.gen;
        scratch_.base_px.clear();
        const auto& spec = state.topology;
        for (int k = 0; k < spec.edge_count(); ++k) {
            if (spec.edges[k].a == j || spec.edges[k].b == j) continue;
            stamp(scratch_.base, scratch_.base_px, base_gen_, state.points[spec.edges[k].a],
                  state.points[spec.edges[k].b], spec.edges[k].cls, k, thickness);
        }
        KahanSum s;
        const auto& bg = field_->channels[0];
        for (int32_t px : scratch_.base_px) {
            const StampCell& c = scratch_.base[px];
            s.add(static_cast<double>(field_->channels[c.label][px]) -
                  static_cast<double>(bg[px]));
        }
        base_sum_ = s.value();
    }

    /// Energy with slot j moved to `pos`, relative to the current base.
    double energy_with_incident(const LayoutState& state, int j, Point2 pos, int thickness) {
        scratch_.ensure_base(static_cast<size_t>(w_) * h_);
        uint32_t gen = ++scratch_.gen;
        scratch_.probe_px.clear();
        const auto& spec = state.topology;
        for (int k = 0; k < spec.edge_count(); ++k) {
            const EdgeSpec& e = spec.edges[k];
            if (e.a != j && e.b != j) continue;
            Point2 pa = e.a == j ? pos : state.points[e.a];
            Point2 pb = e.b == j ? pos : state.points[e.b];
            stamp(scratch_.probe, scratch_.probe_px, gen, pa, pb, e.cls, k, thickness);
        }
        KahanSum s;
        const auto& bg = field_->channels[0];
        for (int32_t px : scratch_.probe_px) {
            const StampCell& c = scratch_.probe[px];
            bool base_set = scratch_.base[px].gen == base_gen_;
            if (base_set && scratch_.base[px].order > c.order)
                continue; // base edge stays on top
            double under = base_set
                               ? static_cast<double>(field_->channels[scratch_.base[px].label][px])
                               : static_cast<double>(bg[px]);
            s.add(static_cast<double>(field_->channels[c.label][px]) - under);
        }
        return -(bg_sum_ + base_sum_ + s.value()) / (static_cast<double>(w_) * h_);
    }

private:
    void stamp(std::vector<StampCell>& cells, std::vector<int32_t>& px_list, uint32_t gen,
               Point2 a, Point2 b, LabelClass cls, int order, int thickness) {
        for_each_segment_pixel(a, b, w_, h_, thickness, [&](int x, int y) {
            int32_t idx = y * w_ + x;
            StampCell& c = cells[idx];
            if (c.gen != gen) {
                c.gen = gen;
                px_list.push_back(idx);
            }
            c.order = static_cast<int16_t>(order);
            c.label = static_cast<uint8_t>(cls);
        });
    }

    const FeatureField* field_;
    int w_, h_;
    TlsScratch& scratch_;
    double bg_sum_ = 0.0;
    double base_sum_ = 0.0;
    // sentinel: never matches untouched cells (gen 0) or live generations
    uint32_t base_gen_ = 0xffffffffu;
};

} // namespace detail

/// Gradient evaluation route: `incremental` re-rasterizes only the edges
/// incident to the displaced conjunction (O(N) per probe); `full_raster`
/// re-rasterizes and sums the whole image (O(N^2) per probe, kept for the
/// oracle equivalence check at small sizes).
enum class NoImpl { incremental, full_raster };

/// Central finite difference of the full-raster energy with respect to one
/// conjunction: (e(x+dx) - e(x-dx), e(y+dy) - e(y-dy)), with the probe
/// displacements anchored and clamped like real updates.
inline Vec2 no_gradient(const FeatureField& field, const LayoutState& state, int j,
                        const OptimConfig& cfg, NoImpl impl = NoImpl::incremental) {
    cfg.validate();
    if (j < 0 || j >= state.topology.slot_count())
        throw Error("no_gradient: slot index out of range");

    Point2 px_plus = probe_point(state, j, 0, +1, cfg, field.w, field.h);
    Point2 px_minus = probe_point(state, j, 0, -1, cfg, field.w, field.h);
    Point2 py_plus = probe_point(state, j, 1, +1, cfg, field.w, field.h);
    Point2 py_minus = probe_point(state, j, 1, -1, cfg, field.w, field.h);

    if (impl == NoImpl::full_raster) {
        auto e_at = [&](Point2 pos) {
            LayoutState s = state;
            s.points[j] = pos;
            return energy(field, s, cfg.thickness);
        };
        return {e_at(px_plus) - e_at(px_minus), e_at(py_plus) - e_at(py_minus)};
    }

    detail::EnergyWorkspace ws(field);
    ws.set_base(state, j, cfg.thickness);
    double ex_p = ws.energy_with_incident(state, j, px_plus, cfg.thickness);
    double ex_m = ws.energy_with_incident(state, j, px_minus, cfg.thickness);
    double ey_p = ws.energy_with_incident(state, j, py_plus, cfg.thickness);
    double ey_m = ws.energy_with_incident(state, j, py_minus, cfg.thickness);
    return {ex_p - ex_m, ey_p - ey_m};
}

/// Raw (unscaled) endpoint force of one edge: the negative central
/// difference of the endpoint energy on the edge's own channel.
inline Vec2 pio_force_raw(const FeatureField& field, const LayoutState& state,
                          const EdgeSpec& edge, EdgeEnd end, const OptimConfig& cfg) {
    Point2 q = state.points[end == EdgeEnd::A ? edge.a : edge.b];
    const double d = cfg.window;
    double gx = endpoint_energy(field, {q.x + d, q.y}, edge.cls) -
                endpoint_energy(field, {q.x - d, q.y}, edge.cls);
    double gy = endpoint_energy(field, {q.x, q.y + d}, edge.cls) -
                endpoint_energy(field, {q.x, q.y - d}, edge.cls);
    return {-gx, -gy};
}

/// Endpoint force after adaptive scaling, ready for composition.
inline Vec2 pio_force(const FeatureField& field, const LayoutState& state, const EdgeSpec& edge,
                      EdgeEnd end, const OptimConfig& cfg, double gain = 1.0) {
    return adaptive_scale(pio_force_raw(field, state, edge, end, cfg), cfg, gain);
}

namespace detail {

inline double median_magnitude(std::vector<double> mags) {
    std::sort(mags.begin(), mags.end());
    return mags[mags.size() / 2];
}

/// Shared loop of both optimizers. `collect` fills, per slot, the list of
/// raw force vectors whose scaled sum is that slot's update (one gradient
/// vector for NO, one force per incident edge for PIO). The adaptive gain
/// is frozen from the median nonzero raw magnitude of the first iteration.
template <class CollectFn>
OptimReport run_descent(const FeatureField& field, const LayoutState& state0,
                        const OptimConfig& cfg, Method method, CollectFn&& collect) {
    cfg.validate();
    const int w = field.w, h = field.h;
    std::string why = check_state(state0, w, h);
    if (!why.empty()) throw Error("optimizer: invalid initial state: " + why);
    const auto t0 = std::chrono::steady_clock::now();

    detail::EnergyWorkspace ws(field);
    OptimReport rep;
    rep.method = method;
    rep.topology_id = state0.topology.id;

    LayoutState state = state0;
    double e_cur = ws.energy(state, cfg.thickness);
    rep.energy_trace.push_back(e_cur);
    rep.state_trace.push_back(state.points);

    std::vector<Point2> best_points = state.points;
    double best_e = e_cur;

    double gain = 1.0;
    const int n = state.topology.slot_count();
    std::vector<std::vector<Vec2>> forces(n);
    std::vector<Point2> next(state.points.size());

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        for (auto& fs : forces) fs.clear();
        collect(ws, state, forces);

        if (iter == 1) {
            std::vector<double> nonzero;
            for (const auto& fs : forces)
                for (const Vec2& f : fs) {
                    double m = norm(f);
                    if (m > 0.0) nonzero.push_back(m);
                }
            if (nonzero.empty()) {
                rep.no_progress = true;
                break;
            }
            gain = 1.0 / median_magnitude(std::move(nonzero));
        }

        // Jacobi update: all slots move based on the iteration-start state
        for (int j = 0; j < n; ++j) {
            Vec2 delta{0.0, 0.0};
            for (const Vec2& f : forces[j]) delta = delta + adaptive_scale(f, cfg, gain);
            delta = apply_anchor(delta, state.topology.anchors[j], state.points[j], w, h);
            next[j] = clamp_to_rect(state.points[j] + delta, w, h);
        }

        double e_new = ws.energy(state.topology, next, cfg.thickness);
        state.points.swap(next);
        rep.energy_trace.push_back(e_new);
        rep.state_trace.push_back(state.points);
        rep.iters = iter;
        if (e_new < best_e) {
            best_e = e_new;
            best_points = state.points;
        }
        if (e_cur - e_new <= cfg.stop_eps) break;
        e_cur = e_new;
        if (iter == cfg.max_iters) rep.hit_max_iters = true;
    }

    rep.final = std::move(state);
    rep.final.points = std::move(best_points);
    rep.final_energy = best_e;
    rep.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace detail

/// Naive Optimization: finite-difference descent on the full-raster energy,
/// looping while the energy keeps decreasing by more than stop_eps.
inline OptimReport run_no(const FeatureField& field, const LayoutState& state0,
                          const OptimConfig& cfg = {}) {
    const int w = field.w, h = field.h;
    return detail::run_descent(
        field, state0, cfg, Method::NO,
        [&](detail::EnergyWorkspace& ws, const LayoutState& state,
            std::vector<std::vector<Vec2>>& forces) {
            for (int j = 0; j < state.topology.slot_count(); ++j) {
                ws.set_base(state, j, cfg.thickness);
                Point2 pxp = probe_point(state, j, 0, +1, cfg, w, h);
                Point2 pxm = probe_point(state, j, 0, -1, cfg, w, h);
                Point2 pyp = probe_point(state, j, 1, +1, cfg, w, h);
                Point2 pym = probe_point(state, j, 1, -1, cfg, w, h);
                double gx = ws.energy_with_incident(state, j, pxp, cfg.thickness) -
                            ws.energy_with_incident(state, j, pxm, cfg.thickness);
                double gy = ws.energy_with_incident(state, j, pyp, cfg.thickness) -
                            ws.energy_with_incident(state, j, pym, cfg.thickness);
                forces[j].push_back({-gx, -gy});
            }
        });
}

/// Physics Inspired Optimization: per-edge endpoint forces on each edge's
/// own channel, scaled into the force band and composed by vector sum.
/// The per-iteration stopping energy is still the full-raster objective.
inline OptimReport run_pio(const FeatureField& field, const LayoutState& state0,
                           const OptimConfig& cfg = {}) {
    std::vector<std::vector<EdgeRef>> incidence;
    for (int j = 0; j < state0.topology.slot_count(); ++j)
        incidence.push_back(incident_edges(state0.topology, j));
    return detail::run_descent(
        field, state0, cfg, Method::PIO,
        [&](detail::EnergyWorkspace&, const LayoutState& state,
            std::vector<std::vector<Vec2>>& forces) {
            for (int j = 0; j < state.topology.slot_count(); ++j) {
                for (const EdgeRef& ref : incidence[j]) {
                    forces[j].push_back(pio_force_raw(
                        field, state, state.topology.edges[ref.edge_index], ref.end, cfg));
                }
            }
        });
}

inline OptimReport run_method(const FeatureField& field, const LayoutState& state0,
                              const OptimConfig& cfg, Method method) {
    return method == Method::NO ? run_no(field, state0, cfg) : run_pio(field, state0, cfg);
}

struct SelectionResult {
    OptimReport best;
    std::vector<OptimReport> all; // catalog order
};

/// Optimize every catalog topology from its average state and keep the run
/// with the lowest final energy. All reports are returned so failure cases
/// can be inspected per topology.
inline SelectionResult select_topology(const FeatureField& field, const Catalog& catalog,
                                       const OptimConfig& cfg, Method method) {
    if (catalog.topologies.empty()) throw Error("select_topology: empty catalog");
    SelectionResult res;
    int best_idx = 0;
    for (size_t i = 0; i < catalog.topologies.size(); ++i) {
        LayoutState init = average_init(catalog.topologies[i], field.w, field.h);
        res.all.push_back(run_method(field, init, cfg, method));
        if (res.all[i].final_energy < res.all[best_idx].final_energy)
            best_idx = static_cast<int>(i);
    }
    res.best = res.all[best_idx];
    return res;
}

} // namespace layopt
