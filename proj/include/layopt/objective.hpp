#pragma once

#include "layopt/field.hpp"
#include "layopt/raster.hpp"

namespace layopt {

/// Energies are kept in the log domain throughout: e = -CO, never exp(-CO).
using Energy = double;

/// Consistency objective between a feature field and an edge label map:
/// the mean over pixels of the feature value at each pixel's label,
/// i.e. (1/wh) * sum_l sum_{m,n} F_l(m,n) * M_l(m,n) with M_l the binary
/// mask of label l. Compensated summation keeps finite differences of the
/// result meaningful near the stopping threshold.
inline double consistency(const FeatureField& f, const LabelMap& m) {
    if (f.w != m.w || f.h != m.h) throw Error("consistency: field/map dimension mismatch");
    KahanSum sum;
    const size_t n = m.data.size();
    for (size_t i = 0; i < n; ++i)
        sum.add(static_cast<double>(f.channels[m.data[i]][i]));
    return sum.value() / (static_cast<double>(f.w) * f.h);
}

/// Full-raster energy of a layout state: e = -CO of its edge label map.
inline Energy energy(const FeatureField& f, const LayoutState& state, int thickness = 1) {
    return -consistency(f, rasterize_edges(state, f.w, f.h, thickness));
}

/// Endpoint energy of one conjunction against one edge channel:
/// e2 = -F_c(q), sampled bilinearly.
inline Energy endpoint_energy(const FeatureField& f, Point2 q, LabelClass c) {
    return -sample(f, c, q.x, q.y);
}

} // namespace layopt
