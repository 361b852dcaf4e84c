#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "layopt/bench.hpp"
#include "layopt/catalog_io.hpp"
#include "layopt/metrics.hpp"
#include "layopt/optim.hpp"
#include "layopt/synth.hpp"

namespace layopt::cli {

/// Default catalog path; the LAYOUT_CATALOG environment variable overrides
/// it, an explicit --catalog flag overrides both.
inline std::string resolve_catalog_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("LAYOUT_CATALOG"); env && *env) return env;
    return "data/catalog.json";
}

/// One trace record per iteration: {"iter": i, "e": ..., "points": [[x,y],...]}.
inline void write_trace(const OptimReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("trace: cannot open '" + path + "'");
    for (size_t i = 0; i < rep.energy_trace.size(); ++i) {
        nlohmann::json line;
        line["iter"] = i;
        line["e"] = rep.energy_trace[i];
        auto& pts = line["points"] = nlohmann::json::array();
        for (const Point2& p : rep.state_trace[i]) pts.push_back({p.x, p.y});
        out << line.dump() << "\n";
    }
}

inline Method parse_method(const std::string& s) {
    if (s == "no") return Method::NO;
    if (s == "pio") return Method::PIO;
    throw Error("unknown method '" + s + "' (expected no|pio)");
}

struct SynthOptions {
    std::string layout_path;
    int w = 320;
    int h = 320;
    SynthParams params;
    std::string out_path;
    std::string catalog_path;
};

/// synth: generate a feature field from a ground-truth layout; writes the
/// LFF next to a ".gt.json" copy of the layout so bench can pair them.
inline int cmd_synth(const SynthOptions& opt, std::ostream& os = std::cout) {
    opt.params.validate();
    Catalog cat = load_catalog(resolve_catalog_path(opt.catalog_path));
    LayoutState gt = load_layout(opt.layout_path, cat);
    std::string why = check_state(gt, opt.w, opt.h);
    if (!why.empty()) throw Error("synth: layout invalid for " + std::to_string(opt.w) + "x" +
                                  std::to_string(opt.h) + ": " + why);

    FeatureField field = synth_field(gt, opt.w, opt.h, opt.params);
    save_field(field, opt.out_path);

    std::string stem = opt.out_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".lff") stem.resize(stem.size() - 4);
    save_layout(gt, stem + ".gt.json");

    os << "synth: wrote " << opt.out_path << " (" << opt.w << "x" << opt.h << ", seed "
       << opt.params.seed << ") and " << stem << ".gt.json\n";
    return 0;
}

struct InferOptions {
    std::string field_path;
    Method method = Method::PIO;
    OptimConfig cfg;
    std::string catalog_path;
    std::optional<int> topology;
    std::string trace_path;
    std::string out_path;
    std::string report_path; // default: out_path + ".report.json"
};

/// infer: optimize a layout against a field. Without --topology the full
/// catalog is swept and the lowest-energy topology wins.
inline int cmd_infer(const InferOptions& opt, std::ostream& os = std::cout) {
    opt.cfg.validate();
    Catalog cat = load_catalog(resolve_catalog_path(opt.catalog_path));
    std::string warn;
    FeatureField field = load_field(opt.field_path, &warn);
    if (!warn.empty()) std::cerr << "infer: " << warn << "\n";

    nlohmann::json report;
    OptimReport best;
    if (opt.topology) {
        const TopologySpec* spec = cat.find(*opt.topology);
        if (!spec)
            throw Error("infer: topology " + std::to_string(*opt.topology) + " not in catalog");
        best = run_method(field, average_init(*spec, field.w, field.h), opt.cfg, opt.method);
    } else {
        SelectionResult sel = select_topology(field, cat, opt.cfg, opt.method);
        best = std::move(sel.best);
        for (const OptimReport& r : sel.all)
            report["per_topology_e"][std::to_string(r.topology_id)] = r.final_energy;
    }

    save_layout(best.final, opt.out_path);
    if (!opt.trace_path.empty()) write_trace(best, opt.trace_path);

    report["method"] = to_string(opt.method);
    report["topology_id"] = best.topology_id;
    report["final_e"] = best.final_energy;
    report["iters"] = best.iters;
    report["elapsed"] = best.elapsed;
    report["no_progress"] = best.no_progress;
    report["hit_max_iters"] = best.hit_max_iters;
    std::string report_path =
        opt.report_path.empty() ? opt.out_path + ".report.json" : opt.report_path;
    std::ofstream rout(report_path);
    if (!rout) throw Error("infer: cannot open '" + report_path + "'");
    rout << report.dump(2) << "\n";

    os << "infer: topology " << best.topology_id << ", e " << best.final_energy << ", "
       << best.iters << " iters, " << best.elapsed << " s -> " << opt.out_path << "\n";
    return 0;
}

struct EvalOptions {
    std::string pred_path;
    std::string gt_path;
    int w = 0;
    int h = 0;
    std::string out_path; // empty: stdout only
    std::string catalog_path;
};

/// eval: corner and pixel error of a predicted layout against ground truth.
inline int cmd_eval(const EvalOptions& opt, std::ostream& os = std::cout) {
    if (opt.w < 16 || opt.h < 16) throw Error("eval: image size must be at least 16x16");
    Catalog cat = load_catalog(resolve_catalog_path(opt.catalog_path));
    LayoutState pred = load_layout(opt.pred_path, cat);
    LayoutState gt = load_layout(opt.gt_path, cat);
    for (const auto* st : {&pred, &gt}) {
        std::string why = check_state(*st, opt.w, opt.h);
        if (!why.empty()) throw Error("eval: layout invalid for given size: " + why);
    }

    EvalResult r = evaluate(pred, gt, opt.w, opt.h);
    nlohmann::json doc;
    doc["e_corner"] = r.e_corner;
    doc["e_pixel"] = r.e_pixel;
    auto& pairs = doc["matched_pairs"] = nlohmann::json::array();
    for (auto [p, g] : r.matched_pairs) pairs.push_back({p, g});

    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path);
        if (!out) throw Error("eval: cannot open '" + opt.out_path + "'");
        out << doc.dump(2) << "\n";
    }
    os << "eval: e_corner " << r.e_corner << ", e_pixel " << r.e_pixel << "\n";
    return 0;
}

struct BenchOptions {
    std::string cases_dir;
    std::vector<Method> methods = {Method::NO, Method::PIO};
    OptimConfig cfg;
    std::string report_path;
    std::string catalog_path;
};

/// bench: run every (field, gt) pair in a directory through the requested
/// methods; exit code 0 iff no case failed validation.
inline int cmd_bench(const BenchOptions& opt, std::ostream& os = std::cout) {
    opt.cfg.validate();
    if (opt.methods.empty()) throw Error("bench: no methods requested");
    Catalog cat = load_catalog(resolve_catalog_path(opt.catalog_path));
    BenchReport report = run_bench(opt.cases_dir, opt.methods, cat, opt.cfg);

    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path);
        if (!out) throw Error("bench: cannot open '" + opt.report_path + "'");
        out << bench_report_json(report).dump(2) << "\n";
    }

    os << "bench: " << report.cases.size() << " cases, " << report.failed << " failed\n";
    for (const auto& [m, agg] : report.aggregate) {
        os << "  " << to_string(m) << ": mean e_corner " << agg.mean_e_corner
           << ", mean e_pixel " << agg.mean_e_pixel << ", artpf " << agg.artpf << " s\n";
    }
    if (report.speedup > 0.0) os << "  speedup (artpf NO / artpf PIO): " << report.speedup << "\n";
    return report.failed == 0 ? 0 : 1;
}

} // namespace layopt::cli
