#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "layopt/catalog_io.hpp"
#include "layopt/metrics.hpp"
#include "layopt/optim.hpp"

namespace layopt {

/// One benchmark case: a feature field plus the ground-truth layout that
/// generated it. Each requested method runs on the ground truth's topology
/// so accuracy and running time are directly comparable.
struct BenchMethodResult {
    EvalResult eval;
    double elapsed = 0.0; // optimizer wall time, seconds
    double final_energy = 0.0;
    int iters = 0;
};

struct BenchCaseResult {
    std::string id;
    std::string field_path;
    std::string gt_path;
    int gt_topology = 0;
    bool ok = false;
    std::string error;
    std::map<Method, BenchMethodResult> per_method;
};

struct BenchAggregate {
    double mean_e_corner = 0.0;
    double mean_e_pixel = 0.0;
    double artpf = 0.0; // average running time per frame, seconds
};

struct BenchReport {
    std::vector<BenchCaseResult> cases;
    std::map<Method, BenchAggregate> aggregate;
    double speedup = 0.0; // artpf(NO) / artpf(PIO) when both methods ran
    int failed = 0;
};

/// Scan a directory for "<id>.lff" / "<id>.gt.json" pairs, sorted by id.
inline std::vector<std::pair<std::string, std::string>> discover_cases(
    const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, std::string>> cases;
    if (!fs::is_directory(dir)) throw Error("bench: '" + dir + "' is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        fs::path p = entry.path();
        if (p.extension() != ".lff") continue;
        cases.push_back({p.stem().string(), p.string()});
    }
    std::sort(cases.begin(), cases.end());
    if (cases.empty()) throw Error("bench: no cases in '" + dir + "'");
    return cases;
}

/// Run the benchmark over every (field, gt) pair in a directory. Malformed
/// cases are skipped with a log line and counted in `failed`.
inline BenchReport run_bench(const std::string& cases_dir, const std::vector<Method>& methods,
                             const Catalog& catalog, const OptimConfig& cfg,
                             std::ostream& log = std::cerr) {
    BenchReport report;
    for (const auto& [id, field_path] : discover_cases(cases_dir)) {
        BenchCaseResult cr;
        cr.id = id;
        cr.field_path = field_path;
        cr.gt_path = (std::filesystem::path(cases_dir) / (id + ".gt.json")).string();
        try {
            std::string warn;
            FeatureField field = load_field(field_path, &warn);
            if (!warn.empty()) log << "bench: case " << id << ": " << warn << "\n";
            LayoutState gt = load_layout(cr.gt_path, catalog);
            if (!state_valid(gt, field.w, field.h))
                throw Error("ground-truth layout invalid for field size");
            cr.gt_topology = gt.topology.id;

            for (Method m : methods) {
                LayoutState init = average_init(gt.topology, field.w, field.h);
                OptimReport run = run_method(field, init, cfg, m);
                BenchMethodResult mr;
                mr.eval = evaluate(run.final, gt, field.w, field.h);
                mr.elapsed = run.elapsed;
                mr.final_energy = run.final_energy;
                mr.iters = run.iters;
                cr.per_method[m] = mr;
            }
            cr.ok = true;
        } catch (const std::exception& e) {
            cr.ok = false;
            cr.error = e.what();
            ++report.failed;
            log << "bench: skipping case " << id << ": " << e.what() << "\n";
        }
        report.cases.push_back(std::move(cr));
    }

    for (Method m : methods) {
        BenchAggregate agg;
        int n = 0;
        for (const auto& cr : report.cases) {
            auto it = cr.per_method.find(m);
            if (!cr.ok || it == cr.per_method.end()) continue;
            agg.mean_e_corner += it->second.eval.e_corner;
            agg.mean_e_pixel += it->second.eval.e_pixel;
            agg.artpf += it->second.elapsed;
            ++n;
        }
        if (n > 0) {
            agg.mean_e_corner /= n;
            agg.mean_e_pixel /= n;
            agg.artpf /= n;
        }
        report.aggregate[m] = agg;
    }
    auto no_it = report.aggregate.find(Method::NO);
    auto pio_it = report.aggregate.find(Method::PIO);
    if (no_it != report.aggregate.end() && pio_it != report.aggregate.end() &&
        pio_it->second.artpf > 0.0)
        report.speedup = no_it->second.artpf / pio_it->second.artpf;
    return report;
}

/// Machine-readable report. Timing lives in dedicated keys (elapsed, artpf,
/// speedup) so reruns are byte-identical after stripping them.
inline nlohmann::json bench_report_json(const BenchReport& report) {
    nlohmann::json doc;
    doc["cases"] = nlohmann::json::array();
    for (const auto& cr : report.cases) {
        nlohmann::json jc;
        jc["id"] = cr.id;
        jc["field"] = cr.field_path;
        jc["gt"] = cr.gt_path;
        jc["gt_topology"] = cr.gt_topology;
        jc["ok"] = cr.ok;
        if (!cr.ok) jc["error"] = cr.error;
        for (const auto& [m, mr] : cr.per_method) {
            nlohmann::json jm;
            jm["e_corner"] = mr.eval.e_corner;
            jm["e_pixel"] = mr.eval.e_pixel;
            jm["final_energy"] = mr.final_energy;
            jm["iters"] = mr.iters;
            jm["elapsed"] = mr.elapsed;
            jc["methods"][to_string(m)] = jm;
        }
        doc["cases"].push_back(jc);
    }
    for (const auto& [m, agg] : report.aggregate) {
        nlohmann::json ja;
        ja["mean_e_corner"] = agg.mean_e_corner;
        ja["mean_e_pixel"] = agg.mean_e_pixel;
        ja["artpf"] = agg.artpf;
        doc["aggregate"][to_string(m)] = ja;
    }
    if (report.speedup > 0.0) doc["speedup"] = report.speedup;
    doc["failed"] = report.failed;
    return doc;
}

} // namespace layopt
