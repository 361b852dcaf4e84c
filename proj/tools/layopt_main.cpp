// layopt command line: synthesize fields, infer layouts, evaluate, benchmark.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "layopt/cli.hpp"

namespace {

void add_optim_flags(CLI::App* cmd, layopt::OptimConfig& cfg) {
    cmd->add_option("--window", cfg.window, "Finite-difference window size, px")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha-min", cfg.alpha_min, "Minimum force length, px");
    cmd->add_option("--alpha-max", cfg.alpha_max, "Maximum force length, px");
    cmd->add_option("--stop-eps", cfg.stop_eps, "Minimum energy decrease to continue")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--thickness", cfg.thickness, "Raster thickness for the energy, px")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Room layout inference by optimization on edge-likelihood fields"};
    // --h is a real flag (image height), so help is --help only
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);

    // synth
    layopt::cli::SynthOptions synth;
    std::string synth_catalog;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic feature field");
    synth_cmd->set_help_flag("--help", "Print help and exit");
    synth_cmd->add_option("--layout", synth.layout_path, "Ground-truth layout JSON")->required();
    synth_cmd->add_option("--w", synth.w, "Field width, px")->required();
    synth_cmd->add_option("--h", synth.h, "Field height, px")->required();
    synth_cmd->add_option("--sigma", synth.params.blur_sigma, "Gaussian blur sigma, px")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--noise", synth.params.noise_sigma, "Additive noise sigma")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--occ", synth.params.occlusion_count, "Occlusion box count")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--occ-max-frac", synth.params.occlusion_max_frac,
                          "Max occlusion side as fraction of min(w,h)")
        ->check(CLI::Range(0.0, 0.5));
    synth_cmd->add_option("--thickness", synth.params.thickness, "Edge raster thickness, px")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.params.seed, "PRNG seed");
    synth_cmd->add_option("--out", synth.out_path, "Output LFF path")->required();
    synth_cmd->add_option("--catalog", synth.catalog_path, "Topology catalog JSON");

    // infer
    layopt::cli::InferOptions infer;
    std::string infer_method = "pio";
    int infer_topology = -1;
    auto* infer_cmd = app.add_subcommand("infer", "Optimize a layout against a field");
    infer_cmd->set_help_flag("--help", "Print help and exit");
    infer_cmd->add_option("--field", infer.field_path, "Input LFF field")->required();
    infer_cmd->add_option("--method", infer_method, "Optimizer: no|pio");
    infer_cmd->add_option("--topology", infer_topology,
                          "Run only this topology id (default: sweep the catalog)");
    infer_cmd->add_option("--trace", infer.trace_path, "Write per-iteration JSONL trace here");
    infer_cmd->add_option("--out", infer.out_path, "Output layout JSON")->required();
    infer_cmd->add_option("--report", infer.report_path,
                          "Report JSON path (default: <out>.report.json)");
    infer_cmd->add_option("--catalog", infer.catalog_path, "Topology catalog JSON");
    add_optim_flags(infer_cmd, infer.cfg);

    // eval
    layopt::cli::EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a predicted layout against ground truth");
    eval_cmd->set_help_flag("--help", "Print help and exit");
    eval_cmd->add_option("--pred", eval.pred_path, "Predicted layout JSON")->required();
    eval_cmd->add_option("--gt", eval.gt_path, "Ground-truth layout JSON")->required();
    eval_cmd->add_option("--w", eval.w, "Image width, px")->required();
    eval_cmd->add_option("--h", eval.h, "Image height, px")->required();
    eval_cmd->add_option("--out", eval.out_path, "Metrics JSON path (default: stdout only)");
    eval_cmd->add_option("--catalog", eval.catalog_path, "Topology catalog JSON");

    // bench
    layopt::cli::BenchOptions bench;
    std::string bench_methods = "no,pio";
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark methods over a case directory");
    bench_cmd->set_help_flag("--help", "Print help and exit");
    bench_cmd->add_option("--cases", bench.cases_dir, "Directory of <id>.lff/<id>.gt.json pairs")
        ->required();
    bench_cmd->add_option("--methods", bench_methods, "Comma-separated: no,pio");
    bench_cmd->add_option("--report", bench.report_path, "Report JSON path");
    bench_cmd->add_option("--catalog", bench.catalog_path, "Topology catalog JSON");
    add_optim_flags(bench_cmd, bench.cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) return layopt::cli::cmd_synth(synth);
        if (infer_cmd->parsed()) {
            infer.method = layopt::cli::parse_method(infer_method);
            if (infer_cmd->count("--topology")) infer.topology = infer_topology;
            return layopt::cli::cmd_infer(infer);
        }
        if (eval_cmd->parsed()) return layopt::cli::cmd_eval(eval);
        if (bench_cmd->parsed()) {
            bench.methods.clear();
            std::string item;
            for (char c : bench_methods + ",") {
                if (c == ',') {
                    if (!item.empty()) bench.methods.push_back(layopt::cli::parse_method(item));
                    item.clear();
                } else {
                    item += c;
                }
            }
            return layopt::cli::cmd_bench(bench);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
