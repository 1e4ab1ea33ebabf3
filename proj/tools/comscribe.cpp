/*
 Copyright 2026 The ComScribe Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "comscribe/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace comscribe;

int main(int argc, char** argv) {
    CLI::App app{"comscribe: per-device-pair communication matrices from collective traces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "comscribe 1.0.0");

    const std::map<std::string, RenderSpec::Scale> scales{{"log", RenderSpec::Scale::Log},
                                                          {"linear", RenderSpec::Scale::Linear}};

    cli::AnalyzeCommand analyze;
    bool no_heatmap = false;
    auto* a = app.add_subcommand("analyze", "build matrices and statistics from JSONL traces");
    a->add_option("traces", analyze.traces, "trace files (one per process is fine)")->required();
    a->add_option("-o,--out", analyze.out_dir, "output directory (default $COMSCRIBE_OUT or comscribe_out)");
    a->add_flag("--split", analyze.split, "also write one matrix per communication type");
    a->add_flag("--symmetrize", analyze.symmetrize, "write M + M^T instead of directed matrices");
    a->add_option("--ring-perm", analyze.ring_perms, "ring order, \"0,2,1,3\" or \"COMM=0,2,1,3\"");
    a->add_option("--tree-threshold", analyze.tree_threshold, "auto selects tree below this many bytes");
    a->add_option("--format", analyze.format, "matrix format")->check(CLI::IsMember({"csv", "json", "both"}));
    a->add_option("--gpus", analyze.gpus, "number of GPUs (default: inferred)");
    a->add_option("-j,--threads", analyze.threads, "decomposition threads")->check(CLI::Range(1u, 256u));
    a->add_flag("--no-heatmap", no_heatmap, "skip SVG output");
    a->add_option("--scale", analyze.scale, "heatmap colour scale")->transform(CLI::CheckedTransformer(scales));

    cli::GenCommand gen;
    auto* g = app.add_subcommand("gen", "write a synthetic training trace");
    g->add_option("--preset", gen.preset, "resnet-like or gnmt-like");
    g->add_option("--config", gen.config, "workload plan JSON");
    g->add_option("--gpus", gen.gpus, "data-parallel ranks (default 8)");
    g->add_option("--bucket-bytes", gen.bucket_bytes, "gradient bucket cap");
    g->add_option("--iterations", gen.iterations, "iterations per epoch");
    g->add_option("--epochs", gen.epochs, "epochs");
    g->add_option("--algo", gen.algorithm, "ring, tree, collnet or auto");
    g->add_option("--scale", gen.scale, "gnmt-like call-count scale");
    g->add_option("--seed", gen.seed, "timestamp jitter seed");
    g->add_option("-o,--out", gen.out, "output file, - for stdout")->default_val("-");

    cli::VerifyCommand verify;
    auto* v = app.add_subcommand("verify", "check the byte model against the step simulation");
    v->add_option("collective", verify.collective, "allreduce, broadcast, reduce, allgather, reducescatter")->required();
    v->add_option("algo", verify.algorithm, "ring, tree or collnet")->required();
    v->add_option("ranks", verify.ranks, "communicator size")->required();
    v->add_option("bytes", verify.bytes, "payload size S")->required();
    v->add_option("--root", verify.root, "root rank for broadcast and reduce");
    v->add_option("--ring-perm", verify.ring_perm, "ring order, e.g. 0,2,1,3");

    cli::RenderCommand render;
    auto* r = app.add_subcommand("render", "render a matrix file as an SVG heatmap");
    r->add_option("input", render.input, "matrix .csv or .json")->required();
    r->add_option("-o,--out", render.out, "SVG path, - for stdout")->default_val("-");
    r->add_option("--scale", render.scale, "colour scale")->transform(CLI::CheckedTransformer(scales));
    r->add_option("--cell-px", render.cell_px, "cell size in pixels")->check(CLI::Range(1, 1024));
    r->add_flag("--show-values", render.show_values, "print byte counts in cells");
    r->add_option("--title", render.title, "title text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitValidation;
    }

    if (*a) {
        analyze.heatmaps = !no_heatmap;
        return cli::run_analyze(analyze, std::cout, std::cerr);
    }
    if (*g) return cli::run_gen(gen, std::cout, std::cerr);
    if (*v) return cli::run_verify(verify, std::cout, std::cerr);
    return cli::run_render(render, std::cout, std::cerr);
}
