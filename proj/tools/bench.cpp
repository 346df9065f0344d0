// bench: command-line harness over the tvssl C API.
#include "tvssl/tvssl.h"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace {

namespace fs = std::filesystem;

int report(tvssl_status st, const char* what) {
    std::fprintf(stderr, "bench: %s failed (%s): %s\n", what, tvssl_status_name(st),
                 tvssl_last_error());
    return 1;
}

struct StringDeleter {
    void operator()(char* s) const { tvssl_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ResultDeleter {
    void operator()(tvssl_result* r) const { tvssl_result_free(r); }
};
struct DatasetDeleter {
    void operator()(tvssl_dataset* d) const { tvssl_dataset_free(d); }
};
struct GraphDeleter {
    void operator()(tvssl_graph* g) const { tvssl_graph_free(g); }
};

bool write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

const char* extension(const std::string& format) {
    if (format == "json") return "json";
    if (format == "csv") return "csv";
    return "md";
}

struct RunArgs {
    std::string config;
    std::string out;
    std::string format = "markdown";
    unsigned jobs = 1;
};

int cmd_run(const RunArgs& a) {
    tvssl_result* raw = nullptr;
    tvssl_status st = tvssl_experiment_run_file(a.config.c_str(), a.jobs, &raw);
    if (st != TVSSL_OK) return report(st, "run");
    std::unique_ptr<tvssl_result, ResultDeleter> result(raw);

    char* text_raw = nullptr;
    st = tvssl_result_render(result.get(), a.format.c_str(), &text_raw);
    if (st != TVSSL_OK) return report(st, "render");
    OwnedString text(text_raw);

    std::string dir = a.out.empty() ? tvssl_result_output_dir(result.get()) : a.out;
    if (!dir.empty()) {
        fs::path path = fs::path(dir) / (std::string("results.") + extension(a.format));
        if (!write_file(path, text.get())) {
            std::fprintf(stderr, "bench: cannot write %s\n", path.string().c_str());
            return 1;
        }
    }
    std::cout << text.get();
    std::size_t failed = tvssl_result_failed_cells(result.get());
    if (failed > 0) {
        std::fprintf(stderr, "bench: %zu cell(s) failed\n", failed);
        return 2;
    }
    return 0;
}

struct MoonsArgs {
    std::size_t n = 200;
    double noise = 0.08;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_moons(const MoonsArgs& a) {
    tvssl_dataset* raw = nullptr;
    tvssl_status st = tvssl_dataset_two_moons(a.n, a.noise, a.seed, &raw);
    if (st != TVSSL_OK) return report(st, "gen-moons");
    std::unique_ptr<tvssl_dataset, DatasetDeleter> ds(raw);
    st = tvssl_dataset_save_csv(ds.get(), a.out.c_str());
    if (st != TVSSL_OK) return report(st, "save");
    return 0;
}

struct GraphArgs {
    std::string data;
    int label_column = 0;
    bool header = false;
    std::size_t k = 10;
    std::string sigma_mode = "self_tuning";
    double sigma = 1.0;
    std::size_t m = 0;
    std::string out;
};

int cmd_graph(const GraphArgs& a) {
    tvssl_dataset* raw = nullptr;
    tvssl_status st = tvssl_dataset_load_csv(a.data.c_str(), a.label_column, a.header ? 1 : 0, &raw);
    if (st != TVSSL_OK) return report(st, "load");
    std::unique_ptr<tvssl_dataset, DatasetDeleter> ds(raw);

    tvssl_sigma_mode mode = a.sigma_mode == "fixed" ? TVSSL_SIGMA_FIXED : TVSSL_SIGMA_SELF_TUNING;
    tvssl_graph* graw = nullptr;
    st = tvssl_graph_build_knn(ds.get(), a.k, mode, a.sigma, a.m, &graw);
    if (st != TVSSL_OK) return report(st, "graph");
    std::unique_ptr<tvssl_graph, GraphDeleter> g(graw);
    st = tvssl_graph_save(g.get(), a.out.c_str());
    if (st != TVSSL_OK) return report(st, "save");
    std::printf("%zu nodes, %zu edges\n", tvssl_graph_nodes(g.get()), tvssl_graph_edges(g.get()));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised graph classification benchmarks"};
    app.set_version_flag("--version", std::string(tvssl_version()));
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment config and print the error table");
    run_cmd->add_option("--config", run.config, "Experiment JSON file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Directory for the results file (defaults to the config's output)");
    run_cmd->add_option("--format", run.format, "Table format")
        ->check(CLI::IsMember({"markdown", "json", "csv"}));
    run_cmd->add_option("--jobs", run.jobs, "Worker threads")->check(CLI::PositiveNumber);

    MoonsArgs moons;
    auto* moons_cmd = app.add_subcommand("gen-moons", "Write a two-moons dataset as CSV");
    moons_cmd->add_option("--n", moons.n, "Number of points (even)");
    moons_cmd->add_option("--noise", moons.noise, "Gaussian noise level")->check(CLI::NonNegativeNumber);
    moons_cmd->add_option("--seed", moons.seed, "Random seed");
    moons_cmd->add_option("--out", moons.out, "Output CSV path")->required();

    GraphArgs graph;
    auto* graph_cmd = app.add_subcommand("graph", "Build a k-NN similarity graph and write its edge list");
    graph_cmd->add_option("--data", graph.data, "Input CSV")->required()->check(CLI::ExistingFile);
    graph_cmd->add_option("--label-column", graph.label_column, "Label column, -1 for the last");
    graph_cmd->add_flag("--header", graph.header, "Skip a header row");
    graph_cmd->add_option("--k", graph.k, "Neighbours per node")->check(CLI::PositiveNumber);
    graph_cmd->add_option("--sigma-mode", graph.sigma_mode, "Weight scale")
        ->check(CLI::IsMember({"fixed", "self_tuning"}));
    graph_cmd->add_option("--sigma", graph.sigma, "Scale in fixed mode")->check(CLI::PositiveNumber);
    graph_cmd->add_option("--m", graph.m, "Self-tuning neighbour rank, 0 for k");
    graph_cmd->add_option("--out", graph.out, "Output edge-list path")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return cmd_run(run);
    if (moons_cmd->parsed()) return cmd_gen_moons(moons);
    return cmd_graph(graph);
}
