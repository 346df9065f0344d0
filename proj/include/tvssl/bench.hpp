#pragma once

#include "tvssl/binary.hpp"
#include "tvssl/data_io.hpp"
#include "tvssl/graph.hpp"
#include "tvssl/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tvssl {

struct DatasetSpec {
    std::string kind = "two_moons";  // "two_moons" or "csv"
    // two_moons
    std::size_t n = 200;
    double noise = 0.08;
    std::uint64_t seed = 0;
    // csv
    std::string path;
    int label_column = 0;
    bool header = false;
    std::vector<std::string> classes;  // raw labels to keep, in class order; empty keeps all
};

struct GraphSpec {
    std::size_t k = 10;
    bool self_tuning = true;
    double sigma = 1.0;   // fixed mode
    std::size_t m = 0;    // self-tuning neighbour rank; 0 means k
};

struct KernelSpec {
    double bandwidth = 0.0;        // <= 0 selects the median heuristic
    double bandwidth_scale = 1.0;  // multiplies the chosen bandwidth
};

struct AlgorithmSpec {
    std::string label;  // column name in the tables; unique within a config
    Variant variant = Variant::TvRls;
    bool multiclass = false;
    HyperParams hp;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DatasetSpec dataset;
    GraphSpec graph;
    KernelSpec kernel;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::size_t> labels_per_class{1};
    std::size_t run_count = 10;
    std::uint64_t seed_base = 0;  // run r uses split seed seed_base + r
    std::string output;           // optional output directory

    /// Throws InvalidParameter on an empty algorithm or label list, a
    /// duplicate label, or a zero run count.
    void validate() const;
};

/// Parses the JSON form of an ExperimentConfig. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct CellResult {
    std::string algorithm;
    std::size_t labels_per_class = 0;
    std::vector<double> run_errors;  // percent, one per run
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single run
    double wall_seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct ResultTable {
    std::string experiment;
    std::string dataset;
    std::size_t run_count = 0;
    std::vector<std::string> algorithms;   // as configured
    std::vector<std::size_t> label_counts; // ascending
    std::vector<CellResult> cells;         // algorithm-major

    const CellResult& cell(std::size_t algorithm, std::size_t label_index) const {
        return cells[algorithm * label_counts.size() + label_index];
    }
    std::size_t failed_cells() const;
};

/// Percentage of unlabeled nodes whose prediction differs from the truth.
/// With no unlabeled node the rate is taken over all nodes.
double transductive_error(const std::vector<int>& predicted, const std::vector<int>& truth,
                          const std::vector<bool>& labeled_mask);

Dataset load_dataset(const DatasetSpec& spec);
SimilarityGraph build_graph(const Dataset& ds, const GraphSpec& spec);
double resolve_bandwidth(const Dataset& ds, const KernelSpec& spec);

/// Error (percent) of one algorithm on one split; throws on training failure.
double evaluate_split(const AlgorithmSpec& alg, const Dataset& ds, const KernelMatrix& k,
                      const SimilarityGraph& g, const std::vector<bool>& mask);

/// Runs the (algorithm x label count x run) grid on `jobs` worker threads.
/// Results are merged by grid position, so the table does not depend on
/// scheduling. Training failures mark the cell failed and the run continues.
ResultTable run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1);

enum class TableFormat { Markdown, Json, Csv };
TableFormat parse_format(const std::string& name);

/// Markdown lists mean +- std per cell and a wall-time table; JSON and CSV
/// carry means, deviations and per-run errors but no timings, so reruns are
/// byte-identical. Failed cells render as FAIL.
std::string emit_table(const ResultTable& rt, TableFormat format);

/// Inverse of the JSON form of emit_table.
ResultTable table_from_json(const std::string& json_text);

}  // namespace tvssl
