#include "tvssl/bench.hpp"

#include "json_util.hpp"
#include "tvssl/error.hpp"
#include "tvssl/multiclass.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace tvssl {

using detail::check_keys;
using detail::get_as;
using detail::Json;
using detail::read_opt;

void ExperimentConfig::validate() const {
    require(!algorithms.empty(), ErrorCode::InvalidParameter, "config lists no algorithm");
    require(!labels_per_class.empty(), ErrorCode::InvalidParameter, "config lists no label count");
    require(run_count >= 1, ErrorCode::InvalidParameter, "run_count must be at least 1");
    std::set<std::string> seen;
    for (const auto& a : algorithms) {
        require(seen.insert(a.label).second, ErrorCode::InvalidParameter,
                "algorithm label '" + a.label + "' used twice");
        require(!(a.multiclass && is_supervised_variant(a.variant)), ErrorCode::InvalidParameter,
                "'" + a.label + "': rls and svm have no multiclass form");
        a.hp.validate();
    }
    for (auto l : labels_per_class)
        require(l >= 1, ErrorCode::InvalidParameter, "labels_per_class entries must be >= 1");
    require(graph.k >= 1, ErrorCode::InvalidParameter, "graph k must be >= 1");
}

ExperimentConfig parse_config(const std::string& json_text) {
    const Json root = detail::parse_json(json_text, "experiment config");
    check_keys(root, {"name", "dataset", "graph", "kernel", "defaults", "algorithms", "labels_per_class",
                      "run_count", "seed_base", "output"},
               "config");
    ExperimentConfig cfg;
    read_opt(root, "name", cfg.name, "config");
    read_opt(root, "output", cfg.output, "config");
    read_opt(root, "run_count", cfg.run_count, "config");
    read_opt(root, "seed_base", cfg.seed_base, "config");
    read_opt(root, "labels_per_class", cfg.labels_per_class, "config");

    if (root.contains("dataset")) {
        const Json& d = root["dataset"];
        check_keys(d, {"kind", "n", "noise", "seed", "path", "label_column", "header", "classes"}, "dataset");
        DatasetSpec& s = cfg.dataset;
        read_opt(d, "kind", s.kind, "dataset");
        read_opt(d, "n", s.n, "dataset");
        read_opt(d, "noise", s.noise, "dataset");
        read_opt(d, "seed", s.seed, "dataset");
        read_opt(d, "path", s.path, "dataset");
        read_opt(d, "label_column", s.label_column, "dataset");
        read_opt(d, "header", s.header, "dataset");
        read_opt(d, "classes", s.classes, "dataset");
        require(s.kind == "two_moons" || s.kind == "csv", ErrorCode::Parse,
                "dataset.kind must be \"two_moons\" or \"csv\"");
    }
    if (root.contains("graph")) {
        const Json& g = root["graph"];
        check_keys(g, {"k", "sigma_mode", "sigma", "m"}, "graph");
        read_opt(g, "k", cfg.graph.k, "graph");
        read_opt(g, "sigma", cfg.graph.sigma, "graph");
        read_opt(g, "m", cfg.graph.m, "graph");
        if (g.contains("sigma_mode")) {
            const auto mode = get_as<std::string>(g, "sigma_mode", "graph");
            require(mode == "fixed" || mode == "self_tuning", ErrorCode::Parse,
                    "graph.sigma_mode must be \"fixed\" or \"self_tuning\"");
            cfg.graph.self_tuning = mode == "self_tuning";
        }
    }
    if (root.contains("kernel")) {
        const Json& k = root["kernel"];
        check_keys(k, {"bandwidth", "scale"}, "kernel");
        if (k.contains("bandwidth")) {
            if (k["bandwidth"].is_string()) {
                require(k["bandwidth"].get<std::string>() == "median", ErrorCode::Parse,
                        "kernel.bandwidth must be a number or \"median\"");
                cfg.kernel.bandwidth = 0.0;
            } else {
                cfg.kernel.bandwidth = get_as<double>(k, "bandwidth", "kernel");
                require(cfg.kernel.bandwidth > 0.0, ErrorCode::Parse, "kernel.bandwidth must be positive");
            }
        }
        read_opt(k, "scale", cfg.kernel.bandwidth_scale, "kernel");
        require(cfg.kernel.bandwidth_scale > 0.0, ErrorCode::Parse, "kernel.scale must be positive");
    }

    HyperParams defaults;
    if (root.contains("defaults")) detail::hp_from_json(root["defaults"], defaults, "defaults");

    require(root.contains("algorithms") && root["algorithms"].is_array(), ErrorCode::Parse,
            "config needs an \"algorithms\" array");
    for (const Json& a : root["algorithms"]) {
        check_keys(a, {"algorithm", "label", "multiclass", "params"}, "algorithms[]");
        AlgorithmSpec spec;
        spec.variant = parse_variant(get_as<std::string>(a, "algorithm", "algorithms[]"));
        spec.label = variant_name(spec.variant);
        read_opt(a, "multiclass", spec.multiclass, "algorithms[]");
        if (spec.multiclass) spec.label = "mc_" + spec.label;
        read_opt(a, "label", spec.label, "algorithms[]");
        spec.hp = defaults;
        if (a.contains("params")) detail::hp_from_json(a["params"], spec.hp, spec.label + ".params");
        cfg.algorithms.push_back(std::move(spec));
    }
    std::sort(cfg.labels_per_class.begin(), cfg.labels_per_class.end());
    cfg.labels_per_class.erase(std::unique(cfg.labels_per_class.begin(), cfg.labels_per_class.end()),
                               cfg.labels_per_class.end());
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::size_t ResultTable::failed_cells() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; }));
}

double transductive_error(const std::vector<int>& predicted, const std::vector<int>& truth,
                          const std::vector<bool>& labeled_mask) {
    require(predicted.size() == truth.size() && truth.size() == labeled_mask.size(),
            ErrorCode::DimensionMismatch, "prediction, truth and mask lengths differ");
    require(!truth.empty(), ErrorCode::InvalidParameter, "no points to evaluate");
    const bool any_unlabeled = std::find(labeled_mask.begin(), labeled_mask.end(), false) != labeled_mask.end();
    std::size_t wrong = 0, total = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (any_unlabeled && labeled_mask[i]) continue;
        ++total;
        wrong += predicted[i] != truth[i];
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(total);
}

Dataset load_dataset(const DatasetSpec& spec) {
    Dataset ds;
    if (spec.kind == "two_moons") {
        ds = make_two_moons(spec.n, spec.noise, spec.seed);
    } else {
        require(!spec.path.empty(), ErrorCode::InvalidParameter, "csv dataset needs a path");
        ds = load_csv(spec.path, spec.label_column, spec.header);
    }
    if (!spec.classes.empty()) ds = select_classes(ds, spec.classes);
    return ds;
}

SimilarityGraph build_graph(const Dataset& ds, const GraphSpec& spec) {
    if (spec.self_tuning) return build_knn_graph(ds.data, spec.k, SelfTuningSigma{spec.m ? spec.m : spec.k});
    return build_knn_graph(ds.data, spec.k, FixedSigma{spec.sigma});
}

double resolve_bandwidth(const Dataset& ds, const KernelSpec& spec) {
    const double base = spec.bandwidth > 0.0 ? spec.bandwidth : median_bandwidth(ds.data);
    return base * spec.bandwidth_scale;
}

double evaluate_split(const AlgorithmSpec& alg, const Dataset& ds, const KernelMatrix& k,
                      const SimilarityGraph& g, const std::vector<bool>& mask) {
    if (alg.multiclass) {
        std::vector<int> cls(ds.size(), -1);
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (mask[i]) cls[i] = ds.labels[i] - 1;
        const MultiLabelSet mls(std::move(cls), ds.n_classes());
        const MulticlassModel m = multiclass_train(alg.variant, k, g, mls, alg.hp);
        std::vector<int> pred = predict_multiclass_transductive(m);
        for (int& p : pred) ++p;
        return transductive_error(pred, ds.labels, mask);
    }

    const std::vector<int> y = binary_labels(ds);
    const LabeledSet ls(y, mask);
    BinaryModel model;
    if (is_supervised_variant(alg.variant)) {
        ls.require_both_classes();
        const auto idx = ls.labeled_indices();
        const auto n = static_cast<Eigen::Index>(idx.size());
        KernelMatrix kl{Matrix(n, n), k.bandwidth};
        Vector yl(n);
        for (Eigen::Index a = 0; a < n; ++a) {
            yl[a] = y[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
            for (Eigen::Index b = 0; b < n; ++b)
                kl.values(a, b) = k.values(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
        model = alg.variant == Variant::Rls ? rls_train(kl, yl, alg.hp) : svm_train(kl, yl, alg.hp);
        model.expansion = idx;
    } else {
        switch (alg.variant) {
            case Variant::LapRls: model = lap_rls_train(k, g, ls, alg.hp); break;
            case Variant::TvRls: model = tv_rls_train(k, g, ls, alg.hp); break;
            case Variant::CheegerRls: model = cheeger_rls_train(k, g, ls, alg.hp); break;
            case Variant::LapSvm: model = lap_svm_train(k, g, ls, alg.hp); break;
            case Variant::TvSvm: model = tv_svm_train(k, g, ls, alg.hp); break;
            case Variant::CheegerSvm: model = cheeger_svm_train(k, g, ls, alg.hp); break;
            default: fail(ErrorCode::Unsupported, "unexpected variant");
        }
    }
    return transductive_error(predict_transductive(model, k), y, mask);
}

namespace {

struct RunOutcome {
    double error = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string message;
};

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg, unsigned jobs) {
    cfg.validate();
    const Dataset ds = load_dataset(cfg.dataset);
    const SimilarityGraph graph = build_graph(ds, cfg.graph);
    const KernelMatrix kernel = rbf_gram(ds.data, resolve_bandwidth(ds, cfg.kernel));

    std::vector<std::size_t> label_counts = cfg.labels_per_class;
    std::sort(label_counts.begin(), label_counts.end());

    const std::size_t n_alg = cfg.algorithms.size();
    const std::size_t n_lab = label_counts.size();
    const std::size_t n_run = cfg.run_count;
    const std::size_t total = n_alg * n_lab * n_run;

    // Masks depend only on (label count, run); build them once, up front.
    std::vector<std::vector<bool>> masks(n_lab * n_run);
    std::vector<std::string> mask_errors(n_lab * n_run);
    for (std::size_t l = 0; l < n_lab; ++l)
        for (std::size_t r = 0; r < n_run; ++r) {
            SplitSpec spec{label_counts[l], cfg.seed_base + r, n_run};
            try {
                masks[l * n_run + r] = make_split_mask(ds, spec);
            } catch (const Error& e) {
                mask_errors[l * n_run + r] = e.what();
            }
        }

    std::vector<RunOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) return;
            const std::size_t a = job / (n_lab * n_run);
            const std::size_t split = job % (n_lab * n_run);
            RunOutcome& out = outcomes[job];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (!mask_errors[split].empty()) fail(ErrorCode::InsufficientLabels, mask_errors[split]);
                out.error = evaluate_split(cfg.algorithms[a], ds, kernel, graph, masks[split]);
            } catch (const std::exception& e) {
                out.failed = true;
                out.message = e.what();
            }
            out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ResultTable rt;
    rt.experiment = cfg.name;
    rt.dataset = ds.name;
    rt.run_count = n_run;
    rt.label_counts = label_counts;
    for (const auto& a : cfg.algorithms) rt.algorithms.push_back(a.label);
    for (std::size_t a = 0; a < n_alg; ++a)
        for (std::size_t l = 0; l < n_lab; ++l) {
            CellResult cell;
            cell.algorithm = cfg.algorithms[a].label;
            cell.labels_per_class = label_counts[l];
            for (std::size_t r = 0; r < n_run; ++r) {
                const RunOutcome& o = outcomes[(a * n_lab + l) * n_run + r];
                cell.wall_seconds += o.seconds;
                if (o.failed) {
                    if (!cell.failed) cell.error = "run " + std::to_string(r) + ": " + o.message;
                    cell.failed = true;
                }
                cell.run_errors.push_back(o.failed ? std::nan("") : o.error);
            }
            if (cell.failed) {
                cell.run_errors.clear();
            } else {
                cell.mean = std::accumulate(cell.run_errors.begin(), cell.run_errors.end(), 0.0) /
                            static_cast<double>(n_run);
                cell.stddev = sample_std(cell.run_errors, cell.mean);
            }
            rt.cells.push_back(std::move(cell));
        }
    return rt;
}

TableFormat parse_format(const std::string& name) {
    if (name == "markdown" || name == "md") return TableFormat::Markdown;
    if (name == "json") return TableFormat::Json;
    if (name == "csv") return TableFormat::Csv;
    fail(ErrorCode::InvalidParameter, "unknown format '" + name + "' (markdown, json, csv)");
}

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string emit_markdown(const ResultTable& rt) {
    std::ostringstream os;
    os << "## " << rt.experiment << " (" << rt.dataset << ", " << rt.run_count << " runs)\n\n";
    os << "Transductive error (%), mean +- std:\n\n| # labels per class |";
    for (auto l : rt.label_counts) os << ' ' << l << " |";
    os << "\n|---|";
    for (std::size_t l = 0; l < rt.label_counts.size(); ++l) os << "---|";
    os << '\n';
    for (std::size_t a = 0; a < rt.algorithms.size(); ++a) {
        os << "| " << rt.algorithms[a] << " |";
        for (std::size_t l = 0; l < rt.label_counts.size(); ++l) {
            const CellResult& c = rt.cell(a, l);
            os << ' ' << (c.failed ? std::string("FAIL") : fixed2(c.mean) + " +- " + fixed2(c.stddev)) << " |";
        }
        os << '\n';
    }
    os << "\nWall time (s, summed over runs):\n\n| # labels per class |";
    for (auto l : rt.label_counts) os << ' ' << l << " |";
    os << "\n|---|";
    for (std::size_t l = 0; l < rt.label_counts.size(); ++l) os << "---|";
    os << '\n';
    for (std::size_t a = 0; a < rt.algorithms.size(); ++a) {
        os << "| " << rt.algorithms[a] << " |";
        for (std::size_t l = 0; l < rt.label_counts.size(); ++l) os << ' ' << fixed2(rt.cell(a, l).wall_seconds) << " |";
        os << '\n';
    }
    bool any_failed = false;
    for (const auto& c : rt.cells) any_failed |= c.failed;
    if (any_failed) {
        os << "\nFailures:\n\n";
        for (const auto& c : rt.cells)
            if (c.failed) os << "- " << c.algorithm << " @ " << c.labels_per_class << ": " << c.error << '\n';
    }
    return os.str();
}

std::string emit_json(const ResultTable& rt) {
    Json cells = Json::array();
    for (const auto& c : rt.cells) {
        Json j{{"algorithm", c.algorithm}, {"labels_per_class", c.labels_per_class}, {"failed", c.failed}};
        if (c.failed) {
            j["error"] = c.error;
        } else {
            j["mean"] = c.mean;
            j["std"] = c.stddev;
            j["runs"] = c.run_errors;
        }
        cells.push_back(std::move(j));
    }
    Json root{{"experiment", rt.experiment},
              {"dataset", rt.dataset},
              {"run_count", rt.run_count},
              {"algorithms", rt.algorithms},
              {"labels_per_class", rt.label_counts},
              {"cells", std::move(cells)}};
    return root.dump(2) + "\n";
}

std::string emit_csv(const ResultTable& rt) {
    std::ostringstream os;
    os << "algorithm,labels_per_class,status,mean,std,runs\n";
    for (const auto& c : rt.cells) {
        os << csv_field(c.algorithm) << ',' << c.labels_per_class << ',';
        if (c.failed) {
            os << "FAIL,,,\n";
            continue;
        }
        os << "ok," << full(c.mean) << ',' << full(c.stddev) << ',';
        for (std::size_t r = 0; r < c.run_errors.size(); ++r) os << (r ? ";" : "") << full(c.run_errors[r]);
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::string emit_table(const ResultTable& rt, TableFormat format) {
    switch (format) {
        case TableFormat::Markdown: return emit_markdown(rt);
        case TableFormat::Json: return emit_json(rt);
        case TableFormat::Csv: return emit_csv(rt);
    }
    return {};
}

ResultTable table_from_json(const std::string& json_text) {
    const Json root = detail::parse_json(json_text, "result table");
    check_keys(root, {"experiment", "dataset", "run_count", "algorithms", "labels_per_class", "cells"}, "table");
    ResultTable rt;
    rt.experiment = get_as<std::string>(root, "experiment", "table");
    rt.dataset = get_as<std::string>(root, "dataset", "table");
    rt.run_count = get_as<std::size_t>(root, "run_count", "table");
    rt.algorithms = get_as<std::vector<std::string>>(root, "algorithms", "table");
    rt.label_counts = get_as<std::vector<std::size_t>>(root, "labels_per_class", "table");
    for (const Json& j : get_as<Json>(root, "cells", "table")) {
        check_keys(j, {"algorithm", "labels_per_class", "failed", "error", "mean", "std", "runs"}, "cells[]");
        CellResult c;
        c.algorithm = get_as<std::string>(j, "algorithm", "cells[]");
        c.labels_per_class = get_as<std::size_t>(j, "labels_per_class", "cells[]");
        c.failed = get_as<bool>(j, "failed", "cells[]");
        if (c.failed) {
            read_opt(j, "error", c.error, "cells[]");
        } else {
            c.mean = get_as<double>(j, "mean", "cells[]");
            c.stddev = get_as<double>(j, "std", "cells[]");
            c.run_errors = get_as<std::vector<double>>(j, "runs", "cells[]");
        }
        rt.cells.push_back(std::move(c));
    }
    require(rt.cells.size() == rt.algorithms.size() * rt.label_counts.size(), ErrorCode::Parse,
            "table has " + std::to_string(rt.cells.size()) + " cells, expected " +
                std::to_string(rt.algorithms.size() * rt.label_counts.size()));
    return rt;
}

}  // namespace tvssl
