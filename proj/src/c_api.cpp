#include "tvssl/tvssl.h"

#include "tvssl/bench.hpp"
#include "tvssl/data_io.hpp"
#include "tvssl/error.hpp"
#include "tvssl/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <variant>
#include <cstring>
#include <new>
#include <string>

struct tvssl_dataset {
    tvssl::Dataset ds;
};

struct tvssl_graph {
    tvssl::SimilarityGraph g;
};

struct tvssl_model {
    tvssl::AnyModel model;
    int classes = 2;
};

struct tvssl_result {
    tvssl::ResultTable table;
    std::string output_dir;
};

namespace {

thread_local std::string g_last_error;

tvssl_status to_status(tvssl::ErrorCode c) { return static_cast<tvssl_status>(static_cast<int>(c)); }

template <class F>
tvssl_status guard(F&& body) {
    try {
        body();
        g_last_error.clear();
        return TVSSL_OK;
    } catch (const tvssl::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TVSSL_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TVSSL_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return TVSSL_E_INTERNAL;
    }
}

tvssl_status null_arg() {
    g_last_error = "required pointer argument is NULL";
    return TVSSL_E_NULL_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tvssl::HyperParams from_c(const tvssl_hyperparams& c) {
    tvssl::HyperParams hp;
    hp.eta = c.eta;
    hp.lambda = c.lambda;
    hp.gamma = c.gamma;
    hp.mu = c.mu;
    hp.r = c.r;
    hp.r1 = c.r1;
    hp.r2 = c.r2;
    hp.c = c.c;
    hp.outer_iters = c.outer_iters;
    hp.inner_iters = c.inner_iters;
    hp.tol = c.tol;
    hp.qp_tol = c.qp_tol;
    hp.qp_iters = c.qp_iters;
    hp.norm_scale = c.norm_scale == TVSSL_NORM_SQRT_N ? tvssl::NormScale::SqrtN : tvssl::NormScale::N;
    hp.simplex_last = c.simplex_last != 0;
    hp.use_bias = c.use_bias != 0;
    hp.unlabeled_margins = c.unlabeled_margins != 0;
    return hp;
}

void check_len(size_t have, size_t want, const char* what) {
    if (have != want)
        throw tvssl::Error(tvssl::ErrorCode::DimensionMismatch,
                           std::string(what) + " has length " + std::to_string(have) + ", expected " +
                               std::to_string(want));
}

}  // namespace

extern "C" {

const char* tvssl_version(void) { return "1.0.0"; }

const char* tvssl_status_name(tvssl_status status) {
    switch (status) {
        case TVSSL_OK: return "ok";
        case TVSSL_E_NULL_ARGUMENT: return "null_argument";
        case TVSSL_E_INTERNAL: return "internal";
        default: break;
    }
    const int s = static_cast<int>(status);
    if (s >= 1 && s <= 11) return tvssl::error_code_name(static_cast<tvssl::ErrorCode>(s));
    return "unknown";
}

const char* tvssl_last_error(void) { return g_last_error.c_str(); }

void tvssl_string_free(char* s) { std::free(s); }

tvssl_status tvssl_dataset_load_csv(const char* path, int label_column, int header, tvssl_dataset** out) {
    if (!path || !out) return null_arg();
    return guard([&] { *out = new tvssl_dataset{tvssl::load_csv(path, label_column, header != 0)}; });
}

tvssl_status tvssl_dataset_two_moons(size_t n, double noise, uint64_t seed, tvssl_dataset** out) {
    if (!out) return null_arg();
    return guard([&] { *out = new tvssl_dataset{tvssl::make_two_moons(n, noise, seed)}; });
}

tvssl_status tvssl_dataset_from_arrays(const double* data, size_t n, size_t d, const int* labels,
                                       tvssl_dataset** out) {
    if (!data || !labels || !out) return null_arg();
    return guard([&] {
        tvssl::require(n >= 1 && d >= 1, tvssl::ErrorCode::InvalidParameter, "n and d must be positive");
        tvssl::Dataset ds;
        ds.name = "arrays";
        ds.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            data, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        int c = 0;
        for (size_t i = 0; i < n; ++i) {
            tvssl::require(labels[i] >= 1, tvssl::ErrorCode::InvalidParameter, "labels must be >= 1");
            c = std::max(c, labels[i]);
        }
        ds.labels.assign(labels, labels + n);
        for (int k = 1; k <= c; ++k) ds.class_names.push_back(std::to_string(k));
        *out = new tvssl_dataset{std::move(ds)};
    });
}

tvssl_status tvssl_dataset_save_csv(const tvssl_dataset* ds, const char* path) {
    if (!ds || !path) return null_arg();
    return guard([&] { tvssl::save_csv(ds->ds, path); });
}

size_t tvssl_dataset_size(const tvssl_dataset* ds) { return ds ? ds->ds.size() : 0; }

size_t tvssl_dataset_dim(const tvssl_dataset* ds) { return ds ? static_cast<size_t>(ds->ds.data.cols()) : 0; }

int tvssl_dataset_classes(const tvssl_dataset* ds) { return ds ? ds->ds.n_classes() : 0; }

tvssl_status tvssl_dataset_labels(const tvssl_dataset* ds, int* out, size_t n) {
    if (!ds || !out) return null_arg();
    return guard([&] {
        check_len(n, ds->ds.size(), "label buffer");
        std::copy(ds->ds.labels.begin(), ds->ds.labels.end(), out);
    });
}

void tvssl_dataset_free(tvssl_dataset* ds) { delete ds; }

tvssl_status tvssl_make_split(const tvssl_dataset* ds, size_t labels_per_class, uint64_t seed,
                              unsigned char* mask_out, size_t n) {
    if (!ds || !mask_out) return null_arg();
    return guard([&] {
        check_len(n, ds->ds.size(), "mask buffer");
        const auto mask = tvssl::make_split_mask(ds->ds, tvssl::SplitSpec{labels_per_class, seed, 1});
        for (size_t i = 0; i < n; ++i) mask_out[i] = mask[i] ? 1 : 0;
    });
}

tvssl_status tvssl_graph_build_knn(const tvssl_dataset* ds, size_t k, tvssl_sigma_mode mode, double sigma,
                                   size_t m, tvssl_graph** out) {
    if (!ds || !out) return null_arg();
    return guard([&] {
        tvssl::GraphSpec spec;
        spec.k = k;
        spec.self_tuning = mode == TVSSL_SIGMA_SELF_TUNING;
        spec.sigma = sigma;
        spec.m = m;
        *out = new tvssl_graph{tvssl::build_graph(ds->ds, spec)};
    });
}

tvssl_status tvssl_graph_save(const tvssl_graph* g, const char* path) {
    if (!g || !path) return null_arg();
    return guard([&] { tvssl::save_edge_list(g->g, path); });
}

tvssl_status tvssl_graph_load(const char* path, size_t n_nodes, tvssl_graph** out) {
    if (!path || !out) return null_arg();
    return guard([&] { *out = new tvssl_graph{tvssl::load_edge_list(path, n_nodes)}; });
}

size_t tvssl_graph_nodes(const tvssl_graph* g) { return g ? g->g.n_nodes() : 0; }

size_t tvssl_graph_edges(const tvssl_graph* g) { return g ? g->g.n_edges() : 0; }

void tvssl_graph_free(tvssl_graph* g) { delete g; }

void tvssl_hyperparams_default(tvssl_hyperparams* hp) {
    if (!hp) return;
    const tvssl::HyperParams d;
    hp->eta = d.eta;
    hp->lambda = d.lambda;
    hp->gamma = d.gamma;
    hp->mu = d.mu;
    hp->r = d.r;
    hp->r1 = d.r1;
    hp->r2 = d.r2;
    hp->c = d.c;
    hp->outer_iters = d.outer_iters;
    hp->inner_iters = d.inner_iters;
    hp->tol = d.tol;
    hp->qp_tol = d.qp_tol;
    hp->qp_iters = d.qp_iters;
    hp->norm_scale = d.norm_scale == tvssl::NormScale::N ? TVSSL_NORM_N : TVSSL_NORM_SQRT_N;
    hp->simplex_last = d.simplex_last;
    hp->use_bias = d.use_bias;
    hp->unlabeled_margins = d.unlabeled_margins;
}

tvssl_status tvssl_median_bandwidth(const tvssl_dataset* ds, double* out) {
    if (!ds || !out) return null_arg();
    return guard([&] { *out = tvssl::median_bandwidth(ds->ds.data); });
}

tvssl_status tvssl_train(const tvssl_dataset* ds, const tvssl_graph* g, const char* algorithm, int multiclass,
                         const tvssl_hyperparams* hp, double bandwidth, const unsigned char* mask, size_t n,
                         tvssl_model** out) {
    if (!ds || !algorithm || !hp || !mask || !out) return null_arg();
    return guard([&] {
        using namespace tvssl;
        const Dataset& d = ds->ds;
        check_len(n, d.size(), "mask");
        const Variant v = parse_variant(algorithm);
        const HyperParams params = from_c(*hp);
        params.validate();
        require(is_supervised_variant(v) || g, ErrorCode::InvalidParameter,
                std::string(algorithm) + " needs a graph");
        if (g) check_len(g->g.n_nodes(), d.size(), "graph");
        require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorCode::InvalidParameter,
                "bandwidth must be positive");
        const KernelMatrix k = rbf_gram(d.data, bandwidth);
        std::vector<bool> m(n);
        for (size_t i = 0; i < n; ++i) m[i] = mask[i] != 0;

        auto model = std::make_unique<tvssl_model>();
        if (multiclass) {
            std::vector<int> cls(d.size(), -1);
            for (size_t i = 0; i < n; ++i)
                if (m[i]) cls[i] = d.labels[i] - 1;
            MultiLabelSet mls(std::move(cls), d.n_classes());
            model->model = multiclass_train(v, k, g->g, mls, params);
            model->classes = d.n_classes();
        } else {
            const std::vector<int> y = binary_labels(d);
            const LabeledSet ls(y, m);
            BinaryModel bm;
            if (is_supervised_variant(v)) {
                ls.require_both_classes();
                const auto idx = ls.labeled_indices();
                DataMatrix sub(static_cast<Eigen::Index>(idx.size()), d.data.cols());
                Vector yl(static_cast<Eigen::Index>(idx.size()));
                for (size_t a = 0; a < idx.size(); ++a) {
                    sub.row(static_cast<Eigen::Index>(a)) = d.data.row(idx[a]);
                    yl[static_cast<Eigen::Index>(a)] = y[static_cast<size_t>(idx[a])];
                }
                const KernelMatrix kl = rbf_gram(sub, bandwidth);
                bm = v == Variant::Rls ? rls_train(kl, yl, params) : svm_train(kl, yl, params);
                bm.expansion = idx;
                bm.node_values = k.values(Eigen::all, idx) * bm.alpha;
            } else {
                switch (v) {
                    case Variant::LapRls: bm = lap_rls_train(k, g->g, ls, params); break;
                    case Variant::TvRls: bm = tv_rls_train(k, g->g, ls, params); break;
                    case Variant::CheegerRls: bm = cheeger_rls_train(k, g->g, ls, params); break;
                    case Variant::LapSvm: bm = lap_svm_train(k, g->g, ls, params); break;
                    case Variant::TvSvm: bm = tv_svm_train(k, g->g, ls, params); break;
                    default: bm = cheeger_svm_train(k, g->g, ls, params); break;
                }
            }
            model->model = std::move(bm);
        }
        *out = model.release();
    });
}

tvssl_status tvssl_model_predict_transductive(const tvssl_model* m, int* out, size_t n) {
    if (!m || !out) return null_arg();
    return guard([&] {
        using namespace tvssl;
        if (const auto* mc = std::get_if<MulticlassModel>(&m->model)) {
            const auto pred = predict_multiclass_transductive(*mc);
            check_len(n, pred.size(), "output buffer");
            for (size_t i = 0; i < n; ++i) out[i] = pred[i] + 1;
            return;
        }
        const auto& bm = std::get<BinaryModel>(m->model);
        require(bm.node_values.size() > 0, ErrorCode::Unsupported, "model carries no node values");
        check_len(n, static_cast<size_t>(bm.node_values.size()), "output buffer");
        for (size_t i = 0; i < n; ++i) {
            double f = bm.node_values[static_cast<Eigen::Index>(i)];
            if (bm.hp.use_bias) f += bm.bias;
            out[i] = sign_label(f) > 0 ? 1 : 2;
        }
    });
}

tvssl_status tvssl_model_predict(const tvssl_model* m, const tvssl_dataset* train, const double* query,
                                 size_t nq, size_t d, int* out) {
    if (!m || !train || !query || !out) return null_arg();
    return guard([&] {
        using namespace tvssl;
        check_len(d, static_cast<size_t>(train->ds.data.cols()), "query dimension");
        const DataMatrix q = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            query, static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(d));
        if (const auto* mc = std::get_if<MulticlassModel>(&m->model)) {
            const auto pred = predict_multiclass(*mc, train->ds.data, q);
            for (size_t i = 0; i < nq; ++i) out[i] = pred[i] + 1;
            return;
        }
        const auto& bm = std::get<BinaryModel>(m->model);
        if (bm.expansion.empty())
            check_len(static_cast<size_t>(bm.alpha.size()), train->ds.size(), "training set");
        const auto pred = predict_binary(bm, train->ds.data, q);
        for (size_t i = 0; i < nq; ++i) out[i] = pred[i] > 0 ? 1 : 2;
    });
}

int tvssl_model_classes(const tvssl_model* m) { return m ? m->classes : 0; }

int tvssl_model_iterations(const tvssl_model* m) {
    if (!m) return 0;
    return std::visit([](const auto& mm) { return mm.trace.iterations; }, m->model);
}

tvssl_status tvssl_model_to_json(const tvssl_model* m, char** out) {
    if (!m || !out) return null_arg();
    return guard([&] {
        *out = dup_string(std::visit([](const auto& mm) { return tvssl::model_to_json(mm); }, m->model));
    });
}

tvssl_status tvssl_model_from_json(const char* json, tvssl_model** out) {
    if (!json || !out) return null_arg();
    return guard([&] {
        auto model = std::make_unique<tvssl_model>();
        model->model = tvssl::model_from_json(json);
        if (const auto* mc = std::get_if<tvssl::MulticlassModel>(&model->model)) model->classes = mc->n_classes();
        *out = model.release();
    });
}

void tvssl_model_free(tvssl_model* m) { delete m; }

tvssl_status tvssl_experiment_run(const char* config_json, unsigned jobs, tvssl_result** out) {
    if (!config_json || !out) return null_arg();
    return guard([&] {
        const auto cfg = tvssl::parse_config(config_json);
        *out = new tvssl_result{tvssl::run_experiment(cfg, jobs), cfg.output};
    });
}

tvssl_status tvssl_experiment_run_file(const char* config_path, unsigned jobs, tvssl_result** out) {
    if (!config_path || !out) return null_arg();
    return guard([&] {
        const auto cfg = tvssl::load_config(config_path);
        *out = new tvssl_result{tvssl::run_experiment(cfg, jobs), cfg.output};
    });
}

tvssl_status tvssl_result_render(const tvssl_result* r, const char* format, char** out) {
    if (!r || !format || !out) return null_arg();
    return guard([&] { *out = dup_string(tvssl::emit_table(r->table, tvssl::parse_format(format))); });
}

tvssl_status tvssl_result_from_json(const char* json, tvssl_result** out) {
    if (!json || !out) return null_arg();
    return guard([&] { *out = new tvssl_result{tvssl::table_from_json(json), {}}; });
}

size_t tvssl_result_failed_cells(const tvssl_result* r) { return r ? r->table.failed_cells() : 0; }

const char* tvssl_result_output_dir(const tvssl_result* r) { return r ? r->output_dir.c_str() : ""; }

void tvssl_result_free(tvssl_result* r) { delete r; }

}  // extern "C"
