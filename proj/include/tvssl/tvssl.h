/* C interface to the tvssl library. All objects are opaque handles owned by
 * the caller and released with the matching *_free function. Every fallible
 * call returns a tvssl_status; on failure tvssl_last_error() describes the
 * most recent error on the calling thread. Strings returned through char**
 * are released with tvssl_string_free. */
#ifndef TVSSL_H
#define TVSSL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TVSSL_BUILDING)
#    define TVSSL_API __declspec(dllexport)
#  else
#    define TVSSL_API __declspec(dllimport)
#  endif
#else
#  define TVSSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tvssl_status {
    TVSSL_OK = 0,
    TVSSL_E_INVALID_PARAMETER = 1,
    TVSSL_E_DIMENSION_MISMATCH = 2,
    TVSSL_E_DEGENERATE_SCALE = 3,
    TVSSL_E_DEGENERATE_INPUT = 4,
    TVSSL_E_FACTORIZATION = 5,
    TVSSL_E_DIVERGENCE = 6,
    TVSSL_E_PARSE = 7,
    TVSSL_E_IO = 8,
    TVSSL_E_INSUFFICIENT_LABELS = 9,
    TVSSL_E_INFEASIBLE = 10,
    TVSSL_E_UNSUPPORTED = 11,
    TVSSL_E_NULL_ARGUMENT = 12,
    TVSSL_E_INTERNAL = 99
} tvssl_status;

typedef struct tvssl_dataset tvssl_dataset;
typedef struct tvssl_graph tvssl_graph;
typedef struct tvssl_model tvssl_model;
typedef struct tvssl_result tvssl_result;

typedef enum tvssl_sigma_mode {
    TVSSL_SIGMA_FIXED = 0,
    TVSSL_SIGMA_SELF_TUNING = 1
} tvssl_sigma_mode;

typedef enum tvssl_norm_scale {
    TVSSL_NORM_N = 0,
    TVSSL_NORM_SQRT_N = 1
} tvssl_norm_scale;

typedef struct tvssl_hyperparams {
    double eta, lambda, gamma, mu, r, r1, r2, c;
    int outer_iters;
    int inner_iters;
    double tol;
    double qp_tol;
    int qp_iters;
    tvssl_norm_scale norm_scale;
    int simplex_last;
    int use_bias;
    int unlabeled_margins;
} tvssl_hyperparams;

TVSSL_API const char* tvssl_version(void);
TVSSL_API const char* tvssl_status_name(tvssl_status status);
/* Message of the last failure on this thread; "" when none. */
TVSSL_API const char* tvssl_last_error(void);
TVSSL_API void tvssl_string_free(char* s);

/* Datasets: N points of dimension d, classes numbered 1..c. */
TVSSL_API tvssl_status tvssl_dataset_load_csv(const char* path, int label_column, int header,
                                              tvssl_dataset** out);
TVSSL_API tvssl_status tvssl_dataset_two_moons(size_t n, double noise, uint64_t seed,
                                               tvssl_dataset** out);
/* Row-major n x d data and n class labels in 1..c. */
TVSSL_API tvssl_status tvssl_dataset_from_arrays(const double* data, size_t n, size_t d,
                                                 const int* labels, tvssl_dataset** out);
TVSSL_API tvssl_status tvssl_dataset_save_csv(const tvssl_dataset* ds, const char* path);
TVSSL_API size_t tvssl_dataset_size(const tvssl_dataset* ds);
TVSSL_API size_t tvssl_dataset_dim(const tvssl_dataset* ds);
TVSSL_API int tvssl_dataset_classes(const tvssl_dataset* ds);
/* Copies the n class labels (1..c) into out. */
TVSSL_API tvssl_status tvssl_dataset_labels(const tvssl_dataset* ds, int* out, size_t n);
TVSSL_API void tvssl_dataset_free(tvssl_dataset* ds);

/* Stratified labeled mask (1 = labeled), labels_per_class per class. */
TVSSL_API tvssl_status tvssl_make_split(const tvssl_dataset* ds, size_t labels_per_class,
                                        uint64_t seed, unsigned char* mask_out, size_t n);

/* Similarity graphs. m = 0 selects m = k in self-tuning mode. */
TVSSL_API tvssl_status tvssl_graph_build_knn(const tvssl_dataset* ds, size_t k, tvssl_sigma_mode mode,
                                             double sigma, size_t m, tvssl_graph** out);
TVSSL_API tvssl_status tvssl_graph_save(const tvssl_graph* g, const char* path);
/* n_nodes = 0 infers the node count from the largest index. */
TVSSL_API tvssl_status tvssl_graph_load(const char* path, size_t n_nodes, tvssl_graph** out);
TVSSL_API size_t tvssl_graph_nodes(const tvssl_graph* g);
TVSSL_API size_t tvssl_graph_edges(const tvssl_graph* g);
TVSSL_API void tvssl_graph_free(tvssl_graph* g);

/* Training. */
TVSSL_API void tvssl_hyperparams_default(tvssl_hyperparams* hp);
/* Median pairwise distance of (a subsample of) the data. */
TVSSL_API tvssl_status tvssl_median_bandwidth(const tvssl_dataset* ds, double* out);
/* algorithm: rls, lap_rls, tv_rls, cheeger_rls, svm, lap_svm, tv_svm,
 * cheeger_svm. Binary training needs a two-class dataset; multiclass != 0
 * selects the channel-wise variants. mask[i] != 0 marks labeled points. */
TVSSL_API tvssl_status tvssl_train(const tvssl_dataset* ds, const tvssl_graph* g, const char* algorithm,
                                   int multiclass, const tvssl_hyperparams* hp, double bandwidth,
                                   const unsigned char* mask, size_t n, tvssl_model** out);
/* Class (1..c) of every training node. */
TVSSL_API tvssl_status tvssl_model_predict_transductive(const tvssl_model* m, int* out, size_t n);
/* Class (1..c) of query rows (row-major nq x d) through the kernel expansion
 * over the training dataset. */
TVSSL_API tvssl_status tvssl_model_predict(const tvssl_model* m, const tvssl_dataset* train,
                                           const double* query, size_t nq, size_t d, int* out);
TVSSL_API int tvssl_model_classes(const tvssl_model* m);
TVSSL_API int tvssl_model_iterations(const tvssl_model* m);
TVSSL_API tvssl_status tvssl_model_to_json(const tvssl_model* m, char** out);
TVSSL_API tvssl_status tvssl_model_from_json(const char* json, tvssl_model** out);
TVSSL_API void tvssl_model_free(tvssl_model* m);

/* Benchmarks. */
TVSSL_API tvssl_status tvssl_experiment_run(const char* config_json, unsigned jobs, tvssl_result** out);
TVSSL_API tvssl_status tvssl_experiment_run_file(const char* config_path, unsigned jobs,
                                                 tvssl_result** out);
/* format: markdown, json or csv. */
TVSSL_API tvssl_status tvssl_result_render(const tvssl_result* r, const char* format, char** out);
TVSSL_API tvssl_status tvssl_result_from_json(const char* json, tvssl_result** out);
TVSSL_API size_t tvssl_result_failed_cells(const tvssl_result* r);
/* Output directory named in the config, "" when absent. */
TVSSL_API const char* tvssl_result_output_dir(const tvssl_result* r);
TVSSL_API void tvssl_result_free(tvssl_result* r);

#ifdef __cplusplus
}
#endif

#endif
