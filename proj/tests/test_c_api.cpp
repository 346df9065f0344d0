#include "doctest.h"

#include "tvssl/tvssl.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

struct Fixture {
    tvssl_dataset* ds = nullptr;
    tvssl_graph* g = nullptr;
    Fixture() {
        REQUIRE(tvssl_dataset_two_moons(60, 0.05, 3, &ds) == TVSSL_OK);
        REQUIRE(tvssl_graph_build_knn(ds, 8, TVSSL_SIGMA_SELF_TUNING, 0.0, 0, &g) == TVSSL_OK);
    }
    ~Fixture() {
        tvssl_graph_free(g);
        tvssl_dataset_free(ds);
    }
};

double bandwidth(const tvssl_dataset* ds) {
    double bw = 0.0;
    REQUIRE(tvssl_median_bandwidth(ds, &bw) == TVSSL_OK);
    return 0.3 * bw;
}

}  // namespace

TEST_CASE("c api: version, status names, null handling") {
    CHECK(std::strlen(tvssl_version()) > 0);
    CHECK(std::string(tvssl_status_name(TVSSL_E_PARSE)) == "parse");
    tvssl_dataset* ds = nullptr;
    CHECK(tvssl_dataset_two_moons(10, 0.1, 0, nullptr) == TVSSL_E_NULL_ARGUMENT);
    CHECK(tvssl_dataset_two_moons(7, 0.1, 0, &ds) == TVSSL_E_INVALID_PARAMETER);
    CHECK(ds == nullptr);
    CHECK(std::strlen(tvssl_last_error()) > 0);
    tvssl_dataset_free(nullptr);
    tvssl_graph_free(nullptr);
    tvssl_model_free(nullptr);
    tvssl_result_free(nullptr);
    tvssl_string_free(nullptr);
}

TEST_CASE("c api: datasets from arrays and CSV") {
    const double data[] = {0, 0, 1, 0, 0, 1, 5, 5};
    const int labels[] = {1, 1, 2, 2};
    tvssl_dataset* ds = nullptr;
    REQUIRE(tvssl_dataset_from_arrays(data, 4, 2, labels, &ds) == TVSSL_OK);
    CHECK(tvssl_dataset_size(ds) == 4);
    CHECK(tvssl_dataset_dim(ds) == 2);
    CHECK(tvssl_dataset_classes(ds) == 2);
    const auto path = (std::filesystem::temp_directory_path() / "tvssl_c_api.csv").string();
    REQUIRE(tvssl_dataset_save_csv(ds, path.c_str()) == TVSSL_OK);
    tvssl_dataset* back = nullptr;
    REQUIRE(tvssl_dataset_load_csv(path.c_str(), 0, 0, &back) == TVSSL_OK);
    std::filesystem::remove(path);
    int out[4];
    REQUIRE(tvssl_dataset_labels(back, out, 4) == TVSSL_OK);
    CHECK(std::vector<int>(out, out + 4) == std::vector<int>{1, 1, 2, 2});
    CHECK(tvssl_dataset_labels(back, out, 3) == TVSSL_E_DIMENSION_MISMATCH);
    CHECK(tvssl_dataset_load_csv("/nonexistent.csv", 0, 0, &back) == TVSSL_E_IO);
    tvssl_dataset_free(back);
    tvssl_dataset_free(ds);
}

TEST_CASE("c api: graph save and load") {
    Fixture f;
    const auto path = (std::filesystem::temp_directory_path() / "tvssl_c_api.edges").string();
    REQUIRE(tvssl_graph_save(f.g, path.c_str()) == TVSSL_OK);
    tvssl_graph* back = nullptr;
    REQUIRE(tvssl_graph_load(path.c_str(), 60, &back) == TVSSL_OK);
    std::filesystem::remove(path);
    CHECK(tvssl_graph_nodes(back) == 60);
    CHECK(tvssl_graph_edges(back) == tvssl_graph_edges(f.g));
    tvssl_graph_free(back);
}

TEST_CASE("c api: train, predict, serialize for every binary algorithm") {
    Fixture f;
    std::vector<unsigned char> mask(60);
    REQUIRE(tvssl_make_split(f.ds, 2, 5, mask.data(), mask.size()) == TVSSL_OK);
    std::vector<int> truth(60);
    REQUIRE(tvssl_dataset_labels(f.ds, truth.data(), 60) == TVSSL_OK);
    tvssl_hyperparams hp;
    tvssl_hyperparams_default(&hp);
    hp.lambda = 0.01;
    hp.eta = 100;
    hp.gamma = 1;
    hp.norm_scale = TVSSL_NORM_SQRT_N;
    const double bw = bandwidth(f.ds);
    for (const char* alg : {"rls", "lap_rls", "tv_rls", "cheeger_rls", "svm", "lap_svm", "tv_svm", "cheeger_svm"}) {
        INFO(alg);
        tvssl_model* m = nullptr;
        REQUIRE(tvssl_train(f.ds, f.g, alg, 0, &hp, bw, mask.data(), 60, &m) == TVSSL_OK);
        CHECK(tvssl_model_classes(m) == 2);
        std::vector<int> pred(60);
        REQUIRE(tvssl_model_predict_transductive(m, pred.data(), 60) == TVSSL_OK);
        for (int p : pred) CHECK((p == 1 || p == 2));

        char* json = nullptr;
        REQUIRE(tvssl_model_to_json(m, &json) == TVSSL_OK);
        tvssl_model* back = nullptr;
        REQUIRE(tvssl_model_from_json(json, &back) == TVSSL_OK);
        std::vector<int> pred2(60);
        REQUIRE(tvssl_model_predict_transductive(back, pred2.data(), 60) == TVSSL_OK);
        CHECK(pred2 == pred);
        tvssl_string_free(json);
        tvssl_model_free(back);
        tvssl_model_free(m);
    }
}

TEST_CASE("c api: multiclass training and inductive prediction") {
    Fixture f;
    std::vector<unsigned char> mask(60);
    REQUIRE(tvssl_make_split(f.ds, 1, 2, mask.data(), mask.size()) == TVSSL_OK);
    tvssl_hyperparams hp;
    tvssl_hyperparams_default(&hp);
    hp.lambda = 0.01;
    hp.eta = 100;
    hp.gamma = 1;
    tvssl_model* m = nullptr;
    REQUIRE(tvssl_train(f.ds, f.g, "lap_rls", 1, &hp, bandwidth(f.ds), mask.data(), 60, &m) == TVSSL_OK);
    const double query[] = {0.0, 1.0, 1.0, -0.5};
    int out[2];
    REQUIRE(tvssl_model_predict(m, f.ds, query, 2, 2, out) == TVSSL_OK);
    CHECK(out[0] == 1);
    CHECK(out[1] == 2);
    CHECK(tvssl_model_predict(m, f.ds, query, 2, 3, out) == TVSSL_E_DIMENSION_MISMATCH);
    tvssl_model_free(m);

    CHECK(tvssl_train(f.ds, f.g, "svm", 1, &hp, 1.0, mask.data(), 60, &m) == TVSSL_E_UNSUPPORTED);
    CHECK(tvssl_train(f.ds, f.g, "nope", 0, &hp, 1.0, mask.data(), 60, &m) == TVSSL_E_INVALID_PARAMETER);
    hp.lambda = -1;
    CHECK(tvssl_train(f.ds, f.g, "lap_rls", 0, &hp, 1.0, mask.data(), 60, &m) == TVSSL_E_INVALID_PARAMETER);
}

TEST_CASE("c api: experiments render and parse") {
    const char* cfg = R"({"name": "c", "dataset": {"kind": "two_moons", "n": 40, "noise": 0.05, "seed": 1},
        "graph": {"k": 6}, "kernel": {"bandwidth": "median", "scale": 0.3},
        "defaults": {"lambda": 0.01, "norm_scale": "sqrt_n"},
        "algorithms": [{"algorithm": "lap_rls", "params": {"eta": 100, "gamma": 1}}],
        "labels_per_class": [1, 50], "run_count": 2, "output": "out/dir"})";
    tvssl_result* r = nullptr;
    REQUIRE(tvssl_experiment_run(cfg, 2, &r) == TVSSL_OK);
    CHECK(tvssl_result_failed_cells(r) == 1);
    CHECK(std::string(tvssl_result_output_dir(r)) == "out/dir");
    char* json = nullptr;
    REQUIRE(tvssl_result_render(r, "json", &json) == TVSSL_OK);
    tvssl_result* back = nullptr;
    REQUIRE(tvssl_result_from_json(json, &back) == TVSSL_OK);
    char* csv1 = nullptr;
    char* csv2 = nullptr;
    REQUIRE(tvssl_result_render(r, "csv", &csv1) == TVSSL_OK);
    REQUIRE(tvssl_result_render(back, "csv", &csv2) == TVSSL_OK);
    CHECK(std::string(csv1) == std::string(csv2));
    CHECK(tvssl_result_render(r, "xml", &csv1) == TVSSL_E_INVALID_PARAMETER);
    tvssl_string_free(json);
    tvssl_string_free(csv1);
    tvssl_string_free(csv2);
    tvssl_result_free(back);
    tvssl_result_free(r);
    CHECK(tvssl_experiment_run("{", 1, &r) == TVSSL_E_PARSE);
    CHECK(tvssl_experiment_run_file("/nonexistent.json", 1, &r) == TVSSL_E_IO);
}
