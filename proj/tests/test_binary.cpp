#include "doctest.h"
#include "oracles.hpp"

#include "tvssl/binary.hpp"
#include "tvssl/cheeger.hpp"
#include "tvssl/data_io.hpp"
#include "tvssl/error.hpp"
#include "tvssl/graph.hpp"
#include "tvssl/kernel.hpp"
#include "tvssl/svm_prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace tvssl;

namespace {

struct Toy {
    DataMatrix x;
    std::vector<int> truth;  // +1 / -1
    KernelMatrix k;
    SimilarityGraph g;
    LabeledSet ls;
};

// Two tight clusters of `per` points, far apart, one label in each.
Toy two_clusters(std::size_t per, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.15);
    const auto n = static_cast<Eigen::Index>(2 * per);
    Toy t;
    t.x.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cx = i < static_cast<Eigen::Index>(per) ? -2.0 : 2.0;
        t.x(i, 0) = cx + noise(rng);
        t.x(i, 1) = noise(rng);
        t.truth.push_back(i < static_cast<Eigen::Index>(per) ? 1 : -1);
    }
    t.k = rbf_gram(t.x, 1.0);
    t.g = build_knn_graph(t.x, 3, SelfTuningSigma{3});
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    mask[0] = true;
    mask[per] = true;
    t.ls = LabeledSet(t.truth, mask);
    return t;
}

HyperParams base_hp() {
    HyperParams hp;
    hp.eta = 10.0;
    hp.lambda = 0.1;
    hp.gamma = 0.5;
    hp.mu = 1.0;
    hp.norm_scale = NormScale::SqrtN;
    return hp;
}

double rls_objective(const Matrix& k, const Vector& y, const HyperParams& hp, const Vector& a) {
    return 0.5 * hp.eta * (k * a - y).squaredNorm() + 0.5 * hp.lambda * a.dot(k * a);
}

double lap_rls_objective(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, const Vector& a) {
    const Vector f = k.values * a;
    return 0.5 * hp.eta * (ls.j_diag().cwiseProduct(f) - ls.y_ext()).squaredNorm() +
           0.5 * hp.lambda * a.dot(k.values * a) + 0.5 * hp.gamma * dirichlet_energy(g, f);
}

std::size_t agreement(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
    return ok;
}

}  // namespace

// ---- labeled sets ----------------------------------------------------------

TEST_CASE("LabeledSet padding and class checks") {
    const LabeledSet ls({1, -1, 1, 7}, {true, true, false, false});
    CHECK(ls.labeled_count() == 2);
    const Vector y = ls.y_ext();
    CHECK(y[0] == 1.0);
    CHECK(y[1] == -1.0);
    CHECK(y[2] == 0.0);
    CHECK(y[3] == 0.0);
    CHECK(ls.j_diag().sum() == 2.0);
    CHECK_NOTHROW(ls.require_both_classes());
    CHECK_THROWS_AS(LabeledSet({1, 1}, {true, true}).require_both_classes(), Error);
    CHECK_THROWS_AS(LabeledSet({1, 0}, {true, true}), Error);
    CHECK_THROWS_AS(LabeledSet({1}, {true, false}), Error);
}

TEST_CASE("variant names round trip") {
    for (auto v : {Variant::Rls, Variant::LapRls, Variant::TvRls, Variant::CheegerRls, Variant::Svm,
                   Variant::LapSvm, Variant::TvSvm, Variant::CheegerSvm})
        CHECK(parse_variant(variant_name(v)) == v);
    CHECK_THROWS_AS(parse_variant("nope"), Error);
}

// ---- closed forms ----------------------------------------------------------

TEST_CASE("rls: K = I and eta = lambda = 1 give alpha = y / 2") {
    KernelMatrix k{Matrix::Identity(4, 4), 1.0};
    Vector y(4);
    y << 1.0, -1.0, -1.0, 1.0;
    HyperParams hp;
    hp.eta = hp.lambda = 1.0;
    CHECK((rls_train(k, y, hp).alpha - y / 2.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rls: small lambda interpolates") {
    std::mt19937_64 rng(1);
    const auto x = oracle::random_points(rng, 6, 2);
    const auto k = rbf_gram(x, 1.0);
    Vector y(6);
    y << 1, -1, 1, -1, 1, -1;
    HyperParams hp;
    hp.lambda = 1e-9;
    const auto m = rls_train(k, y, hp);
    CHECK((k.values * m.alpha - y).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("rls: linear system residual and perturbation optimality") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto x = oracle::random_points(rng, 6, 2);
        const auto k = rbf_gram(x, 1.0);
        Vector y = oracle::random_signs(rng, 6);
        y[0] = 1;
        y[1] = -1;
        HyperParams hp = base_hp();
        const auto m = rls_train(k, y, hp);
        Matrix a = hp.eta * k.values;
        a.diagonal().array() += hp.lambda;
        CHECK((a * m.alpha - hp.eta * y).norm() <= 1e-8 * (hp.eta * y).norm());
        const double best = rls_objective(k.values, y, hp, m.alpha);
        for (int s = 0; s < 100; ++s)
            CHECK(best <= rls_objective(k.values, y, hp, m.alpha + 1e-3 * oracle::random_vector(rng, 6)));
        // Stationarity of the primal: K((eta K + lambda I) alpha - eta y) = 0.
        CHECK((k.values * (a * m.alpha - hp.eta * y)).norm() <= 1e-8 * (hp.eta * y).norm());
    }
}

TEST_CASE("lap_rls: residual bound and perturbation optimality") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const auto x = oracle::random_points(rng, 10, 2);
        const auto k = rbf_gram(x, 1.0);
        const auto g = build_knn_graph(x, 3, SelfTuningSigma{3});
        std::vector<int> labels(10);
        for (int i = 0; i < 10; ++i) labels[static_cast<std::size_t>(i)] = i % 2 ? -1 : 1;
        std::vector<bool> mask(10, false);
        mask[0] = mask[1] = mask[4] = true;
        const LabeledSet ls(labels, mask);
        const HyperParams hp = base_hp();
        const auto m = lap_rls_train(k, g, ls, hp);
        Matrix a = hp.eta * ls.j_diag().asDiagonal() * k.values + hp.gamma * g.energy_laplacian() * k.values;
        a.diagonal().array() += hp.lambda;
        const Vector rhs = hp.eta * ls.y_ext();
        CHECK((a * m.alpha - rhs).norm() <= 1e-8 * rhs.norm());
        CHECK((m.node_values - k.values * m.alpha).norm() < 1e-12);
        const double best = lap_rls_objective(k, g, ls, hp, m.alpha);
        for (int s = 0; s < 100; ++s)
            CHECK(best <= lap_rls_objective(k, g, ls, hp, m.alpha + 1e-3 * oracle::random_vector(rng, 10)));
    }
}

TEST_CASE("lap_rls: two nodes, one label, one edge, by hand") {
    const double kk = 0.3, w = 0.8;
    KernelMatrix k{(Matrix(2, 2) << 1.0, kk, kk, 1.0).finished(), 1.0};
    const SimilarityGraph g(2, {{0, 1, w}});
    const LabeledSet ls({1, -1}, {true, true});
    HyperParams hp;
    hp.eta = 2.0;
    hp.lambda = 0.5;
    hp.gamma = 0.25;
    // A = eta K + lambda I + gamma 2 w [[1,-1],[-1,1]] K, rhs eta (1, -1)
    const double l = 2.0 * w * hp.gamma;
    const double a11 = hp.eta + hp.lambda + l * (1.0 - kk);
    const double a12 = hp.eta * kk + l * (kk - 1.0);
    const double a21 = a12;
    const double a22 = a11;
    const double det = a11 * a22 - a12 * a21;
    const double alpha0 = hp.eta * (a22 + a12) / det;
    const double alpha1 = -hp.eta * (a11 + a21) / det;
    const auto m = lap_rls_train(k, g, ls, hp);
    CHECK(m.alpha[0] == doctest::Approx(alpha0).epsilon(1e-13));
    CHECK(m.alpha[1] == doctest::Approx(alpha1).epsilon(1e-13));
}

TEST_CASE("reduction: lap_rls with gamma = 0 equals rls on the labeled points") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto x = oracle::random_points(rng, 9, 2);
        const auto k = rbf_gram(x, 1.0);
        const auto g = build_knn_graph(x, 3, SelfTuningSigma{3});
        std::vector<int> labels(9);
        std::vector<bool> mask(9);
        for (std::size_t i = 0; i < 9; ++i) {
            labels[i] = (rng() & 1u) ? 1 : -1;
            mask[i] = i < 4;
        }
        labels[0] = 1;
        labels[1] = -1;
        const LabeledSet ls(labels, mask);
        HyperParams hp = base_hp();
        hp.gamma = 0.0;
        const auto lap = lap_rls_train(k, g, ls, hp);
        KernelMatrix kl{k.values.topLeftCorner(4, 4), k.bandwidth};
        Vector y(4);
        for (Eigen::Index i = 0; i < 4; ++i) y[i] = labels[static_cast<std::size_t>(i)];
        const auto plain = rls_train(kl, y, hp);
        CHECK((lap.alpha.head(4) - plain.alpha).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(lap.alpha.tail(5).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("svm: collapsed box gives the zero function") {
    std::mt19937_64 rng(5);
    const auto k = rbf_gram(oracle::random_points(rng, 5, 2), 1.0);
    Vector y(5);
    y << 1, -1, 1, -1, 1;
    HyperParams hp;
    hp.mu = 1e-300;
    const auto m = svm_train(k, y, hp);
    CHECK(m.alpha.cwiseAbs().maxCoeff() < 1e-290);
}

TEST_CASE("svm: two separated points satisfy the margin with zero slack") {
    KernelMatrix k{(Matrix(2, 2) << 1.0, 0.1, 0.1, 1.0).finished(), 1.0};
    Vector y(2);
    y << 1.0, -1.0;
    HyperParams hp;
    hp.lambda = 1.0;
    hp.mu = 100.0;
    hp.qp_tol = 1e-12;
    const auto m = svm_train(k, y, hp);
    // Symmetric instance: b = 0 and f_i = y_i with beta = lambda / (1 - k12).
    const Vector f = k.values * m.alpha;
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f[1] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(m.alpha[0] == doctest::Approx(1.0 / 0.9).epsilon(1e-9));
}

TEST_CASE("svm: dual objective matches active-set enumeration") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const auto x = oracle::random_points(rng, 8, 2);
        const auto k = rbf_gram(x, 1.0);
        Vector y(8);
        for (Eigen::Index i = 0; i < 8; ++i) y[i] = x(i, 0) > 0 ? 1.0 : -1.0;
        if (y.maxCoeff() == y.minCoeff()) y[0] = -y[0];
        HyperParams hp = base_hp();
        hp.qp_tol = 1e-10;
        hp.qp_iters = 100000;
        const auto m = svm_train(k, y, hp);
        const Vector beta = y.cwiseProduct(hp.lambda * m.alpha);
        const Matrix q = y.asDiagonal() * (k.values / hp.lambda) * y.asDiagonal();
        const auto ref = oracle::box_eq_active_set_oracle(q, Vector::Zero(8), y, hp.mu);
        CHECK(oracle::box_eq_objective(q, Vector::Zero(8), beta) == doctest::Approx(ref.objective).epsilon(1e-6));
    }
}

TEST_CASE("lap_svm: two points by hand and perturbation optimality") {
    const double kk = 0.4, w = 0.7;
    KernelMatrix k{(Matrix(2, 2) << 1.0, kk, kk, 1.0).finished(), 1.0};
    const SimilarityGraph g(2, {{0, 1, w}});
    const Matrix lap = g.energy_laplacian();
    HyperParams hp;
    hp.lambda = 0.5;
    hp.gamma = 0.3;
    hp.qp_tol = 1e-12;
    // S = K (lambda I + gamma L K)^{-1} = (lambda K^{-1} + gamma L)^{-1}, symmetric.
    const Matrix s_ref = (hp.lambda * k.values.inverse() + hp.gamma * lap).inverse();
    const KernelSvmProx prox(k.values, &lap, hp.lambda, hp.gamma, 0.0, {0, 1});
    CHECK((prox.s_block() - s_ref).cwiseAbs().maxCoeff() < 1e-13);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        const auto x = oracle::random_points(rng, 10, 2);
        const auto kt = rbf_gram(x, 1.0);
        const auto gt = build_knn_graph(x, 3, SelfTuningSigma{3});
        std::vector<int> labels(10);
        for (std::size_t i = 0; i < 10; ++i) labels[i] = x(static_cast<Eigen::Index>(i), 0) > 0 ? 1 : -1;
        labels[0] = 1;
        labels[1] = -1;
        std::vector<bool> mask(10, false);
        mask[0] = mask[1] = mask[2] = true;
        const LabeledSet ls(labels, mask);
        HyperParams h2 = base_hp();
        h2.unlabeled_margins = false;
        h2.qp_tol = 1e-10;
        h2.qp_iters = 100000;
        const auto m = lap_svm_train(kt, gt, ls, h2);
        oracle::HingeProblem p;
        const Matrix lt = gt.energy_laplacian();
        p.h = h2.lambda * kt.values + h2.gamma * kt.values * lt * kt.values;
        p.c = Vector::Zero(10);
        p.a = kt.values.topRows(3);
        p.y = Vector(3);
        p.y << labels[0], labels[1], labels[2];
        p.mu = h2.mu;
        const double best = oracle::hinge_objective_best_b(p, m.alpha);
        for (int s = 0; s < 100; ++s)
            CHECK(best <= oracle::hinge_objective_best_b(p, m.alpha + 1e-3 * oracle::random_vector(rng, 10)) + 1e-12);
    }
}

TEST_CASE("reduction: lap_svm with gamma = 0 equals svm on the labeled points") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto x = oracle::random_points(rng, 9, 2);
        const auto k = rbf_gram(x, 1.0);
        const auto g = build_knn_graph(x, 3, SelfTuningSigma{3});
        std::vector<int> labels(9);
        std::vector<bool> mask(9);
        for (std::size_t i = 0; i < 9; ++i) {
            labels[i] = (rng() & 1u) ? 1 : -1;
            mask[i] = i < 5;
        }
        labels[0] = 1;
        labels[1] = -1;
        const LabeledSet ls(labels, mask);
        HyperParams hp = base_hp();
        hp.gamma = 0.0;
        hp.unlabeled_margins = false;
        const auto lap = lap_svm_train(k, g, ls, hp);
        KernelMatrix kl{k.values.topLeftCorner(5, 5), k.bandwidth};
        Vector y(5);
        for (Eigen::Index i = 0; i < 5; ++i) y[i] = labels[static_cast<std::size_t>(i)];
        const auto plain = svm_train(kl, y, hp);
        CHECK((lap.alpha.head(5) - plain.alpha).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(lap.alpha.tail(4).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

// ---- TV splitting ------------------------------------------------------------

TEST_CASE("tv_rls: first multiplier update from the zero state") {
    KernelMatrix k{(Matrix(3, 3) << 1.0, 0.2, 0.1, 0.2, 1.0, 0.3, 0.1, 0.3, 1.0).finished(), 1.0};
    const SimilarityGraph g(3, {{0, 1, 1.0}, {1, 2, 0.5}});
    const LabeledSet ls({1, -1, 1}, {true, true, false});
    HyperParams hp = base_hp();
    hp.r1 = 0.7;
    hp.r2 = 1.3;
    SplittingOptions opts;
    opts.normalize = false;
    opts.initial_g = (Vector(3) << 0.4, -0.9, 0.3).finished();
    TvSplitting split(k, g, ls, hp, false, opts);
    split.step();
    CHECK((split.lambda1() - hp.r1 * (split.f() - split.g())).norm() == 0.0);
    CHECK((split.lambda2() - hp.r2 * (split.h() - split.g())).norm() == 0.0);
    // alpha^1 = (lambda I + r1 K)^{-1} r1 g^0
    Matrix a = hp.r1 * k.values;
    a.diagonal().array() += hp.lambda;
    CHECK((split.alpha() - a.inverse() * (hp.r1 * *opts.initial_g)).norm() < 1e-14);
    // h^1 = (eta J + r2 I)^{-1}(eta y + r2 g^0)
    CHECK(split.h()[0] == doctest::Approx((hp.eta * 1.0 + hp.r2 * 0.4) / (hp.eta + hp.r2)));
    CHECK(split.h()[1] == doctest::Approx((-hp.eta - hp.r2 * 0.9) / (hp.eta + hp.r2)));
    CHECK(split.h()[2] == doctest::Approx(0.3));
}

TEST_CASE("tv_rls without graph term converges to the masked RLS solution") {
    std::mt19937_64 rng(9);
    const auto x = oracle::random_points(rng, 8, 2);
    const auto k = rbf_gram(x, 1.0);
    const SimilarityGraph edgeless(8, {});
    const LabeledSet ls({1, -1, 1, 1, 1, 1, 1, 1}, {true, true, true, false, false, false, false, false});
    HyperParams hp = base_hp();
    hp.gamma = 0.0;
    hp.outer_iters = 5000;
    hp.tol = 1e-9;
    SplittingOptions opts;
    opts.normalize = false;
    const auto m = tv_rls_train(k, edgeless, ls, hp, opts);
    CHECK(m.trace.converged);
    CHECK(m.trace.consensus.back() <= hp.tol * 8);
    const auto ref = lap_rls_train(k, edgeless, ls, hp);
    CHECK((m.node_values - ref.node_values).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("tv_svm without graph term reaches consensus") {
    std::mt19937_64 rng(10);
    const auto x = oracle::random_points(rng, 8, 2);
    const auto k = rbf_gram(x, 1.0);
    const SimilarityGraph edgeless(8, {});
    const LabeledSet ls({1, -1, 1, 1, -1, 1, 1, 1}, {true, true, true, false, false, false, false, false});
    HyperParams hp = base_hp();
    hp.gamma = 0.0;
    hp.outer_iters = 5000;
    hp.tol = 1e-8;
    SplittingOptions opts;
    opts.normalize = false;
    opts.pseudo_labels = std::vector<int>{1, -1, 1, 1, -1, 1, 1, 1};
    const auto m = tv_svm_train(k, edgeless, ls, hp, opts);
    CHECK(m.trace.converged);
    CHECK(m.trace.consensus.back() <= hp.tol * 8);
}

TEST_CASE("tv_rls on two clusters: correct labels, best two-level assignment") {
    const Toy t = two_clusters(5, 11);
    HyperParams hp = base_hp();
    hp.gamma = 1.0;
    const auto m = tv_rls_train(t.k, t.g, t.ls, hp);
    const auto pred = predict_transductive(m, t.k);
    CHECK(pred == t.truth);
    // Among all +-1 assignments that respect the labels, the clusters minimize
    // the fidelity + TV objective.
    auto objective = [&](const Vector& f) {
        return 0.5 * hp.eta * (t.ls.j_diag().cwiseProduct(f) - t.ls.y_ext()).squaredNorm() + hp.gamma * graph_tv(t.g, f);
    };
    Vector truth(10), predicted(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
        truth[i] = t.truth[static_cast<std::size_t>(i)];
        predicted[i] = pred[static_cast<std::size_t>(i)];
    }
    const double at_pred = objective(predicted);
    for (int code = 0; code < 256; ++code) {
        Vector f = truth;
        int bit = 0;
        for (Eigen::Index i = 0; i < 10; ++i) {
            if (i == 0 || i == 5) continue;
            f[i] = (code >> bit++) & 1 ? 1.0 : -1.0;
        }
        CHECK(at_pred <= objective(f) + 1e-12);
    }
    CHECK(objective(predicted) < objective(-predicted));
}

TEST_CASE("tv_svm on two clusters: correct labels, single flips cost more") {
    const Toy t = two_clusters(5, 12);
    HyperParams hp = base_hp();
    hp.gamma = 1.0;
    const auto m = tv_svm_train(t.k, t.g, t.ls, hp);
    const auto pred = predict_transductive(m, t.k);
    CHECK(pred == t.truth);
    auto objective = [&](const Vector& f) {
        double hinge = 0.0;
        for (std::size_t i = 0; i < 10; ++i)
            if (t.ls.is_labeled(i)) hinge += std::max(0.0, 1.0 - t.ls.label(i) * f[static_cast<Eigen::Index>(i)]);
        return hp.mu * hinge + hp.gamma * graph_tv(t.g, f);
    };
    const Vector f = m.node_values;
    for (Eigen::Index i = 0; i < 10; ++i) {
        if (t.ls.is_labeled(static_cast<std::size_t>(i))) continue;
        Vector flipped = f;
        flipped[i] = -flipped[i];
        CHECK(objective(flipped) > objective(f));
    }
}

TEST_CASE("splitting traces: consensus shrinks on the toy sets") {
    const Toy t = two_clusters(6, 13);
    HyperParams hp = base_hp();
    hp.outer_iters = 20000;
    for (bool svm : {false, true}) {
        const auto m = svm ? tv_svm_train(t.k, t.g, t.ls, hp) : tv_rls_train(t.k, t.g, t.ls, hp);
        CHECK(m.trace.converged);
        CHECK(m.trace.consensus.back() <= hp.tol * 12);
        CHECK(m.trace.energy.size() == static_cast<std::size_t>(m.trace.iterations));
    }
}

TEST_CASE("splitting divergence detector") {
    const Toy t = two_clusters(4, 14);
    HyperParams hp = base_hp();
    hp.lambda = 1e-12;
    hp.eta = 1e12;
    hp.r1 = 1e-12;
    hp.norm_scale = NormScale::N;
    SplittingOptions opts;
    opts.normalize = false;
    opts.initial_g = Vector::Constant(8, 1e9);
    CHECK_THROWS_AS(tv_rls_train(t.k, t.g, t.ls, hp, opts), Error);
}

// ---- Cheeger ---------------------------------------------------------------

namespace {

struct Moons {
    Dataset ds;
    KernelMatrix k;
    SimilarityGraph g;
    LabeledSet ls;
    std::vector<int> truth;
};

Moons small_moons(std::uint64_t seed) {
    Moons m;
    m.ds = make_two_moons(40, 0.05, seed);
    m.k = rbf_gram(m.ds.data, 0.3 * median_bandwidth(m.ds.data));
    m.g = build_knn_graph(m.ds.data, 5, SelfTuningSigma{5});
    SplitSpec sp;
    sp.seed = seed;
    m.ls = make_binary_split(m.ds, sp);
    m.truth = binary_labels(m.ds);
    return m;
}

HyperParams cheeger_hp() {
    HyperParams hp;
    hp.lambda = 0.01;
    hp.c = 1.0;
    hp.outer_iters = 100;
    hp.norm_scale = NormScale::SqrtN;
    return hp;
}

}  // namespace

TEST_CASE("cheeger: labels clamped every iteration, energy bookkeeping") {
    const Moons mo = small_moons(3);
    const HyperParams hp = cheeger_hp();
    for (bool svm : {false, true}) {
        CheegerProx prox = svm ? make_svm_prox(mo.k, mo.ls, hp, binary_labels(mo.ds))
                               : make_rls_prox(mo.k, hp);
        CheegerIteration iter(mo.g, mo.ls, hp, prox);
        const double initial = iter.energy();
        CHECK(initial == doctest::Approx(ratio_energy(mo.g, mo.ls.y_ext())));
        for (int it = 0; it < 10; ++it) {
            const double e = iter.step();
            CHECK(e == doctest::Approx(ratio_energy(mo.g, iter.f())));
            for (std::size_t i = 0; i < mo.ls.size(); ++i)
                if (mo.ls.is_labeled(i)) CHECK(iter.clamped()[static_cast<Eigen::Index>(i)] == mo.ls.label(i));
            CHECK(iter.f().norm() == doctest::Approx(std::sqrt(40.0)));
        }
    }
}

TEST_CASE("cheeger: returned energy beats the start and the accepted trace is monotone") {
    const Moons mo = small_moons(4);
    const HyperParams hp = cheeger_hp();
    for (auto model : {cheeger_rls_train(mo.k, mo.g, mo.ls, hp), cheeger_svm_train(mo.k, mo.g, mo.ls, hp)}) {
        const double start = ratio_energy(mo.g, mo.ls.y_ext());
        CHECK(ratio_energy(mo.g, model.node_values) <= start);
        const auto& acc = model.trace.accepted_energy;
        REQUIRE(!acc.empty());
        for (std::size_t i = 1; i < acc.size(); ++i) CHECK(acc[i] <= acc[i - 1]);
        CHECK(ratio_energy(mo.g, model.node_values) == doctest::Approx(acc.back()));
    }
}

TEST_CASE("cheeger: two moons with one label per side") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Moons mo = small_moons(seed);
        const HyperParams hp = cheeger_hp();
        const auto rls = predict_transductive(cheeger_rls_train(mo.k, mo.g, mo.ls, hp), mo.k);
        const auto svm = predict_transductive(cheeger_svm_train(mo.k, mo.g, mo.ls, hp), mo.k);
        CHECK(agreement(rls, mo.truth) >= 36);
        CHECK(agreement(svm, mo.truth) >= 36);
    }
}

// ---- prediction ------------------------------------------------------------

TEST_CASE("predict: zero function is class +1, train queries follow sign(K alpha)") {
    CHECK(sign_label(0.0) == 1);
    CHECK(sign_label(-1e-300) == -1);
    std::mt19937_64 rng(15);
    const auto x = oracle::random_points(rng, 7, 2);
    BinaryModel m;
    m.variant = Variant::Rls;
    m.alpha = Vector::Zero(7);
    m.bandwidth = 0.8;
    for (int v : predict_binary(m, x, oracle::random_points(rng, 5, 2))) CHECK(v == 1);

    m.alpha = oracle::random_vector(rng, 7);
    const auto k = rbf_gram(x, 0.8);
    const Vector f = k.values * m.alpha;
    const auto p = predict_binary(m, x, x);
    const auto pt = predict_transductive(m, k);
    for (Eigen::Index i = 0; i < 7; ++i) {
        CHECK(p[static_cast<std::size_t>(i)] == sign_label(f[i]));
        CHECK(pt[static_cast<std::size_t>(i)] == sign_label(f[i]));
    }
}

TEST_CASE("predict: supervised models expand over their labeled rows") {
    std::mt19937_64 rng(16);
    const auto x = oracle::random_points(rng, 6, 2);
    BinaryModel m;
    m.variant = Variant::Svm;
    m.alpha = oracle::random_vector(rng, 2);
    m.expansion = {1, 4};
    m.bandwidth = 1.0;
    const auto p = predict_binary(m, x, x);
    for (Eigen::Index q = 0; q < 6; ++q) {
        const double f = rbf(x.row(q), x.row(1), 1.0) * m.alpha[0] + rbf(x.row(q), x.row(4), 1.0) * m.alpha[1];
        CHECK(p[static_cast<std::size_t>(q)] == sign_label(f));
    }
}

TEST_CASE("transductive labels do not depend on the order of unlabeled points") {
    const Toy t = two_clusters(5, 17);
    std::vector<Eigen::Index> perm{0, 5, 9, 1, 8, 2, 7, 3, 6, 4};  // labeled rows stay first in each pair
    DataMatrix px(10, 2);
    std::vector<int> truth(10);
    std::vector<bool> mask(10, false);
    for (Eigen::Index i = 0; i < 10; ++i) {
        px.row(i) = t.x.row(perm[static_cast<std::size_t>(i)]);
        truth[static_cast<std::size_t>(i)] = t.truth[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        mask[static_cast<std::size_t>(i)] = t.ls.is_labeled(static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]));
    }
    const auto pk = rbf_gram(px, 1.0);
    const auto pg = build_knn_graph(px, 3, SelfTuningSigma{3});
    const LabeledSet pls(truth, mask);
    const HyperParams hp = base_hp();
    const auto a = predict_transductive(lap_rls_train(t.k, t.g, t.ls, hp), t.k);
    const auto b = predict_transductive(lap_rls_train(pk, pg, pls, hp), pk);
    const auto c = predict_transductive(tv_rls_train(t.k, t.g, t.ls, hp), t.k);
    const auto d = predict_transductive(tv_rls_train(pk, pg, pls, hp), pk);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(b[i] == a[static_cast<std::size_t>(perm[i])]);
        CHECK(d[i] == c[static_cast<std::size_t>(perm[i])]);
    }
}

TEST_CASE("training argument checks") {
    const Toy t = two_clusters(3, 18);
    HyperParams hp = base_hp();
    hp.lambda = -1.0;
    CHECK_THROWS_AS(lap_rls_train(t.k, t.g, t.ls, hp), Error);
    const LabeledSet one_class({1, 1, 1, 1, 1, 1}, {true, false, false, true, false, false});
    CHECK_THROWS_AS(tv_rls_train(t.k, t.g, one_class, base_hp()), Error);
    const SimilarityGraph small(4, {});
    CHECK_THROWS_AS(lap_rls_train(t.k, small, t.ls, base_hp()), Error);
}
