#include "tvssl/binary.hpp"

#include "tvssl/cheeger.hpp"
#include "tvssl/error.hpp"
#include "tvssl/svm_prox.hpp"

#include <cmath>
#include <numeric>

namespace tvssl {

namespace {

constexpr const char* kVariantNames[] = {"rls", "lap_rls", "tv_rls", "cheeger_rls",
                                         "svm", "lap_svm", "tv_svm", "cheeger_svm"};

void check_kernel_graph(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls) {
    require(k.values.rows() == k.values.cols(), ErrorCode::DimensionMismatch,
            "kernel matrix must be square");
    require(static_cast<std::size_t>(k.size()) == g.n_nodes(), ErrorCode::DimensionMismatch,
            "kernel covers " + std::to_string(k.size()) + " points, graph has " +
                std::to_string(g.n_nodes()) + " nodes");
    require(ls.size() == g.n_nodes(), ErrorCode::DimensionMismatch,
            "label set size differs from the graph");
    ls.require_both_classes();
}

void check_pm1(const Vector& y) {
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        require(y[i] == 1.0 || y[i] == -1.0, ErrorCode::InvalidParameter, "labels must be +1 or -1");
        pos |= y[i] > 0;
        neg |= y[i] < 0;
    }
    require(pos && neg, ErrorCode::InsufficientLabels, "both classes must be present");
}

QpOptions qp_options(const HyperParams& hp) { return {hp.qp_tol, hp.qp_iters}; }

TvProxOptions prox_options(const HyperParams& hp) {
    TvProxOptions o;
    o.max_iters = hp.inner_iters;
    o.tol = hp.tol;
    return o;
}

std::vector<Eigen::Index> all_indices(std::size_t n) {
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    return idx;
}

/// Margin-constrained nodes and their +-1 labels: labeled nodes with their
/// labels, plus (optionally) unlabeled nodes with pseudo-labels.
std::pair<std::vector<Eigen::Index>, Vector> margin_set(const LabeledSet& ls,
                                                        const std::vector<int>& pseudo,
                                                        bool include_unlabeled) {
    std::vector<Eigen::Index> idx;
    std::vector<double> lab;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (ls.is_labeled(i)) {
            idx.push_back(static_cast<Eigen::Index>(i));
            lab.push_back(ls.label(i));
        } else if (include_unlabeled) {
            idx.push_back(static_cast<Eigen::Index>(i));
            lab.push_back(pseudo[i]);
        }
    }
    return {idx, Eigen::Map<const Vector>(lab.data(), static_cast<Eigen::Index>(lab.size()))};
}

Vector labels_vector(const LabeledSet& ls, const std::vector<int>& pseudo) {
    Vector y(static_cast<Eigen::Index>(ls.size()));
    for (std::size_t i = 0; i < ls.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = ls.is_labeled(i) ? ls.label(i) : pseudo[i];
    return y;
}

/// Pseudo-labels for the margin constraints on unlabeled points: the sign of
/// a Laplacian-RLS fit, labeled entries copied from the labels.
std::vector<int> warm_start_labels(const KernelMatrix& k, const SimilarityGraph& g,
                                   const LabeledSet& ls, const HyperParams& hp) {
    const BinaryModel warm = lap_rls_train(k, g, ls, hp);
    std::vector<int> out(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i)
        out[i] = ls.is_labeled(i) ? ls.label(i) : sign_label(warm.node_values[static_cast<Eigen::Index>(i)]);
    return out;
}

}  // namespace

const char* variant_name(Variant v) { return kVariantNames[static_cast<int>(v)]; }

Variant parse_variant(const std::string& name) {
    for (int i = 0; i < 8; ++i)
        if (name == kVariantNames[i]) return static_cast<Variant>(i);
    fail(ErrorCode::InvalidParameter, "unknown algorithm '" + name + "'");
}

bool is_svm_variant(Variant v) { return static_cast<int>(v) >= static_cast<int>(Variant::Svm); }

bool is_supervised_variant(Variant v) { return v == Variant::Rls || v == Variant::Svm; }

// ---------------------------------------------------------------------------

LabeledSet::LabeledSet(const std::vector<int>& labels, const std::vector<bool>& mask)
    : labels_(labels), mask_(mask) {
    require(labels.size() == mask.size(), ErrorCode::DimensionMismatch,
            "labels and mask differ in length");
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i])
            require(labels[i] == 1 || labels[i] == -1, ErrorCode::InvalidParameter,
                    "labeled point " + std::to_string(i) + " must carry +1 or -1");
        else
            labels_[i] = 0;
    }
}

std::vector<Eigen::Index> LabeledSet::labeled_indices() const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < mask_.size(); ++i)
        if (mask_[i]) out.push_back(static_cast<Eigen::Index>(i));
    return out;
}

std::size_t LabeledSet::labeled_count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

Vector LabeledSet::y_ext() const {
    Vector y = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i)
        if (mask_[i]) y[static_cast<Eigen::Index>(i)] = labels_[i];
    return y;
}

Vector LabeledSet::j_diag() const {
    Vector j = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i)
        if (mask_[i]) j[static_cast<Eigen::Index>(i)] = 1.0;
    return j;
}

void LabeledSet::require_both_classes() const {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!mask_[i]) continue;
        pos |= labels_[i] > 0;
        neg |= labels_[i] < 0;
    }
    require(pos && neg, ErrorCode::InsufficientLabels, "at least one label per class is required");
}

// ---------------------------------------------------------------------------
// Closed forms

BinaryModel rls_train(const KernelMatrix& k, const Vector& y, const HyperParams& hp) {
    hp.validate();
    require(k.values.rows() == k.values.cols() && k.size() == y.size(), ErrorCode::DimensionMismatch,
            "rls_train: K must be n x n with one label per row");
    require(y.size() >= 2, ErrorCode::InsufficientLabels, "rls_train needs at least 2 points");
    check_pm1(y);

    Matrix a = hp.eta * k.values;
    a.diagonal().array() += hp.lambda;
    BinaryModel m;
    m.variant = Variant::Rls;
    m.alpha = SpdSolver(a).solve(Vector(hp.eta * y));
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    m.trace.iterations = 1;
    m.trace.converged = true;
    return m;
}

BinaryModel lap_rls_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                          const HyperParams& hp) {
    hp.validate();
    check_kernel_graph(k, g, ls);
    const Matrix& kv = k.values;
    const Vector jd = ls.j_diag();

    // eta J K + lambda I + gamma L K with L the energy Laplacian.
    Matrix a = hp.eta * jd.asDiagonal() * kv;
    a.diagonal().array() += hp.lambda;
    if (hp.gamma > 0.0) a.noalias() += hp.gamma * g.energy_laplacian() * kv;
    const Vector rhs = hp.eta * ls.y_ext();

    const LuSolver lu(a);
    BinaryModel m;
    m.variant = Variant::LapRls;
    m.alpha = lu.solve(rhs);
    const double resid = (a * m.alpha - rhs).norm();
    require(resid <= 1e-8 * std::max(rhs.norm(), 1e-300), ErrorCode::Factorization,
            "Laplacian RLS system residual " + std::to_string(resid) + " exceeds tolerance (rcond=" +
                std::to_string(lu.rcond()) + ")");
    m.node_values = kv * m.alpha;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    m.trace.iterations = 1;
    m.trace.converged = true;
    return m;
}

BinaryModel svm_train(const KernelMatrix& k, const Vector& y, const HyperParams& hp) {
    hp.validate();
    require(k.values.rows() == k.values.cols() && k.size() == y.size(), ErrorCode::DimensionMismatch,
            "svm_train: K must be n x n with one label per row");
    check_pm1(y);
    const KernelSvmProx prox(k.values, nullptr, hp.lambda, 0.0, 0.0, all_indices(static_cast<std::size_t>(y.size())));
    const SvmProxResult res = prox.solve(Vector(), y, hp.mu, qp_options(hp));

    BinaryModel m;
    m.variant = Variant::Svm;
    m.alpha = res.alpha;
    m.bias = res.bias;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    m.trace.iterations = res.dual.iterations;
    m.trace.converged = res.dual.converged;
    return m;
}

BinaryModel lap_svm_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                          const HyperParams& hp) {
    hp.validate();
    check_kernel_graph(k, g, ls);
    std::vector<int> pseudo(ls.size(), 1);
    const bool all_labeled = ls.labeled_count() == ls.size();
    if (hp.unlabeled_margins && !all_labeled) pseudo = warm_start_labels(k, g, ls, hp);
    const auto [idx, y] = margin_set(ls, pseudo, hp.unlabeled_margins);

    const Matrix lap = g.energy_laplacian();
    const KernelSvmProx prox(k.values, &lap, hp.lambda, hp.gamma, 0.0, idx);
    const SvmProxResult res = prox.solve(Vector(), y, hp.mu, qp_options(hp));

    BinaryModel m;
    m.variant = Variant::LapSvm;
    m.alpha = res.alpha;
    m.node_values = res.f;
    m.bias = res.bias;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    m.trace.iterations = res.dual.iterations;
    m.trace.converged = res.dual.converged;
    return m;
}

// ---------------------------------------------------------------------------
// Two-split augmented Lagrangian (TV-RLS, TV-SVM)

TvSplitting::TvSplitting(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, bool svm_h_step, const SplittingOptions& opts)
    : k_(k), graph_(g), ls_(ls), hp_(hp), svm_(svm_h_step), normalize_(opts.normalize) {
    hp_.validate();
    check_kernel_graph(k, g, ls);
    const auto n = k.size();
    Matrix a = hp_.r1 * k.values;
    a.diagonal().array() += hp_.lambda;
    alpha_solver_ = SpdSolver(a);

    y_ext_ = ls.y_ext();
    j_diag_ = ls.j_diag();
    g_ = opts.initial_g ? *opts.initial_g : y_ext_;
    require(g_.size() == n, ErrorCode::DimensionMismatch, "initial g must have length N");
    alpha_ = Vector::Zero(n);
    f_ = Vector::Zero(n);
    h_ = Vector::Zero(n);
    lam1_ = Vector::Zero(n);
    lam2_ = Vector::Zero(n);

    if (svm_) {
        if (opts.pseudo_labels) {
            pseudo_ = *opts.pseudo_labels;
            require(pseudo_.size() == ls.size(), ErrorCode::DimensionMismatch,
                    "pseudo-labels must cover every node");
        } else {
            pseudo_ = warm_start_labels(k, g, ls, hp_);
        }
        for (std::size_t i = 0; i < ls.size(); ++i)
            if (ls.is_labeled(i)) pseudo_[i] = ls.label(i);
    }
}

double TvSplitting::step() {
    const auto n = k_.size();
    const double r1 = hp_.r1, r2 = hp_.r2;

    alpha_ = alpha_solver_.solve(Vector(r1 * g_ - lam1_));
    f_ = k_.values * alpha_;

    if (!svm_) {
        h_ = (hp_.eta * y_ext_ + r2 * g_ - lam2_).cwiseQuotient(hp_.eta * j_diag_ + Vector::Constant(n, r2));
    } else {
        const Vector e = g_ - lam2_ / r2;
        const Vector y = labels_vector(ls_, pseudo_);
        const IdentitySvmProxResult res =
            svm_prox_identity(e, y, hp_.mu, r2, qp_options(hp_), beta_.size() ? &beta_ : nullptr);
        h_ = res.h;
        beta_ = res.dual.beta;
        bias_ = res.bias;
    }

    const Vector z1 = f_ + lam1_ / r1;
    const Vector z2 = h_ + lam2_ / r2;
    const Vector zbar = (r1 * z1 + r2 * z2) / (r1 + r2);
    Vector gbar = tv_prox(graph_, zbar, hp_.gamma / (r1 + r2), prox_options(hp_)).g;

    if (normalize_) {
        g_ = normalize_ball_zero_mean(gbar, norm_target(hp_.norm_scale, static_cast<std::size_t>(n))).values;
    } else {
        g_ = std::move(gbar);
    }

    lam1_ += r1 * (f_ - g_);
    lam2_ += r2 * (h_ - g_);

    const double fn = f_.norm();
    require(std::isfinite(fn) && fn <= 1e6 * static_cast<double>(n), ErrorCode::Divergence,
            "splitting iterates diverged (||f|| = " + std::to_string(fn) + ")");

    if (svm_)
        for (std::size_t i = 0; i < ls_.size(); ++i)
            if (!ls_.is_labeled(i)) pseudo_[i] = sign_label(g_[static_cast<Eigen::Index>(i)]);

    return (f_ - g_).norm() + (h_ - g_).norm();
}

namespace {

BinaryModel run_splitting(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                          const HyperParams& hp, bool svm, const SplittingOptions& opts) {
    TvSplitting split(k, g, ls, hp, svm, opts);
    BinaryModel m;
    m.variant = svm ? Variant::TvSvm : Variant::TvRls;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    const double n = static_cast<double>(k.size());
    const Vector y_ext = ls.y_ext();
    const Vector jd = ls.j_diag();
    for (int it = 0; it < hp.outer_iters; ++it) {
        const double residual = split.step();
        const Vector& f = split.f();
        const double fit = 0.5 * hp.eta * (jd.cwiseProduct(f) - y_ext).squaredNorm();
        m.trace.energy.push_back(fit + 0.5 * hp.lambda * split.alpha().dot(k.values * split.alpha()) +
                                 hp.gamma * graph_tv(g, f));
        m.trace.consensus.push_back(residual);
        m.trace.iterations = it + 1;
        if (residual <= hp.tol * n) {
            m.trace.converged = true;
            break;
        }
    }
    m.alpha = split.alpha();
    m.node_values = split.f();
    m.bias = split.bias();
    return m;
}

}  // namespace

BinaryModel tv_rls_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, const SplittingOptions& opts) {
    return run_splitting(k, g, ls, hp, false, opts);
}

BinaryModel tv_svm_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, const SplittingOptions& opts) {
    return run_splitting(k, g, ls, hp, true, opts);
}

// ---------------------------------------------------------------------------
// Cheeger ratio iterations

BinaryModel cheeger_rls_train(const KernelMatrix& k, const SimilarityGraph& g,
                              const LabeledSet& ls, const HyperParams& hp) {
    hp.validate();
    check_kernel_graph(k, g, ls);
    CheegerIteration iter(g, ls, hp, make_rls_prox(k, hp));
    BinaryModel m = iter.run();
    m.variant = Variant::CheegerRls;
    m.bandwidth = k.bandwidth;
    return m;
}

BinaryModel cheeger_svm_train(const KernelMatrix& k, const SimilarityGraph& g,
                              const LabeledSet& ls, const HyperParams& hp) {
    hp.validate();
    check_kernel_graph(k, g, ls);
    std::vector<int> pseudo(ls.size(), 1);
    if (hp.unlabeled_margins) pseudo = warm_start_labels(k, g, ls, hp);
    CheegerIteration iter(g, ls, hp, make_svm_prox(k, ls, hp, std::move(pseudo)));
    BinaryModel m = iter.run();
    m.variant = Variant::CheegerSvm;
    m.bandwidth = k.bandwidth;
    return m;
}

// ---------------------------------------------------------------------------

std::vector<int> predict_binary(const BinaryModel& model, const DataMatrix& train,
                                const DataMatrix& query) {
    DataMatrix support;
    if (model.expansion.empty()) {
        support = train;
    } else {
        support.resize(static_cast<Eigen::Index>(model.expansion.size()), train.cols());
        for (std::size_t t = 0; t < model.expansion.size(); ++t)
            support.row(static_cast<Eigen::Index>(t)) = train.row(model.expansion[t]);
    }
    Vector f = kernel_expand(model.alpha, support, query, model.bandwidth);
    if (model.hp.use_bias) f.array() += model.bias;
    std::vector<int> out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(f[i]);
    return out;
}

std::vector<int> predict_transductive(const BinaryModel& model, const KernelMatrix& k) {
    Vector f;
    if (model.node_values.size() > 0) {
        f = model.node_values;
    } else if (model.expansion.empty()) {
        require(model.alpha.size() == k.size(), ErrorCode::DimensionMismatch,
                "alpha does not match the kernel size");
        f = k.values * model.alpha;
    } else {
        f = Vector::Zero(k.size());
        for (std::size_t t = 0; t < model.expansion.size(); ++t)
            f += k.values.col(model.expansion[t]) * model.alpha[static_cast<Eigen::Index>(t)];
    }
    if (model.hp.use_bias) f.array() += model.bias;
    std::vector<int> out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(f[i]);
    return out;
}

}  // namespace tvssl
