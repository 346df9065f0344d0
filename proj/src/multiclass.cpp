#include "tvssl/multiclass.hpp"

#include "tvssl/error.hpp"
#include "tvssl/svm_prox.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace tvssl {

MultiLabelSet::MultiLabelSet(std::vector<int> classes, int n_classes)
    : classes_(std::move(classes)), c_(n_classes) {
    require(n_classes >= 2, ErrorCode::InvalidParameter, "at least two classes are required");
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        require(classes_[i] >= -1 && classes_[i] < n_classes, ErrorCode::InvalidParameter,
                "class index of node " + std::to_string(i) + " out of range");
    }
}

std::size_t MultiLabelSet::labeled_count() const {
    std::size_t n = 0;
    for (int c : classes_) n += c >= 0;
    return n;
}

Vector MultiLabelSet::indicator(int k) const {
    Vector y = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i)
        if (classes_[i] == k) y[static_cast<Eigen::Index>(i)] = 1.0;
    return y;
}

Vector MultiLabelSet::one_vs_rest(int k) const {
    Vector y = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i)
        if (classes_[i] >= 0) y[static_cast<Eigen::Index>(i)] = classes_[i] == k ? 1.0 : -1.0;
    return y;
}

Vector MultiLabelSet::j_diag() const {
    Vector j = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i)
        if (classes_[i] >= 0) j[static_cast<Eigen::Index>(i)] = 1.0;
    return j;
}

void MultiLabelSet::require_every_class() const {
    std::vector<bool> seen(static_cast<std::size_t>(c_), false);
    for (int c : classes_)
        if (c >= 0) seen[static_cast<std::size_t>(c)] = true;
    for (int k = 0; k < c_; ++k)
        require(seen[static_cast<std::size_t>(k)], ErrorCode::InsufficientLabels,
                "class " + std::to_string(k) + " has no labeled point");
}

std::vector<int> argmax_rows(const Matrix& channels) {
    std::vector<int> out(static_cast<std::size_t>(channels.rows()));
    for (Eigen::Index i = 0; i < channels.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < channels.cols(); ++k)
            if (channels(i, k) > channels(i, best)) best = k;
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

namespace {

void check_inputs(const KernelMatrix& k, const SimilarityGraph& g, const MultiLabelSet& mls,
                  const HyperParams& hp) {
    hp.validate();
    require(k.values.rows() == k.values.cols(), ErrorCode::DimensionMismatch,
            "kernel matrix must be square");
    require(static_cast<std::size_t>(k.size()) == g.n_nodes() && mls.size() == g.n_nodes(),
            ErrorCode::DimensionMismatch, "kernel, graph and labels cover different point sets");
    mls.require_every_class();
}

Matrix indicator_targets(const MultiLabelSet& mls) {
    Matrix y(static_cast<Eigen::Index>(mls.size()), mls.n_classes());
    for (int k = 0; k < mls.n_classes(); ++k) y.col(k) = mls.indicator(k);
    return y;
}

/// One-hot rows on labeled nodes, 1/c on unlabeled nodes.
Matrix initial_channels(const MultiLabelSet& mls) {
    const int c = mls.n_classes();
    Matrix g = Matrix::Constant(static_cast<Eigen::Index>(mls.size()), c, 1.0 / c);
    for (std::size_t i = 0; i < mls.size(); ++i) {
        if (!mls.is_labeled(i)) continue;
        g.row(static_cast<Eigen::Index>(i)).setZero();
        g(static_cast<Eigen::Index>(i), mls.class_of(i)) = 1.0;
    }
    return g;
}

/// Classes for unlabeled nodes from a one-shot Laplacian RLS fit per channel.
std::vector<int> warm_start_classes(const KernelMatrix& k, const SimilarityGraph& g,
                                    const MultiLabelSet& mls, const HyperParams& hp) {
    Matrix a = hp.eta * mls.j_diag().asDiagonal() * k.values;
    a.diagonal().array() += hp.lambda;
    if (hp.gamma > 0.0) a.noalias() += hp.gamma * g.energy_laplacian() * k.values;
    const Matrix alphas = LuSolver(a).solve(Matrix(hp.eta * indicator_targets(mls)));
    std::vector<int> cls = argmax_rows(k.values * alphas);
    for (std::size_t i = 0; i < mls.size(); ++i)
        if (mls.is_labeled(i)) cls[i] = mls.class_of(i);
    return cls;
}

void refresh_classes(std::vector<int>& cls, const MultiLabelSet& mls, const Matrix& channels) {
    const std::vector<int> am = argmax_rows(channels);
    for (std::size_t i = 0; i < mls.size(); ++i)
        if (!mls.is_labeled(i)) cls[i] = am[i];
}

/// Margin constraints per channel: every node when hp.unlabeled_margins,
/// otherwise the labeled ones.
std::vector<Eigen::Index> margin_nodes(const MultiLabelSet& mls, bool unlabeled_margins) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < mls.size(); ++i)
        if (mls.is_labeled(i) || unlabeled_margins) idx.push_back(static_cast<Eigen::Index>(i));
    return idx;
}

Vector channel_signs(const std::vector<Eigen::Index>& idx, const std::vector<int>& cls, int k) {
    Vector y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
        y[static_cast<Eigen::Index>(a)] = cls[static_cast<std::size_t>(idx[a])] == k ? 1.0 : -1.0;
    return y;
}

/// Rescales every nonzero column to the target norm; zero columns stay zero.
void renormalize_columns(Matrix& m, double target) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double nrm = m.col(k).norm();
        if (nrm > 0.0) m.col(k) *= target / nrm;
    }
}

TvProxOptions prox_options(const HyperParams& hp) {
    TvProxOptions o;
    o.max_iters = hp.inner_iters;
    o.tol = hp.tol;
    return o;
}

void check_divergence(const Matrix& f) {
    const double nrm = f.norm();
    const double n = static_cast<double>(f.rows());
    require(std::isfinite(nrm) && nrm <= 1e6 * n * std::sqrt(static_cast<double>(f.cols())),
            ErrorCode::Divergence, "multiclass iterates diverged (||F|| = " + std::to_string(nrm) + ")");
}

// Splitting loop shared by the Laplacian and TV variants: channel solve,
// g-step (simplex projection, plus TV prox and renormalization for the TV
// variants), multiplier ascent.
MulticlassModel run_splitting(Variant v, const KernelMatrix& k, const SimilarityGraph& g,
                              const MultiLabelSet& mls, const HyperParams& hp) {
    check_inputs(k, g, mls, hp);
    const bool svm = is_svm_variant(v);
    const bool tv = v == Variant::TvRls || v == Variant::TvSvm;
    const bool lap = !tv && hp.gamma > 0.0;
    const auto n = k.size();
    const int c = mls.n_classes();
    const double r = hp.r;
    const Matrix& kv = k.values;

    Matrix lap_e;
    if (lap) lap_e = g.energy_laplacian();

    std::unique_ptr<LuSolver> rls_lu;
    std::unique_ptr<KernelSvmProx> svm_prox;
    std::vector<Eigen::Index> idx;
    std::vector<int> cls;
    std::vector<Vector> betas(static_cast<std::size_t>(c));
    Matrix eta_y;
    if (!svm) {
        Matrix a = hp.eta * mls.j_diag().asDiagonal() * kv + r * kv;
        a.diagonal().array() += hp.lambda;
        if (lap) a.noalias() += hp.gamma * lap_e * kv;
        rls_lu = std::make_unique<LuSolver>(a);
        eta_y = hp.eta * indicator_targets(mls);
    } else {
        idx = margin_nodes(mls, hp.unlabeled_margins);
        svm_prox = std::make_unique<KernelSvmProx>(kv, lap ? &lap_e : nullptr, hp.lambda,
                                                   lap ? hp.gamma : 0.0, r, idx);
        cls = hp.unlabeled_margins ? warm_start_classes(k, g, mls, hp) : mls.classes();
    }

    const QpOptions qopts{hp.qp_tol, hp.qp_iters};
    const TvProxOptions popts = prox_options(hp);
    const double target = norm_target(hp.norm_scale, static_cast<std::size_t>(n));

    Matrix gm = initial_channels(mls);
    Matrix lam = Matrix::Zero(n, c);
    Matrix alphas(n, c), f(n, c);

    MulticlassModel m;
    m.variant = v;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    for (int it = 0; it < hp.outer_iters; ++it) {
        if (!svm) {
            alphas = rls_lu->solve(Matrix(eta_y + r * gm - lam));
        } else {
            for (int ch = 0; ch < c; ++ch) {
                const Vector centre = gm.col(ch) - lam.col(ch) / r;
                Vector& beta = betas[static_cast<std::size_t>(ch)];
                const SvmProxResult res = svm_prox->solve(centre, channel_signs(idx, cls, ch), hp.mu,
                                                          qopts, beta.size() ? &beta : nullptr);
                beta = res.dual.beta;
                alphas.col(ch) = res.alpha;
            }
        }
        f.noalias() = kv * alphas;

        Matrix z = f + lam / r;
        if (tv) {
            for (int ch = 0; ch < c; ++ch) z.col(ch) = tv_prox(g, z.col(ch), hp.gamma / r, popts).g;
            if (hp.simplex_last) {
                renormalize_columns(z, target);
                project_rows_to_simplex(z);
            } else {
                project_rows_to_simplex(z);
                renormalize_columns(z, target);
            }
        } else {
            project_rows_to_simplex(z);
        }
        gm = std::move(z);
        lam += r * (f - gm);

        check_divergence(f);
        const double consensus = (f - gm).norm();
        m.trace.consensus.push_back(consensus);
        m.trace.iterations = it + 1;
        if (svm) refresh_classes(cls, mls, gm);
        if (consensus <= hp.tol * static_cast<double>(n)) {
            m.trace.converged = true;
            break;
        }
    }
    m.alphas = alphas;
    m.node_values = f;
    return m;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Channel-wise ratio iterations with a joint simplex projection.
MulticlassModel run_cheeger(Variant v, const KernelMatrix& k, const SimilarityGraph& g,
                            const MultiLabelSet& mls, const HyperParams& hp) {
    check_inputs(k, g, mls, hp);
    const bool svm = v == Variant::CheegerSvm;
    const auto n = k.size();
    const int c = mls.n_classes();
    const Matrix& kv = k.values;

    std::unique_ptr<SpdSolver> rls_solver;
    std::unique_ptr<KernelSvmProx> svm_prox;
    std::vector<Eigen::Index> idx;
    std::vector<int> cls;
    std::vector<Vector> betas(static_cast<std::size_t>(c));
    Matrix targets(n, c);
    if (!svm) {
        Matrix a = hp.r * kv;
        a.diagonal().array() += hp.lambda;
        rls_solver = std::make_unique<SpdSolver>(a);
        targets = indicator_targets(mls);
    } else {
        idx = margin_nodes(mls, hp.unlabeled_margins);
        svm_prox = std::make_unique<KernelSvmProx>(kv, nullptr, hp.lambda, 0.0, hp.r, idx);
        cls = hp.unlabeled_margins ? warm_start_classes(k, g, mls, hp) : mls.classes();
        for (int ch = 0; ch < c; ++ch) targets.col(ch) = mls.one_vs_rest(ch);
    }

    const QpOptions qopts{hp.qp_tol, hp.qp_iters};
    const TvProxOptions popts = prox_options(hp);
    const double target = norm_target(hp.norm_scale, static_cast<std::size_t>(n));

    Matrix f = initial_channels(mls);
    Matrix alphas = Matrix::Zero(n, c);
    Matrix best_f, best_alphas;
    double best = std::numeric_limits<double>::infinity();
    double prev = best;

    MulticlassModel m;
    m.variant = v;
    m.bandwidth = k.bandwidth;
    m.hp = hp;
    for (int it = 0; it < hp.outer_iters; ++it) {
        Matrix s(n, c), step_alphas(n, c);
        for (int ch = 0; ch < c; ++ch) {
            const Vector fk = f.col(ch);
            const double e_k = ratio_energy(g, fk);
            Vector gk(n);
            for (Eigen::Index i = 0; i < n; ++i) gk[i] = fk[i] + hp.c * sgn(fk[i]);

            Vector ak;
            if (!svm) {
                ak = rls_solver->solve(Vector(hp.r * gk));
            } else {
                Vector& beta = betas[static_cast<std::size_t>(ch)];
                const SvmProxResult res = svm_prox->solve(gk, channel_signs(idx, cls, ch), hp.mu,
                                                          qopts, beta.size() ? &beta : nullptr);
                beta = res.dual.beta;
                ak = res.alpha;
            }
            const Vector ek = kv * ak;

            Vector hk;
            if (!std::isfinite(e_k)) {
                hk = ek;  // constant channel: the TV weight vanishes
            } else if (e_k <= 0.0) {
                hk = Vector::Constant(n, ek.mean());
            } else {
                hk = tv_prox(g, ek, hp.c / e_k, popts).g;
            }
            Vector sk = hk.array() - lower_median(hk);
            for (std::size_t i = 0; i < mls.size(); ++i)
                if (mls.is_labeled(i)) sk[static_cast<Eigen::Index>(i)] = targets(static_cast<Eigen::Index>(i), ch);
            s.col(ch) = sk;
            step_alphas.col(ch) = ak;
        }
        project_rows_to_simplex(s);
        for (int ch = 0; ch < c; ++ch) {
            const double nrm = s.col(ch).norm();
            const double scale = nrm > 0.0 ? target / nrm : 0.0;
            f.col(ch) = scale * s.col(ch);
            alphas.col(ch) = scale * step_alphas.col(ch);
        }

        double total = 0.0;
        for (int ch = 0; ch < c; ++ch) total += ratio_energy(g, Vector(f.col(ch)));
        m.trace.energy.push_back(total);
        if (total < best || best_f.size() == 0) {
            best = std::min(best, total);
            best_f = f;
            best_alphas = alphas;
        }
        m.trace.accepted_energy.push_back(best);
        m.trace.iterations = it + 1;
        if (svm) refresh_classes(cls, mls, f);
        if (std::isfinite(total) && std::abs(prev - total) <= hp.tol * std::max(1.0, std::abs(total))) {
            m.trace.converged = true;
            break;
        }
        prev = total;
    }
    m.alphas = best_alphas;
    m.node_values = best_f;
    return m;
}

}  // namespace

MulticlassModel lap_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp) {
    return run_splitting(Variant::LapRls, k, g, mls, hp);
}

MulticlassModel tv_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                const MultiLabelSet& mls, const HyperParams& hp) {
    return run_splitting(Variant::TvRls, k, g, mls, hp);
}

MulticlassModel cheeger_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                     const MultiLabelSet& mls, const HyperParams& hp) {
    return run_cheeger(Variant::CheegerRls, k, g, mls, hp);
}

MulticlassModel lap_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp) {
    return run_splitting(Variant::LapSvm, k, g, mls, hp);
}

MulticlassModel tv_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                const MultiLabelSet& mls, const HyperParams& hp) {
    return run_splitting(Variant::TvSvm, k, g, mls, hp);
}

MulticlassModel cheeger_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                     const MultiLabelSet& mls, const HyperParams& hp) {
    return run_cheeger(Variant::CheegerSvm, k, g, mls, hp);
}

MulticlassModel multiclass_train(Variant v, const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp) {
    switch (v) {
        case Variant::LapRls: return lap_rls_mc_train(k, g, mls, hp);
        case Variant::TvRls: return tv_rls_mc_train(k, g, mls, hp);
        case Variant::CheegerRls: return cheeger_rls_mc_train(k, g, mls, hp);
        case Variant::LapSvm: return lap_svm_mc_train(k, g, mls, hp);
        case Variant::TvSvm: return tv_svm_mc_train(k, g, mls, hp);
        case Variant::CheegerSvm: return cheeger_svm_mc_train(k, g, mls, hp);
        default: break;
    }
    fail(ErrorCode::Unsupported,
         std::string("no multiclass form for '") + variant_name(v) + "'");
}

std::vector<int> predict_multiclass(const MulticlassModel& model, const DataMatrix& train,
                                    const DataMatrix& query) {
    require(model.alphas.rows() == train.rows(), ErrorCode::DimensionMismatch,
            "model and training data differ in size");
    const Matrix kq = rbf_cross(query, train, model.bandwidth);
    return argmax_rows(kq * model.alphas);
}

std::vector<int> predict_multiclass_transductive(const MulticlassModel& model) {
    return argmax_rows(model.node_values);
}

}  // namespace tvssl
