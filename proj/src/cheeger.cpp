#include "tvssl/cheeger.hpp"

#include "tvssl/error.hpp"
#include "tvssl/svm_prox.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace tvssl {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

CheegerProx make_rls_prox(const KernelMatrix& k, const HyperParams& hp) {
    Matrix a = hp.r * k.values;
    a.diagonal().array() += hp.lambda;
    auto solver = std::make_shared<SpdSolver>(a);
    const Matrix* kv = &k.values;
    const double r = hp.r;
    return [solver, kv, r](const Vector& g, const Vector&) {
        CheegerProxOutput out;
        out.alpha = solver->solve(Vector(r * g));
        out.e = (*kv) * out.alpha;
        return out;
    };
}

CheegerProx make_svm_prox(const KernelMatrix& k, const LabeledSet& ls, const HyperParams& hp,
                          std::vector<int> pseudo_labels) {
    require(pseudo_labels.size() == ls.size(), ErrorCode::DimensionMismatch,
            "pseudo-labels must cover every node");
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < ls.size(); ++i)
        if (ls.is_labeled(i) || hp.unlabeled_margins) idx.push_back(static_cast<Eigen::Index>(i));

    struct State {
        std::unique_ptr<KernelSvmProx> prox;
        std::vector<int> pseudo;
        Vector beta;
        bool first = true;
    };
    auto st = std::make_shared<State>();
    st->prox = std::make_unique<KernelSvmProx>(k.values, nullptr, hp.lambda, 0.0, hp.r, idx);
    st->pseudo = std::move(pseudo_labels);
    const LabeledSet* lsp = &ls;
    const double mu = hp.mu;
    const QpOptions qopts{hp.qp_tol, hp.qp_iters};

    return [st, lsp, mu, qopts](const Vector& g, const Vector& f) {
        if (!st->first)
            for (std::size_t i = 0; i < lsp->size(); ++i)
                if (!lsp->is_labeled(i)) st->pseudo[i] = sign_label(f[static_cast<Eigen::Index>(i)]);
        st->first = false;

        const auto& idx = st->prox->constrained();
        Vector y(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const auto i = static_cast<std::size_t>(idx[a]);
            y[static_cast<Eigen::Index>(a)] = lsp->is_labeled(i) ? lsp->label(i) : st->pseudo[i];
        }
        const SvmProxResult res =
            st->prox->solve(g, y, mu, qopts, st->beta.size() ? &st->beta : nullptr);
        st->beta = res.dual.beta;
        return CheegerProxOutput{res.alpha, res.f};
    };
}

CheegerIteration::CheegerIteration(const SimilarityGraph& g, const LabeledSet& ls,
                                   const HyperParams& hp, CheegerProx prox, std::optional<Vector> f0)
    : graph_(g), ls_(ls), hp_(hp), prox_(std::move(prox)) {
    hp_.validate();
    require(ls.size() == g.n_nodes(), ErrorCode::DimensionMismatch,
            "label set size differs from the graph");
    ls.require_both_classes();
    f_ = f0 ? *f0 : ls.y_ext();
    require(f_.size() == static_cast<Eigen::Index>(g.n_nodes()), ErrorCode::DimensionMismatch,
            "initial iterate must have length N");
    alpha_ = Vector::Zero(f_.size());
    energy_ = ratio_energy(graph_, f_);
}

double CheegerIteration::step() {
    const auto n = f_.size();
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = f_[i] + hp_.c * sgn(f_[i]);

    CheegerProxOutput kp = prox_(g, f_);

    TvProxOptions popts;
    popts.max_iters = hp_.inner_iters;
    popts.tol = hp_.tol;
    h_ = tv_prox(graph_, kp.e, hp_.c / energy_, popts).g;

    s_ = h_.array() - lower_median(h_);
    for (std::size_t i = 0; i < ls_.size(); ++i)
        if (ls_.is_labeled(i)) s_[static_cast<Eigen::Index>(i)] = ls_.label(i);

    const double target = norm_target(hp_.norm_scale, static_cast<std::size_t>(n));
    const double scale = target / s_.norm();  // s carries the labels, so it is nonzero
    f_ = scale * s_;
    alpha_ = scale * kp.alpha;
    energy_ = ratio_energy(graph_, f_);
    return energy_;
}

BinaryModel CheegerIteration::run() {
    BinaryModel m;
    m.hp = hp_;
    // The start vector is zero off the labels and is never returned.
    Vector best_f = f_;
    Vector best_alpha = alpha_;
    double best = std::numeric_limits<double>::infinity();
    double prev = energy_;
    for (int it = 0; it < hp_.outer_iters; ++it) {
        if (!(energy_ > 0.0) || !std::isfinite(energy_)) {
            // Zero energy: f is constant on every component and cannot improve.
            m.trace.converged = true;
            break;
        }
        const double e = step();
        m.trace.energy.push_back(e);
        if (e < best) {
            best = e;
            best_f = f_;
            best_alpha = alpha_;
        }
        m.trace.accepted_energy.push_back(best);
        m.trace.iterations = it + 1;
        if (std::abs(prev - e) <= hp_.tol * std::max(1.0, std::abs(e))) {
            m.trace.converged = true;
            break;
        }
        prev = e;
    }
    m.node_values = best_f;
    m.alpha = best_alpha;
    return m;
}

}  // namespace tvssl
