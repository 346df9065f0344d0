#include "dual_checks.hpp"
#include "oracles.hpp"

#include "tvssl/graph.hpp"
#include "tvssl/kernel.hpp"
#include "tvssl/svm_prox.hpp"

#include <algorithm>
#include <random>

namespace oracle {

const char* dual_kind_name(DualKind k) {
    switch (k) {
        case DualKind::Svm: return "svm";
        case DualKind::LapSvm: return "lap_svm";
        case DualKind::KernelProx: return "kernel_prox";
        case DualKind::LapKernelProx: return "lap_kernel_prox";
        case DualKind::IdentityProx: return "identity_prox";
    }
    return "?";
}

std::vector<DualKind> all_dual_kinds() {
    return {DualKind::Svm, DualKind::LapSvm, DualKind::KernelProx, DualKind::LapKernelProx,
            DualKind::IdentityProx};
}

std::vector<DualCheck> run_dual_checks(DualKind kind, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    tvssl::QpOptions qp;
    qp.tol = 1e-9;
    qp.max_iters = 200000;

    std::vector<DualCheck> out;
    for (int t = 0; t < count; ++t) {
        const int n = 3 + t % 6;
        const double lambda = 0.2 + unif(rng);
        const double mu = 0.3 + 2.0 * unif(rng);
        const double gamma = 0.1 + unif(rng);
        const double r = 0.5 + unif(rng);

        // Margin set: every point for the plain kinds, a random subset with
        // both signs otherwise.
        std::vector<Eigen::Index> constrained;
        for (int i = 0; i < n; ++i)
            if (kind == DualKind::Svm || kind == DualKind::IdentityProx || i < 2 || unif(rng) < 0.6)
                constrained.push_back(i);
        const auto m = static_cast<Eigen::Index>(constrained.size());
        Vector y = random_signs(rng, m);
        y[0] = 1.0;
        y[1] = -1.0;
        const Vector e = random_vector(rng, n, -1.5, 1.5);

        HingeProblem p;
        p.y = y;
        p.mu = mu;
        DualCheck rec{kind, n};

        if (kind == DualKind::IdentityProx) {
            p.h = r * Matrix::Identity(n, n);
            p.c = r * e;
            p.c0 = 0.5 * r * e.squaredNorm();
            p.a = Matrix::Identity(n, n);
            const auto res = tvssl::svm_prox_identity(e, y, mu, r, qp);
            const auto ref = hinge_partition_oracle(p);
            rec.variable_error = (res.h - ref.x).norm();
            rec.objective_error = std::abs(hinge_objective_best_b(p, res.h) - ref.objective);
            rec.converged = res.dual.converged && ref.found;
            out.push_back(rec);
            continue;
        }

        const auto x = random_points(rng, n, 2);
        const Matrix k = tvssl::rbf_gram(x, 1.0).values;
        const bool use_graph = kind == DualKind::LapSvm || kind == DualKind::LapKernelProx;
        const bool use_center = kind == DualKind::KernelProx || kind == DualKind::LapKernelProx;
        const auto graph = random_graph(rng, static_cast<std::size_t>(n), 0.4);
        const Matrix lap = graph.energy_laplacian();
        const double g_w = use_graph ? gamma : 0.0;
        const double r_w = use_center ? r : 0.0;

        // lambda/2 a'Ka + gamma/2 (Ka)'L(Ka) + r/2 ||Ka - e||^2
        p.h = lambda * k + g_w * k * lap * k + r_w * k * k;
        p.h = 0.5 * (p.h + p.h.transpose()).eval();
        p.c = r_w * k * e;
        p.c0 = 0.5 * r_w * e.squaredNorm();
        p.a.resize(m, n);
        for (Eigen::Index a = 0; a < m; ++a) p.a.row(a) = k.row(constrained[static_cast<std::size_t>(a)]);

        const tvssl::KernelSvmProx prox(k, use_graph ? &lap : nullptr, lambda, g_w, r_w, constrained);
        const auto res = prox.solve(e, y, mu, qp);
        const auto ref = hinge_partition_oracle(p);
        rec.variable_error = (res.alpha - ref.x).norm();
        rec.objective_error = std::abs(hinge_objective_best_b(p, res.alpha) - ref.objective);
        rec.converged = res.dual.converged && ref.found;
        out.push_back(rec);
    }
    return out;
}

}  // namespace oracle
