#include "tvssl/error.hpp"
#include "tvssl/opt_core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace tvssl {

namespace {

// phi(nu) = sum_i y_i clip(v_i - nu y_i, 0, mu), non-increasing in nu.
double hyperplane_residual(const Vector& v, const Vector& y, double mu, double nu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += y[i] * std::clamp(v[i] - nu * y[i], 0.0, mu);
    return s;
}

void check_labels(const Vector& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        require(y[i] == 1.0 || y[i] == -1.0, ErrorCode::InvalidParameter,
                "dual QP labels must be +1 or -1");
}

double top_eigenvalue_bound(const Matrix& q) {
    const auto m = q.rows();
    if (m == 0) return 0.0;
    const double gersh = q.cwiseAbs().rowwise().sum().maxCoeff();
    Vector u = Vector::Ones(m) / std::sqrt(static_cast<double>(m));
    for (Eigen::Index i = 0; i < m; ++i) u[i] += 1e-3 * std::sin(static_cast<double>(i) + 1.0);
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
        const double nrm = u.norm();
        if (nrm == 0.0) break;
        u /= nrm;
        Vector v = q * u;
        est = u.dot(v);
        u = std::move(v);
    }
    return std::min(gersh, std::max(1.05 * est, 0.0));
}

}  // namespace

Vector project_box_hyperplane(const Vector& v, const Vector& y, double mu) {
    require(v.size() == y.size(), ErrorCode::DimensionMismatch, "projection: v and y differ in length");
    const auto m = v.size();
    if (m == 0) return v;
    std::vector<double> bp;
    bp.reserve(static_cast<std::size_t>(2 * m));
    for (Eigen::Index i = 0; i < m; ++i) {
        bp.push_back(y[i] * v[i]);
        bp.push_back(y[i] * (v[i] - mu));
    }
    std::sort(bp.begin(), bp.end());

    double nu;
    if (hyperplane_residual(v, y, mu, bp.front()) <= 0.0) {
        nu = bp.front();
    } else if (hyperplane_residual(v, y, mu, bp.back()) >= 0.0) {
        nu = bp.back();
    } else {
        std::size_t lo = 0, hi = bp.size() - 1;  // phi(lo) > 0 > phi(hi)
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (hyperplane_residual(v, y, mu, bp[mid]) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double a = bp[lo], b = bp[hi];
        const double fa = hyperplane_residual(v, y, mu, a);
        const double fb = hyperplane_residual(v, y, mu, b);
        nu = (fa == fb) ? a : a + (b - a) * fa / (fa - fb);
    }

    Vector beta(m);
    for (Eigen::Index i = 0; i < m; ++i) beta[i] = std::clamp(v[i] - nu * y[i], 0.0, mu);

    // Absorb the rounding left in beta^T y into the free coordinates.
    const double resid = beta.dot(y);
    if (resid != 0.0) {
        Eigen::Index free = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            if (beta[i] > 0.0 && beta[i] < mu) ++free;
        if (free > 0) {
            const double shift = resid / static_cast<double>(free);
            for (Eigen::Index i = 0; i < m; ++i)
                if (beta[i] > 0.0 && beta[i] < mu)
                    beta[i] = std::clamp(beta[i] - shift * y[i], 0.0, mu);
        }
    }
    return beta;
}

namespace {

template <class MatVec>
DualSolution solve_box_eq(const MatVec& qmul, double lip, const Vector& p, const Vector& y,
                          double mu, const QpOptions& opts, const Vector* warm_start) {
    const auto m = y.size();
    require(std::isfinite(mu) && mu >= 0.0, ErrorCode::InvalidParameter,
            "qp_box_eq: mu must be non-negative");
    require(opts.tol > 0.0 && opts.max_iters >= 1, ErrorCode::InvalidParameter,
            "qp_box_eq: tol > 0 and max_iters >= 1 required");
    check_labels(y);

    DualSolution sol;
    const Vector lin = p - Vector::Ones(m);  // minimize 1/2 b^T Q b + lin^T b
    auto objective = [&](const Vector& b, const Vector& qb) { return 0.5 * b.dot(qb) + lin.dot(b); };

    Vector beta = Vector::Zero(m);
    if (mu > 0.0 && warm_start && warm_start->size() == m)
        beta = project_box_hyperplane(*warm_start, y, mu);
    Vector qb = qmul(beta);
    Vector grad = qb + lin;
    double phi = objective(beta, qb);

    const double step_max = 1e10 / std::max(lip, 1e-12);
    double step = lip > 0.0 ? 1.0 / lip : 1.0;
    std::deque<double> history{phi};

    int it = 0;
    if (mu > 0.0) {
        for (it = 0; it < opts.max_iters; ++it) {
            const Vector natural = beta - project_box_hyperplane(beta - grad, y, mu);
            if (natural.lpNorm<Eigen::Infinity>() <= opts.tol) {
                sol.converged = true;
                break;
            }
            const Vector d = project_box_hyperplane(beta - step * grad, y, mu) - beta;
            const double gd = grad.dot(d);
            if (gd >= 0.0) {
                // Not a descent direction to rounding. Retry with the short
                // step; if that is already in use, the true decrease is below
                // the rounding of grad.d, so take the plain projected step
                // (monotone in exact arithmetic) instead of stalling.
                const double short_step = lip > 0.0 ? 1.0 / lip : 1.0;
                if (step != short_step) {
                    step = short_step;
                    continue;
                }
                beta = project_box_hyperplane(beta - step * grad, y, mu);
                qb = qmul(beta);
                grad = qb + lin;
                phi = objective(beta, qb);
                history.push_back(phi);
                if (history.size() > 10) history.pop_front();
                continue;
            }
            const Vector qd = qmul(d);
            const double dqd = d.dot(qd);
            const double ref = *std::max_element(history.begin(), history.end());
            double t = 1.0;
            const double phi_full = phi + gd + 0.5 * dqd;
            if (phi_full > ref + 1e-4 * gd) t = dqd > 0.0 ? std::clamp(-gd / dqd, 0.0, 1.0) : 1.0;

            beta += t * d;
            qb += t * qd;
            grad = qb + lin;
            phi = objective(beta, qb);
            history.push_back(phi);
            if (history.size() > 10) history.pop_front();

            step = dqd > 0.0 ? std::min(d.squaredNorm() / dqd, step_max) : step_max;
        }
        // Re-project to clear drift in the running updates.
        beta = project_box_hyperplane(beta, y, mu);
        qb = qmul(beta);
        grad = qb + lin;
        phi = objective(beta, qb);
    } else {
        sol.converged = true;
    }

    sol.beta = beta;
    sol.objective = -phi;
    sol.iterations = it;

    // Gradient of the maximized objective.
    const Vector ascent = -grad;
    const double free_tol = std::max(opts.tol, 1e-12 * std::max(mu, 1.0));
    double nu_sum = 0.0;
    int free_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
        const double yg = y[i] * ascent[i];  // stationarity: ascent_i = nu y_i
        if (beta[i] > free_tol && beta[i] < mu - free_tol) {
            nu_sum += yg;
            ++free_count;
        } else if (beta[i] <= free_tol) {
            // ascent_i - nu y_i <= 0
            if (y[i] > 0) lo = std::max(lo, yg); else hi = std::min(hi, yg);
        } else {
            // ascent_i - nu y_i >= 0
            if (y[i] > 0) hi = std::min(hi, yg); else lo = std::max(lo, yg);
        }
    }
    if (free_count > 0) {
        sol.nu = nu_sum / free_count;
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        sol.nu = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
        sol.nu = lo;
    } else if (std::isfinite(hi)) {
        sol.nu = hi;
    }

    sol.kkt.eq = std::abs(beta.dot(y));
    double box = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) box = std::max({box, -beta[i], beta[i] - mu});
    sol.kkt.box = box;
    sol.kkt.stationarity =
        m > 0 ? (beta - project_box_hyperplane(beta + ascent, y, mu)).lpNorm<Eigen::Infinity>() : 0.0;
    return sol;
}

}  // namespace

DualSolution qp_box_eq(const Matrix& q, const Vector& p, const Vector& y, double mu,
                       const QpOptions& opts, const Vector* warm_start) {
    const auto m = y.size();
    require(q.rows() == m && q.cols() == m && p.size() == m, ErrorCode::DimensionMismatch,
            "qp_box_eq: Q must be m x m and p, y of length m");
    return solve_box_eq([&](const Vector& v) -> Vector { return q * v; }, top_eigenvalue_bound(q),
                        p, y, mu, opts, warm_start);
}

DualSolution qp_box_eq_diagonal(const Vector& q_diag, const Vector& p, const Vector& y, double mu,
                                const QpOptions& opts, const Vector* warm_start) {
    const auto m = y.size();
    require(q_diag.size() == m && p.size() == m, ErrorCode::DimensionMismatch,
            "qp_box_eq: diag(Q), p and y must share a length");
    const double lip = m > 0 ? q_diag.cwiseAbs().maxCoeff() : 0.0;
    return solve_box_eq([&](const Vector& v) -> Vector { return q_diag.cwiseProduct(v); }, lip, p,
                        y, mu, opts, warm_start);
}

}  // namespace tvssl
